#include "cmclab/catenoid.hpp"

#include <Eigen/Sparse>
#include <cmath>

#include "cmclab/errors.hpp"
#include "cmclab/exact.hpp"

namespace cmc {

CatenoidChart CatenoidChart::neck_region(double epsilon, int n_s, int n_theta) {
  if (epsilon <= 0) throw ParamOutOfRange("epsilon must be positive");
  CatenoidChart c;
  c.epsilon = epsilon;
  c.s_max = std::acosh(1.0 / std::sqrt(epsilon));
  c.n_s = n_s;
  c.n_theta = n_theta;
  return c;
}

CatenoidChart CatenoidChart::reaching_radius(double epsilon, double r_max, int n_s, int n_theta) {
  if (epsilon <= 0 || r_max <= epsilon) throw ParamOutOfRange("need r_max > epsilon > 0");
  CatenoidChart c;
  c.epsilon = epsilon;
  c.s_max = std::acosh(r_max / epsilon);
  c.n_s = n_s;
  c.n_theta = n_theta;
  return c;
}

Eigen::Vector3d catenoid_immersion(double epsilon, double s, double theta) {
  if (epsilon <= 0) throw ParamOutOfRange("epsilon must be positive");
  const double r = epsilon * std::cosh(s);
  return {r * std::cos(theta), r * std::sin(theta), epsilon * s};
}

namespace {

// Circulant second-derivative row for the periodic spectral theta derivative.
Eigen::VectorXd spectral_d2_row(int n) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
  for (int l = 0; l < n; ++l) {
    double acc = 0;
    for (int k = 0; k < n; ++k) {
      int m = (k <= n / 2) ? k : k - n;
      acc += -static_cast<double>(m) * m * std::cos(2.0 * kPi * m * l / n);
    }
    row(l) = acc / n;
  }
  return row;
}

}  // namespace

ChartField catenoid_jacobi_apply(const CatenoidChart& chart, const ChartField& f) {
  const int N = chart.n_s;
  const int nt = chart.n_theta;
  if (N < 8 || nt < 8) throw GridTooCoarse("catenoid chart too coarse");
  const double h = chart.hs();
  ChartField out(N + 1, nt);

  Eigen::VectorXd d2row = spectral_d2_row(nt);
  // theta part, spectral
  for (int i = 0; i <= N; ++i) {
    for (int j = 0; j < nt; ++j) {
      double acc = 0;
      for (int l = 0; l < nt; ++l) acc += d2row(l) * f(i, (j + l) % nt);
      out(i, j) = acc;
    }
  }
  // s part, centered with one-sided closures at the chart ends
  for (int j = 0; j < nt; ++j) {
    for (int i = 1; i < N; ++i) {
      out(i, j) += (f(i - 1, j) - 2.0 * f(i, j) + f(i + 1, j)) / (h * h);
    }
    out(0, j) += (2.0 * f(0, j) - 5.0 * f(1, j) + 4.0 * f(2, j) - f(3, j)) / (h * h);
    out(N, j) += (2.0 * f(N, j) - 5.0 * f(N - 1, j) + 4.0 * f(N - 2, j) - f(N - 3, j)) / (h * h);
  }
  for (int i = 0; i <= N; ++i) {
    const double cs = std::cosh(chart.s(i));
    const double w = 2.0 / (cs * cs);
    const double scale = 1.0 / (chart.epsilon * chart.epsilon * cs * cs);
    for (int j = 0; j < nt; ++j) {
      out(i, j) = scale * (out(i, j) + w * f(i, j));
    }
  }
  return out;
}

ModeSolution catenoid_mode_solve(int j, double s_span, const std::array<double, 2>& bc) {
  if (j < 1) throw ParamOutOfRange("mode index j must be >= 1");
  const double k2 = 4.0 * j * j;
  auto rhs = [&](double s, const Eigen::Vector2d& y) -> Eigen::Vector2d {
    const double cs = std::cosh(s);
    return {y(1), (k2 - 2.0 / (cs * cs)) * y(0)};
  };

  // Dormand-Prince 5(4)
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                      b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  ModeSolution sol;
  double s = -s_span;
  Eigen::Vector2d y(bc[0], bc[1]);
  double h = 1e-3;
  const double tol = 1e-10;
  sol.s.push_back(s);
  sol.a.push_back(y(0));
  int steps = 0;
  while (s < s_span) {
    if (++steps > 2000000) throw IntegratorDivergence("step limit exceeded");
    if (s + h > s_span) h = s_span - s;
    Eigen::Vector2d k1 = rhs(s, y);
    Eigen::Vector2d k2v = rhs(s + c2 * h, y + h * a21 * k1);
    Eigen::Vector2d k3 = rhs(s + c3 * h, y + h * (a31 * k1 + a32 * k2v));
    Eigen::Vector2d k4 = rhs(s + c4 * h, y + h * (a41 * k1 + a42 * k2v + a43 * k3));
    Eigen::Vector2d k5 = rhs(s + c5 * h, y + h * (a51 * k1 + a52 * k2v + a53 * k3 + a54 * k4));
    Eigen::Vector2d k6 =
        rhs(s + h, y + h * (a61 * k1 + a62 * k2v + a63 * k3 + a64 * k4 + a65 * k5));
    Eigen::Vector2d ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Eigen::Vector2d k7 = rhs(s + h, ynew);
    Eigen::Vector2d err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double scale = tol + tol * std::max(y.cwiseAbs().maxCoeff(), ynew.cwiseAbs().maxCoeff());
    double errnorm = err.cwiseAbs().maxCoeff() / scale;
    if (errnorm <= 1.0) {
      s += h;
      y = ynew;
      sol.s.push_back(s);
      sol.a.push_back(y(0));
      if (!std::isfinite(y(0)) || std::abs(y(0)) > 1e290) {
        throw IntegratorDivergence("solution overflow");
      }
    }
    double fac = 0.9 * std::pow(std::max(errnorm, 1e-10), -0.2);
    h *= std::clamp(fac, 0.2, 5.0);
    h = std::min(h, 0.1);
  }

  // fit d log|a| / ds over ~1.5-long windows at both ends
  auto fit_exponent = [&](bool left) {
    double lo = left ? -s_span : s_span - 1.5;
    double hi = left ? -s_span + 1.5 : s_span;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < sol.s.size(); ++i) {
      if (sol.s[i] < lo || sol.s[i] > hi) continue;
      if (std::abs(sol.a[i]) < 1e-300) continue;
      double x = sol.s[i], yv = std::log(std::abs(sol.a[i]));
      sx += x; sy += yv; sxx += x * x; sxy += x * yv;
      ++cnt;
    }
    if (cnt < 4) return 0.0;
    return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  };
  sol.exponent_left = fit_exponent(true);
  sol.exponent_right = fit_exponent(false);
  return sol;
}

DeficiencyBasis deficiency_basis(const CatenoidChart& chart) {
  if (chart.s_max < 2.0) throw ParamOutOfRange("deficiency basis needs s_max >= 2");
  const int N = chart.n_s;
  const int nt = chart.n_theta;
  DeficiencyBasis b{ChartField(N + 1, nt), ChartField(N + 1, nt), ChartField(N + 1, nt),
                    ChartField(N + 1, nt)};
  for (int i = 0; i <= N; ++i) {
    const double s = chart.s(i);
    const double th = std::tanh(s);
    const double f1 = th;
    const double f2 = s * th - 1.0;
    const double sign = 2.0 * chi_cutoff(s) - 1.0;
    for (int j = 0; j < nt; ++j) {
      b.f0_1(i, j) = f1;
      b.f0_2(i, j) = f2;
      b.ftilde0_1(i, j) = sign * f1;
      b.ftilde0_2(i, j) = sign * f2;
    }
  }
  return b;
}

namespace {

// Real theta-Fourier analysis: cosine and sine coefficient stacks, one column
// per mode m = 0..nt/2.
void theta_analyze(const Eigen::ArrayXXd& f, Eigen::ArrayXXd& fc, Eigen::ArrayXXd& fs) {
  const int rows = static_cast<int>(f.rows());
  const int nt = static_cast<int>(f.cols());
  const int nm = nt / 2 + 1;
  fc.setZero(rows, nm);
  fs.setZero(rows, nm);
  for (int m = 0; m < nm; ++m) {
    const double norm = (m == 0 || m == nt / 2) ? 1.0 / nt : 2.0 / nt;
    for (int j = 0; j < nt; ++j) {
      const double ang = 2.0 * kPi * m * j / nt;
      const double cw = std::cos(ang) * norm, sw = std::sin(ang) * norm;
      for (int i = 0; i < rows; ++i) {
        fc(i, m) += f(i, j) * cw;
        fs(i, m) += f(i, j) * sw;
      }
    }
  }
}

void theta_synthesize(const Eigen::ArrayXXd& fc, const Eigen::ArrayXXd& fs, int nt,
                      Eigen::ArrayXXd& f) {
  const int rows = static_cast<int>(fc.rows());
  const int nm = static_cast<int>(fc.cols());
  f.setZero(rows, nt);
  for (int m = 0; m < nm; ++m) {
    for (int j = 0; j < nt; ++j) {
      const double ang = 2.0 * kPi * m * j / nt;
      const double cw = std::cos(ang), sw = std::sin(ang);
      for (int i = 0; i < rows; ++i) f(i, j) += fc(i, m) * cw + fs(i, m) * sw;
    }
  }
}

}  // namespace

NeckSolveResult neck_solve_with_deficiency(const CatenoidChart& chart, const ChartField& f,
                                           double gamma) {
  const int N = chart.n_s;
  const int nt = chart.n_theta;
  const double h = chart.hs();
  const double eps = chart.epsilon;

  // RHS of the flat problem: (d_ss + d_thth + 2/cosh^2) u = eps^2 cosh^2 s * f
  Eigen::ArrayXXd g(N + 1, nt);
  for (int i = 0; i <= N; ++i) {
    const double cs = std::cosh(chart.s(i));
    for (int j = 0; j < nt; ++j) g(i, j) = eps * eps * cs * cs * f(i, j);
  }
  Eigen::ArrayXXd gc, gs;
  theta_analyze(g, gc, gs);

  const int nm = nt / 2 + 1;
  Eigen::ArrayXXd uc = Eigen::ArrayXXd::Zero(N + 1, nm);
  Eigen::ArrayXXd us = Eigen::ArrayXXd::Zero(N + 1, nm);

  auto potential = [&](int i) {
    const double cs = std::cosh(chart.s(i));
    return 2.0 / (cs * cs);
  };

  double p1 = 0, p2 = 0;

  // m = 0: bordered system with the two deficiency columns.
  {
    DeficiencyBasis basis = deficiency_basis(chart);
    // discrete (d_ss + w) applied to the tilde fields on interior nodes
    Eigen::VectorXd h1(N + 1), h2(N + 1);
    for (int i = 1; i < N; ++i) {
      auto op = [&](const ChartField& q) {
        return (q(i - 1, 0) - 2.0 * q(i, 0) + q(i + 1, 0)) / (h * h) + potential(i) * q(i, 0);
      };
      h1(i) = op(basis.ftilde0_1);
      h2(i) = op(basis.ftilde0_2);
    }

    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    const int nv = N + 1;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv + 2);
    int row = 0;
    for (int i = 1; i < N; ++i, ++row) {
      trips.emplace_back(row, i - 1, 1.0 / (h * h));
      trips.emplace_back(row, i, -2.0 / (h * h) + potential(i));
      trips.emplace_back(row, i + 1, 1.0 / (h * h));
      trips.emplace_back(row, nv, h1(i));
      trips.emplace_back(row, nv + 1, h2(i));
      rhs(row) = gc(i, 0);
    }
    // decay closure: v = 0 and v' - gamma tanh(s) v = 0 at both ends
    trips.emplace_back(row, 0, 1.0);
    rhs(row++) = 0.0;
    trips.emplace_back(row, N, 1.0);
    rhs(row++) = 0.0;
    trips.emplace_back(row, 0, -3.0 / (2.0 * h) - gamma * std::tanh(chart.s(0)));
    trips.emplace_back(row, 1, 4.0 / (2.0 * h));
    trips.emplace_back(row, 2, -1.0 / (2.0 * h));
    rhs(row++) = 0.0;
    trips.emplace_back(row, N, 3.0 / (2.0 * h) - gamma * std::tanh(chart.s(N)));
    trips.emplace_back(row, N - 1, -4.0 / (2.0 * h));
    trips.emplace_back(row, N - 2, 1.0 / (2.0 * h));
    rhs(row++) = 0.0;

    Eigen::SparseMatrix<double> A(nv + 2, nv + 2);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    if (lu.info() != Eigen::Success) {
      throw SolverSingular("zero-mode deficiency system is singular");
    }
    Eigen::VectorXd sol = lu.solve(rhs);
    for (int i = 0; i <= N; ++i) uc(i, 0) = sol(i);
    p1 = sol(nv);
    p2 = sol(nv + 1);
  }

  // even m >= 2: tridiagonal with Robin decay rows
  for (int m = 2; m < nm; m += 2) {
    auto solve_mode = [&](const Eigen::ArrayXXd& rhs_modes, Eigen::ArrayXXd& out_modes) {
      using Trip = Eigen::Triplet<double>;
      std::vector<Trip> trips;
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N + 1);
      for (int i = 1; i < N; ++i) {
        trips.emplace_back(i, i - 1, 1.0 / (h * h));
        trips.emplace_back(i, i, -2.0 / (h * h) - m * m + potential(i));
        trips.emplace_back(i, i + 1, 1.0 / (h * h));
        rhs(i) = rhs_modes(i, m);
      }
      // a' = +m a at the left end, a' = -m a at the right end
      trips.emplace_back(0, 0, -3.0 / (2.0 * h) - m);
      trips.emplace_back(0, 1, 4.0 / (2.0 * h));
      trips.emplace_back(0, 2, -1.0 / (2.0 * h));
      trips.emplace_back(N, N, 3.0 / (2.0 * h) + m);
      trips.emplace_back(N, N - 1, -4.0 / (2.0 * h));
      trips.emplace_back(N, N - 2, 1.0 / (2.0 * h));
      Eigen::SparseMatrix<double> A(N + 1, N + 1);
      A.setFromTriplets(trips.begin(), trips.end());
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
      if (lu.info() != Eigen::Success) throw SolverSingular("mode system singular");
      Eigen::VectorXd sol = lu.solve(rhs);
      for (int i = 0; i <= N; ++i) out_modes(i, m) = sol(i);
    };
    solve_mode(gc, uc);
    if (m < nt / 2) solve_mode(gs, us);
  }

  NeckSolveResult res;
  res.p1 = p1;
  res.p2 = p2;
  res.v = ChartField(N + 1, nt);
  theta_synthesize(uc, us, nt, res.v.v);

  // residual of u = v + p1 ftilde1 + p2 ftilde2 against f, interior rows
  DeficiencyBasis basis = deficiency_basis(chart);
  ChartField u(N + 1, nt);
  u.v = res.v.v + p1 * basis.ftilde0_1.v + p2 * basis.ftilde0_2.v;
  ChartField lu_field = catenoid_jacobi_apply(chart, u);
  double num = 0, den = 1e-300;
  for (int i = 1; i < N; ++i) {
    for (int j = 0; j < nt; ++j) {
      num = std::max(num, std::abs(lu_field(i, j) - f(i, j)));
      den = std::max(den, std::abs(f(i, j)));
    }
  }
  res.residual_rel = num / den;
  return res;
}

}  // namespace cmc
