#include "cmclab/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "cmclab/catenoid.hpp"
#include "cmclab/errors.hpp"
#include "cmclab/lattice.hpp"

namespace cmc {

Eigen::VectorXd DiscreteJacobi::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out = K * u;
  return out.cwiseQuotient(M);
}

DiscreteJacobi assemble_jacobi(const SurfaceMesh& mesh) {
  const int nv = mesh.num_vertices();
  if (nv == 0) throw BadMesh("empty mesh");
  DiscreteJacobi op;
  op.mesh = &mesh;
  op.M = Eigen::VectorXd::Zero(nv);
  op.potential.resize(nv);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.tris.size() * 12);
  for (const auto& tr : mesh.tris) {
    const Eigen::Vector4d& x0 = mesh.verts[tr[0]].pos;
    const Eigen::Vector4d& x1 = mesh.verts[tr[1]].pos;
    const Eigen::Vector4d& x2 = mesh.verts[tr[2]].pos;
    const double l0 = (x1 - x2).norm();  // opposite vertex 0
    const double l1 = (x2 - x0).norm();
    const double l2 = (x0 - x1).norm();
    const double sp = 0.5 * (l0 + l1 + l2);
    const double area2 = std::max(sp * (sp - l0) * (sp - l1) * (sp - l2), 1e-300);
    const double area = std::sqrt(area2);
    const double cot0 = (l1 * l1 + l2 * l2 - l0 * l0) / (4.0 * area);
    const double cot1 = (l0 * l0 + l2 * l2 - l1 * l1) / (4.0 * area);
    const double cot2 = (l0 * l0 + l1 * l1 - l2 * l2) / (4.0 * area);

    auto add = [&](int a, int b, double w) {
      trips.emplace_back(a, b, w);
      trips.emplace_back(b, a, w);
      trips.emplace_back(a, a, -w);
      trips.emplace_back(b, b, -w);
    };
    add(tr[1], tr[2], 0.5 * cot0);
    add(tr[2], tr[0], 0.5 * cot1);
    add(tr[0], tr[1], 0.5 * cot2);
    for (int c = 0; c < 3; ++c) op.M(tr[c]) += area / 3.0;
  }

  for (int v = 0; v < nv; ++v) {
    const PointGeometry geo = vertex_geometry(mesh, v);
    op.potential(v) = geo.norm_B_sq + 2.0;
  }
  // K = W + M * diag(potential)
  for (int v = 0; v < nv; ++v) trips.emplace_back(v, v, op.M(v) * op.potential(v));
  op.K.resize(nv, nv);
  op.K.setFromTriplets(trips.begin(), trips.end());
  return op;
}

double weighted_norm(const Eigen::VectorXd& field, const SurfaceMesh& mesh,
                     const Eigen::VectorXd& zeta, double gamma, int k,
                     const DiscreteJacobi* op) {
  const int nv = mesh.num_vertices();
  const double alpha = 0.5;
  double norm = 0;
  for (int v = 0; v < nv; ++v) {
    norm = std::max(norm, std::pow(zeta(v), -gamma) * std::abs(field(v)));
  }
  if (k == 0) {
    // Holder surrogate on values
    for (const auto& tr : mesh.tris) {
      for (int e = 0; e < 3; ++e) {
        const int a = tr[e], b = tr[(e + 1) % 3];
        const double d = (mesh.verts[a].pos - mesh.verts[b].pos).norm();
        if (d < 1e-300) continue;
        const double zm = std::sqrt(zeta(a) * zeta(b));
        norm = std::max(norm, std::pow(zm, -gamma + alpha) *
                                  std::abs(field(a) - field(b)) / std::pow(d, alpha));
      }
    }
    return norm;
  }

  // first derivative: edge-difference gradient magnitude per vertex
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(nv);
  for (const auto& tr : mesh.tris) {
    for (int e = 0; e < 3; ++e) {
      const int a = tr[e], b = tr[(e + 1) % 3];
      const double d = (mesh.verts[a].pos - mesh.verts[b].pos).norm();
      if (d < 1e-300) continue;
      const double slope = std::abs(field(a) - field(b)) / d;
      grad(a) = std::max(grad(a), slope);
      grad(b) = std::max(grad(b), slope);
    }
  }
  for (int v = 0; v < nv; ++v) {
    norm = std::max(norm, std::pow(zeta(v), -gamma + 1) * grad(v));
  }
  if (k == 1) {
    for (const auto& tr : mesh.tris) {
      for (int e = 0; e < 3; ++e) {
        const int a = tr[e], b = tr[(e + 1) % 3];
        const double d = (mesh.verts[a].pos - mesh.verts[b].pos).norm();
        if (d < 1e-300) continue;
        const double zm = std::sqrt(zeta(a) * zeta(b));
        norm = std::max(norm, std::pow(zm, -gamma + 1 + alpha) *
                                  std::abs(grad(a) - grad(b)) / std::pow(d, alpha));
      }
    }
    return norm;
  }

  // second derivative: discrete Laplace-Beltrami (cotangent, no potential)
  DiscreteJacobi local;
  if (!op) {
    local = assemble_jacobi(mesh);
    op = &local;
  }
  Eigen::VectorXd lap_field =
      (op->K * field).cwiseQuotient(op->M) - op->potential.cwiseProduct(field);
  for (int v = 0; v < nv; ++v) {
    norm = std::max(norm, std::pow(zeta(v), -gamma + 2) * std::abs(lap_field(v)));
  }
  for (const auto& tr : mesh.tris) {
    for (int e = 0; e < 3; ++e) {
      const int a = tr[e], b = tr[(e + 1) % 3];
      const double d = (mesh.verts[a].pos - mesh.verts[b].pos).norm();
      if (d < 1e-300) continue;
      const double zm = std::sqrt(zeta(a) * zeta(b));
      norm = std::max(norm, std::pow(zm, -gamma + 2 + alpha) *
                                std::abs(lap_field(a) - lap_field(b)) / std::pow(d, alpha));
    }
  }
  return norm;
}

std::vector<EigenPair> symmetric_spectrum(const DiscreteJacobi& op, int count,
                                          bool restrict_symmetric) {
  const SurfaceMesh& mesh = *op.mesh;
  const int nv = mesh.num_vertices();

  int dim;
  std::vector<int> of(nv);
  if (restrict_symmetric) {
    dim = static_cast<int>(mesh.orbits.size());
    for (int v = 0; v < nv; ++v) of[v] = mesh.orbit_of[v];
  } else {
    dim = nv;
    for (int v = 0; v < nv; ++v) of[v] = v;
  }
  if (dim > 9000) throw EigensolverNoConvergence("reduced dimension too large for a dense solve");

  Eigen::MatrixXd Kr = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd Mr = Eigen::VectorXd::Zero(dim);
  for (int outer = 0; outer < op.K.outerSize(); ++outer) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.K, outer); it; ++it) {
      Kr(of[it.row()], of[it.col()]) += it.value();
    }
  }
  for (int v = 0; v < nv; ++v) Mr(of[v]) += op.M(v);

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(Kr, Mr.asDiagonal().toDenseMatrix());
  if (eig.info() != Eigen::Success) throw EigensolverNoConvergence("dense eigensolver failed");

  std::vector<int> order(dim);
  for (int i = 0; i < dim; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(eig.eigenvalues()(a)) < std::abs(eig.eigenvalues()(b));
  });

  std::vector<EigenPair> out;
  for (int i = 0; i < std::min(count, dim); ++i) {
    EigenPair p;
    p.lambda = eig.eigenvalues()(order[i]);
    p.vec.resize(nv);
    for (int v = 0; v < nv; ++v) p.vec(v) = eig.eigenvectors()(of[v], order[i]);
    out.push_back(std::move(p));
  }
  return out;
}


namespace {

// one-dimensional derivative weights over offsets in a chart direction:
// centered 3-point when both sides exist, otherwise one-sided second order
struct Stencil1D {
  std::vector<int> offsets;  // neighbor offsets in index units
  std::vector<double> d1;    // first-derivative weights
  std::vector<double> d2;    // second-derivative weights
};

Stencil1D make_1d(bool has_minus, bool has_plus, double h) {
  Stencil1D s;
  if (has_minus && has_plus) {
    s.offsets = {-1, 0, 1};
    s.d1 = {-0.5 / h, 0.0, 0.5 / h};
    s.d2 = {1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)};
  } else if (has_plus) {
    s.offsets = {0, 1, 2, 3};
    s.d1 = {-1.5 / h, 2.0 / h, -0.5 / h, 0.0};
    s.d2 = {2.0 / (h * h), -5.0 / (h * h), 4.0 / (h * h), -1.0 / (h * h)};
  } else if (has_minus) {
    s.offsets = {0, -1, -2, -3};
    s.d1 = {1.5 / h, -2.0 / h, 0.5 / h, 0.0};
    s.d2 = {2.0 / (h * h), -5.0 / (h * h), 4.0 / (h * h), -1.0 / (h * h)};
  } else {
    throw BadMesh("isolated vertex in a chart direction");
  }
  return s;
}

}  // namespace

ChartStencil vertex_stencil(const SurfaceMesh& mesh, int v) {
  const MeshVertex& vx = mesh.verts[v];
  ChartStencil out;

  // neighbor lookup along the two chart directions
  std::function<int(int, int)> id_at;
  double h1, h2;
  if (vx.tower >= 0) {
    const int nth = mesh.res.n_theta;
    // direction 1: s (decreasing with row index), direction 2: theta
    id_at = [&mesh, &vx, nth](int o1, int o2) {
      const int k = vx.i - o1;  // +s is -row
      if (k < 0 || k >= mesh.n_rows) return -1;
      const int j = ((vx.j + o2) % nth + nth) % nth;
      return mesh.tower_id[vx.tower][k * nth + j];
    };
    h1 = mesh.ds;
    h2 = 2.0 * kPi / nth;
  } else {
    const int s01 = vx.sheet > 0 ? 0 : 1;
    id_at = [&mesh, &vx, s01](int o1, int o2) {
      return mesh.cart_index(s01, vx.i + o1, vx.j + o2);
    };
    h1 = h2 = 2.0 * kPi / mesh.n;
  }

  auto have = [&](int o1, int o2) { return id_at(o1, o2) >= 0; };
  auto have_run = [&](int dir, int sign) {
    for (int k = 1; k <= 3; ++k) {
      if (!have(dir == 0 ? sign * k : 0, dir == 1 ? sign * k : 0)) return false;
    }
    return true;
  };

  const bool m1 = have(-1, 0) && have_run(0, -1);
  const bool p1 = have(1, 0) && have_run(0, 1);
  const bool m2 = have(0, -1) && have_run(1, -1);
  const bool p2 = have(0, 1) && have_run(1, 1);
  Stencil1D s1 = make_1d(m1, p1, h1);
  Stencil1D s2 = make_1d(m2, p2, h2);

  // accumulate weights over the product neighborhood
  std::map<int, Eigen::Matrix<double, 5, 1>> acc;
  auto add = [&](int o1, int o2, int slot, double w) {
    if (w == 0.0) return;
    const int id = id_at(o1, o2);
    if (id < 0) throw BadMesh("stencil neighbor missing");
    acc[id](slot) += w;
  };
  for (std::size_t a = 0; a < s1.offsets.size(); ++a) {
    add(s1.offsets[a], 0, 0, s1.d1[a]);
    add(s1.offsets[a], 0, 2, s1.d2[a]);
  }
  for (std::size_t b = 0; b < s2.offsets.size(); ++b) {
    add(0, s2.offsets[b], 1, s2.d1[b]);
    add(0, s2.offsets[b], 4, s2.d2[b]);
  }
  for (std::size_t a = 0; a < s1.offsets.size(); ++a) {
    for (std::size_t b = 0; b < s2.offsets.size(); ++b) {
      add(s1.offsets[a], s2.offsets[b], 3, s1.d1[a] * s2.d1[b]);
    }
  }

  out.ids.reserve(acc.size() + 1);
  out.w.resize(5, static_cast<int>(acc.size()) + 1);
  // self first
  out.ids.push_back(v);
  out.w.col(0) = acc.count(v) ? acc[v] : Eigen::Matrix<double, 5, 1>::Zero();
  int col = 1;
  for (const auto& [id, wts] : acc) {
    if (id == v) continue;
    out.ids.push_back(id);
    out.w.col(col++) = wts;
  }
  out.w.conservativeResize(5, col);
  return out;
}

ChartOperatorData chart_operator_data(const SurfaceMesh& mesh, int v) {
  const ChartJet2 jet = vertex_chart_jet(mesh, v);
  const PointGeometry geo =
      immersion_geometry(jet, vertex_reference_direction(mesh, v));
  ChartOperatorData out;
  out.ginv = geo.metric.inverse();
  out.pot = geo.norm_B_sq + 2.0;

  // d_a gbar_bc from the 2-jet: metric diag g(t) with only t-dependence
  const double t = jet.X(2);
  const double sq2 = std::sqrt(2.0);
  const double gdiag[3] = {(1.0 + std::sin(sq2 * t)) / 2.0, (1.0 - std::sin(sq2 * t)) / 2.0, 0.5};
  const double gdt[3] = {sq2 * std::cos(sq2 * t) / 2.0, -sq2 * std::cos(sq2 * t) / 2.0, 0.0};

  std::array<Eigen::Matrix2d, 2> dg;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        double acc = 0;
        for (int comp = 0; comp < 3; ++comp) {
          acc += gdt[comp] * jet.D(2, a) * jet.D(comp, b) * jet.D(comp, c);
          acc += gdiag[comp] *
                 (jet.DD[comp](a, b) * jet.D(comp, c) + jet.D(comp, b) * jet.DD[comp](a, c));
        }
        dg[a](b, c) = acc;
      }
    }
  }

  // drift^b = sum_a [ -(ginv dg_a ginv)_{ab} + ginv_{ab} tr(ginv dg_a)/2 ]
  for (int b = 0; b < 2; ++b) {
    double acc = 0;
    for (int a = 0; a < 2; ++a) {
      const Eigen::Matrix2d m = out.ginv * dg[a] * out.ginv;
      acc += -m(a, b) + out.ginv(a, b) * 0.5 * (out.ginv * dg[a]).trace();
    }
    out.drift(b) = acc;
  }
  return out;
}

DiscreteJacobi assemble_jacobi_fd(const SurfaceMesh& mesh) {
  const int nv = mesh.num_vertices();
  DiscreteJacobi op;
  op.mesh = &mesh;
  op.M = Eigen::VectorXd::Zero(nv);
  op.potential.resize(nv);

  // vertex areas reused from the triangle fan (only for norms / interface)
  for (const auto& tr : mesh.tris) {
    const Eigen::Vector4d& x0 = mesh.verts[tr[0]].pos;
    const Eigen::Vector4d& x1 = mesh.verts[tr[1]].pos;
    const Eigen::Vector4d& x2 = mesh.verts[tr[2]].pos;
    const double l0 = (x1 - x2).norm(), l1 = (x2 - x0).norm(), l2 = (x0 - x1).norm();
    const double sp = 0.5 * (l0 + l1 + l2);
    const double area = std::sqrt(std::max(sp * (sp - l0) * (sp - l1) * (sp - l2), 1e-300));
    for (int c = 0; c < 3; ++c) op.M(tr[c]) += area / 3.0;
  }

  std::vector<Eigen::Triplet<double>> trips;
  for (int v = 0; v < nv; ++v) {
    const ChartOperatorData data = chart_operator_data(mesh, v);
    op.potential(v) = data.pot;
    const ChartStencil st = vertex_stencil(mesh, v);
    const double mass = op.M(v);
    for (std::size_t c = 0; c < st.ids.size(); ++c) {
      double w = data.ginv(0, 0) * st.w(2, c) + 2.0 * data.ginv(0, 1) * st.w(3, c) +
                 data.ginv(1, 1) * st.w(4, c) + data.drift(0) * st.w(0, c) +
                 data.drift(1) * st.w(1, c);
      if (st.ids[c] == v) w += data.pot;
      trips.emplace_back(v, st.ids[c], mass * w);
    }
  }
  op.K.resize(nv, nv);
  op.K.setFromTriplets(trips.begin(), trips.end());
  return op;
}

namespace {

MatchingCoefficients solve_4x4(const Eigen::Matrix4d& A, const Eigen::Vector4d& b) {
  if (std::abs(A.determinant()) < 1e-14) {
    throw SingularSystem("matching system determinant below 1e-14");
  }
  const Eigen::Vector4d x = A.fullPivLu().solve(b);
  MatchingCoefficients mc;
  mc.q1 = x(0);
  mc.q2 = x(1);
  mc.rplus = x(2);
  mc.rminus = x(3);
  mc.residual = (A * x - b).cwiseAbs().maxCoeff();
  return mc;
}

}  // namespace

MatchingCoefficients solve_matching_step1(double p1, double p2, const NeckScale& ns) {
  if (!(ns.epsilon < 0.1)) throw ParamOutOfRange("matching requires eps < 1/10");
  const double gL = ns.gamma_lambda - std::log(ns.epsilon / 2.0);
  Eigen::Matrix4d A;
  // unknowns (q1, q2, r+, r-)
  A << -1, 1, gL, 0,
       1, 1, 0, gL,
       0, 1, 1, 0,
       0, 1, 0, 1;
  Eigen::Vector4d b(p1 - p2, p1 + p2, -p2, p2);
  MatchingCoefficients mc = solve_4x4(A, b);
  mc.p1 = p1;
  mc.p2 = p2;
  const double logeps = std::log(1.0 / ns.epsilon);
  const double lhs = std::abs(mc.q1) / logeps + std::abs(mc.q2) * logeps +
                     std::max(std::abs(mc.rplus), std::abs(mc.rminus));
  mc.bound_const = lhs / std::max(std::abs(p1) + std::abs(p2), 1e-300);
  return mc;
}

MatchingCoefficients solve_matching_step2(double uext_plus0, double uext_minus0,
                                          const NeckScale& ns) {
  if (!(ns.epsilon < 0.1)) throw ParamOutOfRange("matching requires eps < 1/10");
  const double gL = ns.gamma_lambda - std::log(ns.epsilon / 2.0);
  Eigen::Matrix4d A;
  // unknowns (qh1, qh2, rh+, rh-)
  A << -1, 1, gL, 0,
       1, 1, 0, gL,
       0, 1, 1, 0,
       0, 1, 0, 1;
  Eigen::Vector4d b(-uext_plus0, -uext_minus0, 0, 0);
  MatchingCoefficients mc4 = solve_4x4(A, b);
  MatchingCoefficients mc;
  mc.uext_plus0 = uext_plus0;
  mc.uext_minus0 = uext_minus0;
  mc.qhat1 = mc4.q1;
  mc.qhat2 = mc4.q2;
  mc.rhatplus = mc4.rplus;
  mc.rhatminus = mc4.rminus;
  mc.residual = mc4.residual;
  const double logeps = std::log(1.0 / ns.epsilon);
  const double lhs =
      logeps * (std::abs(mc.qhat2) + std::max(std::abs(mc.rhatplus), std::abs(mc.rhatminus))) +
      std::abs(mc.qhat1);
  mc.bound_const = lhs / std::max(std::abs(uext_plus0) + std::abs(uext_minus0), 1e-300);
  return mc;
}

namespace {

// Catmull-Rom in one variable from four consecutive samples
inline double catmull(double fm1, double f0, double f1, double f2, double t) {
  return 0.5 * (2.0 * f0 + (-fm1 + f1) * t + (2.0 * fm1 - 5.0 * f0 + 4.0 * f1 - f2) * t * t +
                (-fm1 + 3.0 * f0 - 3.0 * f1 + f2) * t * t * t);
}

// field sampler on a tower (rows x n_theta), clamped rows, periodic theta
class TowerSampler {
 public:
  TowerSampler(const SurfaceMesh& mesh, const Eigen::VectorXd& field, int tower)
      : mesh_(mesh), field_(field), tower_(tower) {}

  double at_row_col(int k, int j) const {
    const int nth = mesh_.res.n_theta;
    k = std::clamp(k, 0, mesh_.n_rows - 1);
    j = ((j % nth) + nth) % nth;
    return field_(mesh_.tower_id[tower_][k * nth + j]);
  }

  // s decreasing with row index: row(s) maps s in [-S, S] to [n_rows-1, 0]
  double sample(double s, double theta) const {
    const int nth = mesh_.res.n_theta;
    const double krow = (mesh_.row_s[0] - s) / mesh_.ds;  // fractional row
    const double jcol = theta / (2.0 * kPi / nth);
    const int k0 = static_cast<int>(std::floor(krow));
    const int j0 = static_cast<int>(std::floor(jcol));
    const double tk = krow - k0;
    const double tj = jcol - j0;
    double col[4];
    for (int dk = -1; dk <= 2; ++dk) {
      col[dk + 1] = catmull(at_row_col(k0 + dk, j0 - 1), at_row_col(k0 + dk, j0),
                            at_row_col(k0 + dk, j0 + 1), at_row_col(k0 + dk, j0 + 2), tj);
    }
    return catmull(col[0], col[1], col[2], col[3], tk);
  }

 private:
  const SurfaceMesh& mesh_;
  const Eigen::VectorXd& field_;
  int tower_;
};

// periodic bicubic sampler on a flat n x n grid over [0,2pi)^2
double grid_sample(const TorusField& f, const Eigen::Vector2d& mu) {
  const int n = f.n;
  const double h = 2.0 * kPi / n;
  const double x = mu.x() / h, y = mu.y() / h;
  const int i0 = static_cast<int>(std::floor(x));
  const int j0 = static_cast<int>(std::floor(y));
  const double tx = x - i0, ty = y - j0;
  auto at = [&](int i, int j) { return f(((i % n) + n) % n, ((j % n) + n) % n); };
  double col[4];
  for (int di = -1; di <= 2; ++di) {
    col[di + 1] = catmull(at(i0 + di, j0 - 1), at(i0 + di, j0), at(i0 + di, j0 + 1),
                          at(i0 + di, j0 + 2), ty);
  }
  return catmull(col[0], col[1], col[2], col[3], tx);
}

// radial cutoff rising from 0 at x=1 to 1 at x=2 (linear radius scale)
inline double step_between(double r, double r_lo, double r_hi) {
  return smoothstep5((r - r_lo) / (r_hi - r_lo));
}

}  // namespace

RightInverseResult patching_right_inverse(const DiscreteJacobi& op, const Eigen::VectorXd& f,
                                          double gamma, double kappa1) {
  const SurfaceMesh& mesh = *op.mesh;
  const NeckScale& ns = mesh.ns;
  const double eps = ns.epsilon;
  const double se = std::sqrt(eps);
  const double kappa0 = mesh.kappa0;
  if (kappa1 <= 0) kappa1 = std::min(0.1, kappa0 / 4.0);
  const int nth = mesh.res.n_theta;
  const int nv = mesh.num_vertices();

  // ---- step 1: catenoid-chart solve of the neck-supported part ----
  // fine chart: refine the tower rows 2x in s and theta, margin rows appended
  const int refine = 2;
  const double dsf = mesh.ds / refine;
  const int margin = static_cast<int>(std::ceil(1.0 / dsf));
  const double S = mesh.row_s[0];
  CatenoidChart chart;
  chart.epsilon = eps;
  chart.s_max = S + margin * dsf;
  chart.n_s = refine * (mesh.n_rows - 1) + 2 * margin;
  chart.n_theta = refine * nth;

  TowerSampler fsamp(mesh, f, 0);
  ChartField fc(chart.n_s + 1, chart.n_theta);
  for (int i = 0; i <= chart.n_s; ++i) {
    const double s = chart.s(i);
    if (std::abs(s) > S) continue;  // margin rows carry no data
    const double r = eps * std::cosh(s);
    const double cut = 1.0 - step_between(r, kappa0, 2.0 * kappa0);
    if (cut == 0.0) continue;
    for (int j = 0; j < chart.n_theta; ++j) {
      fc(i, j) = cut * fsamp.sample(s, chart.theta(j));
    }
  }
  NeckSolveResult neck = neck_solve_with_deficiency(chart, fc, gamma);
  MatchingCoefficients mc1 = solve_matching_step1(neck.p1, neck.p2, ns);

  // compose the extended neck solution on the mesh
  auto eta_ext = [&](double r) { return step_between(r, se, 2.0 * se); };
  Eigen::VectorXd u_neck = Eigen::VectorXd::Zero(nv);
  for (int v = 0; v < nv; ++v) {
    const MeshVertex& vx = mesh.verts[v];
    const double r = vx.zeta;
    double val = 0;
    const double ep = (vx.sheet > 0) ? eta_ext(r) : 0.0;
    const double em = (vx.sheet < 0) ? eta_ext(r) : 0.0;
    const double en = 1.0 - ep - em;
    if (vx.tower >= 0) {
      const double cut = 1.0 - step_between(r, kappa0, 2.0 * kappa0);
      if (cut > 0) {
        // v on the fine chart at this vertex's (s, theta): exact grid point
        const double krow = (chart.s_max - vx.s) / dsf;
        const int k = static_cast<int>(std::lround(krow));
        const int j = vx.j * refine;
        val += cut * neck.v((chart.n_s) - k, j);
      }
      if (en > 0) {
        const double th = std::tanh(vx.s);
        const double sgn = 2.0 * chi_cutoff(vx.s) - 1.0;
        const double f01 = th, f02 = vx.s * th - 1.0;
        val += en * (neck.p1 * sgn * f01 + neck.p2 * sgn * f02 + mc1.q1 * f01 + mc1.q2 * f02);
      }
    }
    if (ep > 0) val += ep * mc1.rplus * vx.gval;
    if (em > 0) val += em * mc1.rminus * vx.gval;
    u_neck(v) = val;
  }

  // ---- step 2: flat-torus spectral solve of the remainder ----
  const Eigen::VectorXd rem = f - op.apply(u_neck);
  auto chi_ext = [&](double r) { return step_between(r, kappa1, 2.0 * kappa1); };

  const int n = mesh.n;
  TorusField fhat[2] = {TorusField(n), TorusField(n)};
  // per-sheet tower samplers of the remainder
  for (int sheet01 = 0; sheet01 < 2; ++sheet01) {
    const int sgn = sheet01 == 0 ? +1 : -1;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int id = mesh.cart_id[sheet01][i * n + j];
        const Eigen::Vector2d mu(2.0 * kPi * i / n, 2.0 * kPi * j / n);
        double val = 0;
        if (id >= 0) {
          val = rem(id);
        } else {
          // inside a tower hole: sample the sheet's rows of the nearest tower
          const Eigen::Vector2d p = mesh.lattice.nearest_point(mu);
          const int t = [&] {
            const auto& pts = mesh.lattice.cell_points();
            const double twopi = 2.0 * kPi;
            Eigen::Vector2d pw(std::fmod(p.x() + twopi, twopi), std::fmod(p.y() + twopi, twopi));
            if (twopi - pw.x() < 1e-9) pw.x() = 0;
            if (twopi - pw.y() < 1e-9) pw.y() = 0;
            for (std::size_t q = 0; q < pts.size(); ++q) {
              if ((pts[q] - pw).norm() < 1e-9) return static_cast<int>(q);
            }
            throw StitchMismatch("hole center is not a cell point");
          }();
          const Eigen::Vector2d d = mu - p;
          const double r = d.norm();
          if (r > eps) {
            const double spolar = sgn * std::acosh(std::min(r / eps, 2.0 * kappa0 / eps + 10.0));
            const double theta = std::atan2(d.y(), d.x());
            TowerSampler rsamp(mesh, rem, t);
            val = rsamp.sample(spolar, theta < 0 ? theta + 2 * kPi : theta);
          }
        }
        const double r = (mu - mesh.lattice.nearest_point(mu)).norm();
        fhat[sheet01](i, j) = chi_ext(r) * val;
      }
    }
  }

  // symmetrized spectral solves
  TorusField uext[2];
  for (int sheet01 = 0; sheet01 < 2; ++sheet01) {
    TorusField sym = symmetrize(fhat[sheet01], mesh.lattice);
    uext[sheet01] = torus_jacobi_solve(sym);
  }
  const double up0 = uext[0](0, 0);
  const double um0 = uext[1](0, 0);
  MatchingCoefficients mc2 = solve_matching_step2(up0, um0, ns);

  Eigen::VectorXd u_ext = Eigen::VectorXd::Zero(nv);
  for (int v = 0; v < nv; ++v) {
    const MeshVertex& vx = mesh.verts[v];
    const double r = vx.zeta;
    const double ep = (vx.sheet > 0) ? eta_ext(r) : 0.0;
    const double em = (vx.sheet < 0) ? eta_ext(r) : 0.0;
    const double en = 1.0 - ep - em;
    double val = 0;
    if (ep > 0) {
      const double ue = (vx.tower < 0) ? uext[0](vx.i, vx.j) : grid_sample(uext[0], vx.mu);
      val += ep * (ue + mc2.rhatplus * vx.gval);
    }
    if (em > 0) {
      const double ue = (vx.tower < 0) ? uext[1](vx.i, vx.j) : grid_sample(uext[1], vx.mu);
      val += em * (ue + mc2.rhatminus * vx.gval);
    }
    if (en > 0 && vx.tower >= 0) {
      const double th = std::tanh(vx.s);
      val += en * (mc2.qhat1 * th + mc2.qhat2 * (vx.s * th - 1.0));
    }
    u_ext(v) = val;
  }

  RightInverseResult out;
  out.u = mesh.symmetrize(u_neck + u_ext);
  out.step1 = mc1;
  out.step2 = mc2;
  const Eigen::VectorXd zeta = weight_function(mesh);
  const double num = weighted_norm(f - op.apply(out.u), mesh, zeta, gamma - 2.0, 0);
  const double den = weighted_norm(f, mesh, zeta, gamma - 2.0, 0);
  out.rho = num / std::max(den, 1e-300);
  return out;
}

Eigen::VectorXd random_symmetric_field(const SurfaceMesh& mesh, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1, 1);

  // low dual frequencies of the lattice: G-invariant cosine combinations
  FrequencySet fs = dual_frequencies(mesh.lattice, 4.0);
  std::vector<Eigen::Vector2i> half;
  for (const auto& k : fs.freqs) {
    if (k.x() > 0 || (k.x() == 0 && k.y() >= 0)) half.push_back(k);
  }
  std::vector<double> c_even(half.size()), c_odd(half.size());
  for (auto& c : c_even) c = unif(rng);
  for (auto& c : c_odd) c = unif(rng);
  const double c_neck = unif(rng);

  const int nv = mesh.num_vertices();
  Eigen::VectorXd f(nv);
  const double se = std::sqrt(mesh.ns.epsilon);
  for (int v = 0; v < nv; ++v) {
    const MeshVertex& vx = mesh.verts[v];
    double even = 0, odd = 0;
    for (std::size_t m = 0; m < half.size(); ++m) {
      const double phase = half[m].x() * vx.mu.x() + half[m].y() * vx.mu.y();
      even += c_even[m] * std::cos(phase);
      odd += c_odd[m] * std::cos(phase);
    }
    // sheet-odd part vanishes through the necks to stay smooth
    const double psi = step_between(vx.zeta, 2.0 * se, 4.0 * se);
    double val = even + vx.sheet * psi * odd;
    if (vx.tower >= 0) {
      const double cs = std::cosh(vx.s);
      val += c_neck * std::cos(2.0 * vx.theta) / (cs * cs);
    }
    f(v) = val;
  }
  return mesh.symmetrize(f);
}

ProbeResult linear_estimate_probe(const DiscreteJacobi& op, double gamma, int trials,
                                  std::uint64_t seed) {
  const SurfaceMesh& mesh = *op.mesh;
  const Eigen::VectorXd zeta = weight_function(mesh);
  const double eg = std::pow(mesh.ns.epsilon, gamma);
  ProbeResult out;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd u = random_symmetric_field(mesh, seed + 17 * t);
    const double nu = weighted_norm(u, mesh, zeta, gamma, 2, &op);
    const double nl = weighted_norm(op.apply(u), mesh, zeta, gamma - 2.0, 0);
    const double ratio = nu / std::max(eg * nl, 1e-300);
    out.max_ratio = std::max(out.max_ratio, ratio);
    out.mean_ratio += ratio / trials;
  }
  return out;
}

}  // namespace cmc
