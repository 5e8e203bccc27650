#include "cmclab/green.hpp"

#include <cmath>
#include <complex>

#include "cmclab/errors.hpp"

namespace cmc {

namespace {

// Local expansion P(r) = -log r + r^2 log r / 2 - r^2/2 - r^4 log r/16 + 3 r^4/32;
// L P = -(1/4) r^4 log r + (3/8) r^4 near 0.
constexpr double kA1 = 0.5, kA2 = -0.5, kA3 = -1.0 / 16.0, kA4 = 3.0 / 32.0;

double P_val(double r) {
  const double lr = std::log(r), r2 = r * r, r4 = r2 * r2;
  return -lr + kA1 * r2 * lr + kA2 * r2 + kA3 * r4 * lr + kA4 * r4;
}
double P_d1(double r) {
  const double lr = std::log(r), r2 = r * r, r3 = r2 * r;
  return -1.0 / r + kA1 * (2 * r * lr + r) + 2 * kA2 * r + kA3 * (4 * r3 * lr + r3) +
         4 * kA4 * r3;
}
double P_d2(double r) {
  const double lr = std::log(r), r2 = r * r;
  return 1.0 / r2 + kA1 * (2 * lr + 3) + 2 * kA2 + kA3 * (12 * r2 * lr + 7 * r2) + 12 * kA4 * r2;
}
// L P away from the delta
double LP_val(double r) {
  const double r2 = r * r, r4 = r2 * r2;
  return 4 * kA3 * r4 * std::log(r) + 4 * kA4 * r4;
}

// Envelope exp(-(r/sigma)^6): smooth in (x,y) since r^6 is a polynomial, so
// the Fourier correction decays super-algebraically.
void envelope_jet(double r, double sigma, double& psi, double& dpsi, double& ddpsi) {
  const double q = r / sigma;
  const double u = q * q * q * q * q * q;
  psi = std::exp(-u);
  const double s6 = std::pow(sigma, 6);
  const double r4 = r * r * r * r;
  dpsi = -6.0 * r4 * r / s6 * psi;
  ddpsi = (-30.0 * r4 / s6 + 36.0 * r4 * r4 * r * r / (s6 * s6)) * psi;
}

}  // namespace

double GreenFunction::local_value(double r) const {
  if (r >= r1_) return 0.0;
  double psi, dpsi, ddpsi;
  envelope_jet(r, r0_, psi, dpsi, ddpsi);
  return psi * P_val(r);
}

void GreenFunction::local_jet(double r, double& F, double& dF, double& ddF) const {
  if (r >= r1_) {
    F = dF = ddF = 0;
    return;
  }
  double psi, dpsi, ddpsi;
  envelope_jet(r, r0_, psi, dpsi, ddpsi);
  const double P = P_val(r), dP = P_d1(r), ddP = P_d2(r);
  F = psi * P;
  dF = dpsi * P + psi * dP;
  ddF = ddpsi * P + 2 * dpsi * dP + psi * ddP;
}

GreenFunction build_green(const LatticeSpec& spec, double truncation) {
  if (!spec.admissible) {
    throw InadmissibleLattice("frequencies (1,+-1) obstruct the periodic solve");
  }
  if (truncation < 40) throw TruncationTooSmall("truncation radius must be >= 40");

  GreenFunction g;
  g.lattice_ = spec;
  g.truncation_ = truncation;
  const double dmin = spec.min_spacing();
  g.r0_ = 0.30 * dmin;        // envelope width sigma
  g.r1_ = 2.2 * g.r0_;        // support radius; exp(-2.2^6) is below 1e-45

  // Sample R = L(sum of local parts) away from the singular points on a fine
  // grid and read off its Fourier coefficients.
  const int N = 1024;
  TorusField R(N);
  const double h = 2.0 * kPi / N;
  auto cell_pts = spec.cell_points();
  for (const auto& p : cell_pts) {
    const int i0 = static_cast<int>(std::floor((p.x() - g.r1_) / h)) - 1;
    const int i1 = static_cast<int>(std::ceil((p.x() + g.r1_) / h)) + 1;
    const int j0 = static_cast<int>(std::floor((p.y() - g.r1_) / h)) - 1;
    const int j1 = static_cast<int>(std::ceil((p.y() + g.r1_) / h)) + 1;
    for (int i = i0; i <= i1; ++i) {
      for (int j = j0; j <= j1; ++j) {
        const double x = i * h - p.x();
        const double y = j * h - p.y();
        const double r = std::sqrt(x * x + y * y);
        if (r >= g.r1_) continue;
        double val;
        if (r < 1e-9) {
          val = 0.0;  // all terms vanish like r^4 log r at the center
        } else {
          double psi, dpsi, ddpsi;
          envelope_jet(r, g.r0_, psi, dpsi, ddpsi);
          // L(psi P) = 2[P (psi'' + psi'/r) + 2 psi' P'] + psi * L P
          val = 2.0 * (P_val(r) * (ddpsi + dpsi / r) + 2.0 * dpsi * P_d1(r)) + psi * LP_val(r);
        }
        R((i % N + N) % N, (j % N + N) % N) += val;
      }
    }
  }

  ComplexGrid Rhat = fft2(R);

  // Correction coefficients what(k) = -Rhat(k) / symbol(k) on the dual modes.
  FrequencySet fs = dual_frequencies(spec, truncation);
  double c0 = 0, gamma = 0;
  double shell_outer = 0, shell_inner = 0;  // |w| mass on [K-1,K] and [K-2,K-1)
  std::vector<Eigen::Vector2i> modes;
  std::vector<double> coeff;
  for (const auto& k : fs.freqs) {
    const double sym = -2.0 * k.squaredNorm() + 4.0;
    if (std::abs(sym) < 1e-9) {
      throw InadmissibleLattice("kernel frequency present in dual set");
    }
    const std::complex<double> rh = Rhat((k.x() % 1024 + 1024) % 1024, (k.y() % 1024 + 1024) % 1024);
    const double w = -rh.real() / sym;
    gamma += w;
    const double kn = k.cast<double>().norm();
    if (kn >= truncation - 1) {
      shell_outer += std::abs(w);
    } else if (kn >= truncation - 2) {
      shell_inner += std::abs(w);
    }
    if (k.x() == 0 && k.y() == 0) {
      c0 = w;
      continue;
    }
    // fold k and -k (coefficients are real and even)
    if (k.x() > 0 || (k.x() == 0 && k.y() > 0)) {
      modes.push_back(k);
      coeff.push_back(2.0 * w);
    }
  }
  // geometric extrapolation of the omitted mass from the last two shells
  double ratio = (shell_inner > 0) ? std::min(shell_outer / shell_inner, 0.95) : 0.5;
  double tail = shell_outer * ratio / (1.0 - ratio);
  if (tail > 1e-8) {
    throw TruncationTooSmall("Fourier tail estimate " + std::to_string(tail));
  }

  g.c0_ = c0;
  g.modes_ = std::move(modes);
  g.coeff_ = std::move(coeff);
  g.gamma_ = gamma;
  g.tail_ = tail;
  return g;
}

void GreenFunction::jet(const Eigen::Vector2d& mu, double& val, Eigen::Vector2d& grad,
                        Eigen::Matrix2d& hess) const {
  // power tables e^{i k mu} for k = -K..K in each axis
  const int K = static_cast<int>(std::floor(truncation_));
  thread_local std::vector<std::complex<double>> p1, p2;
  p1.assign(2 * K + 1, {1, 0});
  p2.assign(2 * K + 1, {1, 0});
  const std::complex<double> e1(std::cos(mu.x()), std::sin(mu.x()));
  const std::complex<double> e2(std::cos(mu.y()), std::sin(mu.y()));
  for (int k = 1; k <= K; ++k) {
    p1[K + k] = p1[K + k - 1] * e1;
    p2[K + k] = p2[K + k - 1] * e2;
    p1[K - k] = std::conj(p1[K + k]);
    p2[K - k] = std::conj(p2[K + k]);
  }

  double v = c0_;
  Eigen::Vector2d gr = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hs = Eigen::Matrix2d::Zero();
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    const auto& k = modes_[m];
    const std::complex<double> e = p1[K + k.x()] * p2[K + k.y()];
    const double c = coeff_[m] * e.real();  // c_k (e^{ik mu} + e^{-ik mu})/... folded
    const double s = coeff_[m] * e.imag();
    v += c;
    gr.x() += -s * k.x();
    gr.y() += -s * k.y();
    hs(0, 0) += -c * k.x() * k.x();
    hs(0, 1) += -c * k.x() * k.y();
    hs(1, 1) += -c * k.y() * k.y();
  }
  hs(1, 0) = hs(0, 1);

  // local singular parts; envelopes can straddle the midline between points,
  // so add every lattice image within the support radius
  const double twopi = 2.0 * kPi;
  const Eigen::Vector2d base(std::floor(mu.x() / twopi) * twopi,
                             std::floor(mu.y() / twopi) * twopi);
  for (const auto& cp : lattice_.cell_points()) {
    for (int a = -1; a <= 1; ++a) {
      for (int b = -1; b <= 1; ++b) {
        const Eigen::Vector2d p = base + cp + Eigen::Vector2d(a * twopi, b * twopi);
        const Eigen::Vector2d d = mu - p;
        const double r = d.norm();
        if (r >= r1_) continue;
        if (r < 1e-14) throw SingularitySampled("evaluation at a lattice point");
        double F, dF, ddF;
        local_jet(r, F, dF, ddF);
        const Eigen::Vector2d er = d / r;
        v += F;
        gr += dF * er;
        hs += ddF * er * er.transpose() +
              (dF / r) * (Eigen::Matrix2d::Identity() - er * er.transpose());
      }
    }
  }
  val = v;
  grad = gr;
  hess = hs;
}

double GreenFunction::value(const Eigen::Vector2d& mu) const {
  double v;
  Eigen::Vector2d g;
  Eigen::Matrix2d h;
  jet(mu, v, g, h);
  return v;
}

Eigen::Vector2d GreenFunction::gradient(const Eigen::Vector2d& mu) const {
  double v;
  Eigen::Vector2d g;
  Eigen::Matrix2d h;
  jet(mu, v, g, h);
  return g;
}

Eigen::Matrix2d GreenFunction::hessian(const Eigen::Vector2d& mu) const {
  double v;
  Eigen::Vector2d g;
  Eigen::Matrix2d h;
  jet(mu, v, g, h);
  return h;
}

GammaFit gamma_constant(const GreenFunction& g, double r_lo, double r_hi) {
  // Angle-averaged radial profile of Gamma + log r (an 8-point angular mean
  // annihilates the cos/sin 2phi harmonics of the smooth part), fitted
  // against gamma + c1 r^2 log(1/r) + c2 r^2.
  const int n_r = 24, n_ang = 8;
  Eigen::MatrixXd A(n_r, 3);
  Eigen::VectorXd b(n_r);
  for (int i = 0; i < n_r; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (n_r - 1));
    double mean = 0;
    for (int j = 0; j < n_ang; ++j) {
      const double ang = 2.0 * kPi * (j + 0.34) / n_ang;
      mean += g.value({r * std::cos(ang), r * std::sin(ang)});
    }
    mean /= n_ang;
    A(i, 0) = 1.0;
    A(i, 1) = r * r * std::log(1.0 / r);
    A(i, 2) = r * r;
    b(i) = mean + std::log(r);
  }
  Eigen::Vector3d x = (A.transpose() * A).ldlt().solve(A.transpose() * b);
  GammaFit fit;
  fit.gamma = x(0);
  fit.curvature_coeff = x(1);
  fit.residual = (A * x - b).cwiseAbs().maxCoeff();
  if (fit.residual > 1e-4) {
    throw FitUnstable("gamma fit residual " + std::to_string(fit.residual));
  }
  return fit;
}

TorusField green_field(const GreenFunction& g, int n) {
  TorusField f(n);
  const double h = 2.0 * kPi / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2d mu((i + 0.5) * h, (j + 0.5) * h);
      const Eigen::Vector2d p = g.lattice().nearest_point(mu);
      if ((mu - p).norm() < 0.45 * h) {
        throw SingularitySampled("sample too close to a lattice point");
      }
      f(i, j) = g.value(mu);
    }
  }
  return f;
}

}  // namespace cmc
