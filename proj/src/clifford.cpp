#include "cmclab/clifford.hpp"

#include <fftw3.h>

#include <cmath>

#include "cmclab/errors.hpp"

namespace cmc {

ComplexGrid fft2(const TorusField& f) {
  const int n = f.n;
  ComplexGrid in(n, n), out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) in(i, j) = f(i, j);
  // Column-major data handed to FFTW swaps the axis order; the transform is
  // separable and symmetric in the two axes, so out(k1,k2) still pairs with
  // exp(i k.mu) after normalization.
  fftw_plan plan = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(in.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                                    FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  out /= static_cast<double>(n) * n;
  return out;
}

TorusField ifft2(const ComplexGrid& coeff) {
  const int n = static_cast<int>(coeff.rows());
  ComplexGrid in = coeff, out(n, n);
  fftw_plan plan = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(in.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  TorusField f(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = out(i, j).real();
  return f;
}

CliffordGeometry CliffordGeometry::make(double a) {
  if (!(a > -1.0 && a < 1.0)) throw ParamOutOfRange("Clifford parameter a must be in (-1,1)");
  CliffordGeometry g;
  g.a = a;
  g.metric_diag = {(1.0 + a) / 2.0, (1.0 - a) / 2.0};
  const double s = std::sqrt(1.0 - a * a);
  g.second_form_diag = {-s / 2.0, s / 2.0};
  g.H = 2.0 * a / s;
  // |B|^2 = g^{11 2} b11^2 + ... for diagonal forms: sum (b_ii / g_ii)^2
  const double b1 = g.second_form_diag(0) / g.metric_diag(0);
  const double b2 = g.second_form_diag(1) / g.metric_diag(1);
  g.norm_B_sq = b1 * b1 + b2 * b2;
  return g;
}

Eigen::Vector4d clifford_immersion(double a, const Eigen::Vector2d& mu) {
  if (!(a > -1.0 && a < 1.0)) throw ParamOutOfRange("a must be in (-1,1)");
  const double r1 = std::sqrt((1.0 + a) / 2.0);
  const double r2 = std::sqrt((1.0 - a) / 2.0);
  return {r1 * std::cos(mu.x()), r1 * std::sin(mu.x()), r2 * std::cos(mu.y()),
          r2 * std::sin(mu.y())};
}

double clifford_mean_curvature(double a) {
  if (!(a > -1.0 && a < 1.0)) throw ParamOutOfRange("a must be in (-1,1)");
  return 2.0 * a / std::sqrt(1.0 - a * a);
}

Eigen::Vector4d toroidal_chart(const ToroidalPoint& p) {
  if (!(std::abs(p.t) < toroidal_t_max())) {
    throw ParamOutOfRange("toroidal coordinate t outside I");
  }
  const double s = std::sin(std::sqrt(2.0) * p.t);
  const double r1 = std::sqrt((1.0 + s) / 2.0);
  const double r2 = std::sqrt((1.0 - s) / 2.0);
  return {r1 * std::cos(p.mu1), r1 * std::sin(p.mu1), r2 * std::cos(p.mu2),
          r2 * std::sin(p.mu2)};
}

Eigen::Vector3d toroidal_metric(double t) {
  if (!(std::abs(t) < toroidal_t_max())) throw ParamOutOfRange("t outside I");
  const double s = std::sin(std::sqrt(2.0) * t);
  return {0.5, (1.0 + s) / 2.0, (1.0 - s) / 2.0};
}

ToroidalPoint toroidal_coordinates(const Eigen::Vector4d& x) {
  const double q1 = x(0) * x(0) + x(1) * x(1);
  const double q2 = x(2) * x(2) + x(3) * x(3);
  if (q1 < 1e-14 || q2 < 1e-14) throw ParamOutOfRange("point on a core circle");
  ToroidalPoint p;
  p.t = std::asin(std::clamp(q1 - q2, -1.0, 1.0)) / std::sqrt(2.0);
  p.mu1 = std::atan2(x(1), x(0));
  p.mu2 = std::atan2(x(3), x(2));
  return p;
}

TorusField torus_jacobi_apply(double a, const TorusField& f, DerivScheme scheme) {
  const int n = f.n;
  if (n < 16) throw GridTooCoarse("need at least a 16^2 grid");
  const double c1 = 2.0 / (1.0 + a);
  const double c2 = 2.0 / (1.0 - a);
  const double c0 = 4.0 / (1.0 - a * a);
  TorusField out(n);
  if (scheme == DerivScheme::Spectral) {
    ComplexGrid coeff = fft2(f);
    for (int i = 0; i < n; ++i) {
      const int k1 = fft_freq(i, n);
      for (int j = 0; j < n; ++j) {
        const int k2 = fft_freq(j, n);
        coeff(i, j) *= -c1 * k1 * k1 - c2 * k2 * k2 + c0;
      }
    }
    out = ifft2(coeff);
  } else {
    const double h = 2.0 * kPi / n;
    for (int i = 0; i < n; ++i) {
      const int ip = (i + 1) % n, im = (i + n - 1) % n;
      for (int j = 0; j < n; ++j) {
        const int jp = (j + 1) % n, jm = (j + n - 1) % n;
        const double d11 = (f(ip, j) - 2.0 * f(i, j) + f(im, j)) / (h * h);
        const double d22 = (f(i, jp) - 2.0 * f(i, j) + f(i, jm)) / (h * h);
        out(i, j) = c1 * d11 + c2 * d22 + c0 * f(i, j);
      }
    }
  }
  return out;
}

std::array<TorusField, 4> torus_kernel_basis(int n) {
  std::array<TorusField, 4> basis{TorusField(n), TorusField(n), TorusField(n), TorusField(n)};
  TorusGrid grid{n};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double p = grid.mu1(i) + grid.mu2(j);
      const double m = grid.mu1(i) - grid.mu2(j);
      basis[0](i, j) = std::cos(p);
      basis[1](i, j) = std::sin(p);
      basis[2](i, j) = std::cos(m);
      basis[3](i, j) = std::sin(m);
    }
  }
  return basis;
}

TorusField torus_jacobi_solve(const TorusField& f) {
  const int n = f.n;
  ComplexGrid coeff = fft2(f);
  for (int i = 0; i < n; ++i) {
    const int k1 = fft_freq(i, n);
    for (int j = 0; j < n; ++j) {
      const int k2 = fft_freq(j, n);
      const double sym = -2.0 * (k1 * k1 + k2 * k2) + 4.0;
      if (std::abs(sym) < 1e-9) {
        coeff(i, j) = 0.0;  // |k|^2 = 2 kernel modes carry no admissible content
      } else {
        coeff(i, j) /= sym;
      }
    }
  }
  return ifft2(coeff);
}

}  // namespace cmc
