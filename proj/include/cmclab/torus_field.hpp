#pragma once

#include <Eigen/Dense>
#include <complex>

#include "cmclab/exact.hpp"

namespace cmc {

/// Vertex-centered periodic grid on [0,2pi)^2, index (i,j) -> mu = 2pi*(i,j)/n.
struct TorusGrid {
  int n = 0;
  double h() const { return 2.0 * kPi / n; }
  double mu1(int i) const { return 2.0 * kPi * i / n; }
  double mu2(int j) const { return 2.0 * kPi * j / n; }
};

/// Real scalar samples bound to a TorusGrid; v(i,j) = f(mu1(i), mu2(j)).
struct TorusField {
  int n = 0;
  Eigen::ArrayXXd v;

  TorusField() = default;
  explicit TorusField(int n_) : n(n_), v(Eigen::ArrayXXd::Zero(n_, n_)) {}

  double& operator()(int i, int j) { return v(i, j); }
  double operator()(int i, int j) const { return v(i, j); }
  double max_abs() const { return v.abs().maxCoeff(); }
};

using ComplexGrid = Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;

/// Forward DFT of real samples; entry (k1,k2) holds the coefficient of
/// exp(i k.mu) with k read modulo n (standard FFT bin layout), normalized by
/// 1/n^2 so that coefficients are Fourier series coefficients.
ComplexGrid fft2(const TorusField& f);

/// Inverse of fft2; imaginary parts of the reconstruction are discarded.
TorusField ifft2(const ComplexGrid& coeff);

/// Signed integer frequency of FFT bin k on an n-grid.
inline int fft_freq(int k, int n) { return (k <= n / 2) ? k : k - n; }

}  // namespace cmc
