#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cmclab/lattice.hpp"
#include "cmclab/torus_field.hpp"

namespace cmc {

/// Lattice-periodic Green's function of L_{C_0} = 2 Delta + 4 with logarithmic
/// singularities at the lattice points, normalized by the expansion
///   Gamma(mu) = -log|mu| + gamma_lambda + O(|mu|^2 log 1/|mu|)  near mu = 0.
/// Built as a cutoff local expansion around each lattice point plus a smooth
/// Fourier correction on the dual frequencies.
class GreenFunction {
 public:
  GreenFunction() = default;

  double operator()(const Eigen::Vector2d& mu) const { return value(mu); }
  double value(const Eigen::Vector2d& mu) const;
  Eigen::Vector2d gradient(const Eigen::Vector2d& mu) const;
  Eigen::Matrix2d hessian(const Eigen::Vector2d& mu) const;

  /// Value, gradient and Hessian in one pass (one trig table per call).
  void jet(const Eigen::Vector2d& mu, double& val, Eigen::Vector2d& grad,
           Eigen::Matrix2d& hess) const;

  const LatticeSpec& lattice() const { return lattice_; }
  double truncation() const { return truncation_; }
  /// Constant term of the expansion, from the Fourier correction at 0.
  double gamma() const { return gamma_; }
  double tail_estimate() const { return tail_; }

  friend GreenFunction build_green(const LatticeSpec& spec, double truncation);

 private:
  LatticeSpec lattice_;
  double truncation_ = 0;
  double gamma_ = 0;
  double tail_ = 0;
  double r0_ = 0, r1_ = 0;  // envelope width sigma / support radius of the local part

  std::vector<Eigen::Vector2i> modes_;  // folded: k=0 excluded, half-plane
  std::vector<double> coeff_;           // real coefficients of exp(ik.mu)+exp(-ik.mu)
  double c0_ = 0;

  // local radial profile F(r) = psi(r) P(r) and derivatives
  double local_value(double r) const;
  void local_jet(double r, double& F, double& dF, double& ddF) const;
};

GreenFunction build_green(const LatticeSpec& spec, double truncation);

struct GammaFit {
  double gamma = 0;
  double curvature_coeff = 0;  // coefficient of |mu|^2 log(1/|mu|)
  double residual = 0;
};

/// Extracts gamma_lambda by fitting Gamma(mu) + log|mu| over radii in
/// [r_lo, r_hi] against gamma + c |mu|^2 log(1/|mu|).
GammaFit gamma_constant(const GreenFunction& g, double r_lo = 1e-3, double r_hi = 1e-1);

/// Samples Gamma at the cell centers of an n-grid (vertex sampling always
/// hits the lattice point at the origin). Throws SingularitySampled if a
/// center comes closer than half a cell to a lattice point.
TorusField green_field(const GreenFunction& g, int n);

}  // namespace cmc
