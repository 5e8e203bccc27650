#pragma once

#include <Eigen/Dense>
#include <array>

#include "cmclab/lattice.hpp"
#include "cmclab/torus_field.hpp"

namespace cmc {

/// Flat-torus data for the Clifford torus C_a in S^3.
struct CliffordGeometry {
  double a = 0;
  Eigen::Vector2d metric_diag;       // ((1+a)/2, (1-a)/2)
  Eigen::Vector2d second_form_diag;  // (-sqrt(1-a^2)/2, +sqrt(1-a^2)/2)
  double H = 0;                      // 2a/sqrt(1-a^2)
  double norm_B_sq = 0;              // |B|^2, with |B|^2 + 2 = 4/(1-a^2)

  static CliffordGeometry make(double a);
};

struct ToroidalPoint {
  double mu1 = 0, mu2 = 0, t = 0;
};

/// Half-width of the toroidal chart interval I = (-pi/(2 sqrt 2), pi/(2 sqrt 2)).
inline double toroidal_t_max() { return kPi / (2.0 * std::sqrt(2.0)); }

Eigen::Vector4d clifford_immersion(double a, const Eigen::Vector2d& mu);
double clifford_mean_curvature(double a);

/// Toroidal coordinates Xi(mu1, mu2, t) for S^3; the level t = t_a with
/// sin(sqrt2 t_a) = a is the Clifford torus C_a.
Eigen::Vector4d toroidal_chart(const ToroidalPoint& p);

/// diag coefficients of the round metric in toroidal coordinates, order
/// (t, mu1, mu2): (1/2, (1+sin(sqrt2 t))/2, (1-sin(sqrt2 t))/2).
Eigen::Vector3d toroidal_metric(double t);

/// Toroidal coordinates of a point of S^3 away from the two core circles.
ToroidalPoint toroidal_coordinates(const Eigen::Vector4d& x);

enum class DerivScheme { Spectral, FiniteDifference };

/// Applies L_{C_a} = (2/(1+a)) d^2/dmu1^2 + (2/(1-a)) d^2/dmu2^2 + 4/(1-a^2).
TorusField torus_jacobi_apply(double a, const TorusField& f,
                              DerivScheme scheme = DerivScheme::Spectral);

/// The four flat-torus Jacobi fields cos/sin(mu1 +- mu2) sampled on the grid.
std::array<TorusField, 4> torus_kernel_basis(int n);

/// Spectral solve of L_{C_0} u = f. Fourier modes whose symbol vanishes
/// (|k|^2 = 2) are projected out; for admissible-lattice symmetric data these
/// carry no content. Returns u with zero contribution on the projected modes.
TorusField torus_jacobi_solve(const TorusField& f);

/// Symbol of L_{C_a} at integer frequency k.
inline double torus_symbol(double a, const Eigen::Vector2i& k) {
  return -2.0 / (1.0 + a) * k.x() * k.x() - 2.0 / (1.0 - a) * k.y() * k.y() +
         4.0 / (1.0 - a * a);
}

}  // namespace cmc
