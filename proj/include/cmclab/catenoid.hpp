#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace cmc {

/// Quintic smoothstep: 0 for x<=0, 1 for x>=1, C^2 at the junctions.
inline double smoothstep5(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}
inline double smoothstep5_d1(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return x * x * (30.0 + x * (-60.0 + 30.0 * x));
}
inline double smoothstep5_d2(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return x * (60.0 + x * (-180.0 + 120.0 * x));
}

/// Cutoff chi(s): 0 for s < -1, 1 for s > 1.
inline double chi_cutoff(double s) { return smoothstep5((s + 1.0) / 2.0); }

/// Uniform (s,theta) grid on [-s_max, s_max] x [0,2pi).
struct CatenoidChart {
  double epsilon = 0;
  double s_max = 0;
  int n_s = 0;      // intervals in s; n_s+1 nodes
  int n_theta = 0;  // periodic theta samples (even)

  double hs() const { return 2.0 * s_max / n_s; }
  double s(int i) const { return -s_max + i * hs(); }
  double theta(int j) const { return 2.0 * kPi_ * j / n_theta; }
  static constexpr double kPi_ = 3.14159265358979323846264338327950288;

  /// Chart covering the mesh neck region, eps*cosh(s_max) = sqrt(eps).
  static CatenoidChart neck_region(double epsilon, int n_s, int n_theta);
  /// Longer chart reaching horizontal radius r_max (used by the patching
  /// solve, whose data extends to a fixed radius independent of eps).
  static CatenoidChart reaching_radius(double epsilon, double r_max, int n_s, int n_theta);
};

/// Field on a chart grid; row i = s node, column j = theta sample.
struct ChartField {
  Eigen::ArrayXXd v;
  ChartField() = default;
  ChartField(int n_s_nodes, int n_theta) : v(Eigen::ArrayXXd::Zero(n_s_nodes, n_theta)) {}
  double& operator()(int i, int j) { return v(i, j); }
  double operator()(int i, int j) const { return v(i, j); }
};

Eigen::Vector3d catenoid_immersion(double epsilon, double s, double theta);

/// (eps^2 cosh^2 s)^{-1} (d^2/ds^2 + d^2/dtheta^2 + 2/cosh^2 s); theta
/// derivatives spectral, s by centered differences with one-sided closures.
ChartField catenoid_jacobi_apply(const CatenoidChart& chart, const ChartField& f);

struct ModeSolution {
  std::vector<double> s;
  std::vector<double> a;
  double exponent_left = 0;   // fitted d log|a| / ds near the left end
  double exponent_right = 0;  // fitted near the right end
};

/// Integrates a'' - (2j)^2 a + (2/cosh^2 s) a = 0 over [-s_span, s_span] from
/// left-end data bc = (a, a') with an adaptive Dormand-Prince step.
ModeSolution catenoid_mode_solve(int j, double s_span, const std::array<double, 2>& bc);

struct DeficiencyBasis {
  ChartField f0_1;       // tanh s
  ChartField f0_2;       // s tanh s - 1
  ChartField ftilde0_1;  // (2 chi - 1) tanh s
  ChartField ftilde0_2;  // (2 chi - 1) (s tanh s - 1)
};

DeficiencyBasis deficiency_basis(const CatenoidChart& chart);

struct NeckSolveResult {
  ChartField v;          // decaying part
  double p1 = 0;         // ftilde0_1 coefficient
  double p2 = 0;         // ftilde0_2 coefficient
  double residual_rel = 0;
};

/// Solves the chart-discretized Jacobi equation L u = f for f invariant under
/// theta -> theta+pi and supported inside the chart, with the solution split
/// as u = v + p1 ftilde0_1 + p2 ftilde0_2, v tending to zero at the chart ends
/// (Robin decay closure with rate gamma tanh s on the zero mode).
NeckSolveResult neck_solve_with_deficiency(const CatenoidChart& chart, const ChartField& f,
                                           double gamma);

}  // namespace cmc
