#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "cmclab/curvature.hpp"
#include "cmclab/glue.hpp"

namespace cmc {

/// Cotangent Laplace-Beltrami plus the diagonal potential |B|^2 + 2, stored as
/// a stiffness matrix K and lumped mass M so that the operator is M^{-1} K,
/// symmetric in the M inner product.
struct DiscreteJacobi {
  const SurfaceMesh* mesh = nullptr;
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd M;          // lumped vertex areas
  Eigen::VectorXd potential;  // |B|^2 + 2 per vertex

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
};

DiscreteJacobi assemble_jacobi(const SurfaceMesh& mesh);

/// Per-vertex finite-difference stencil in the vertex's chart parameters,
/// centered where neighbors exist and one-sided at chart edges (tower outer
/// rows, grid vertices bordering the tower holes). Rows: d1, d2, d11, d12, d22.
struct ChartStencil {
  std::vector<int> ids;  // neighbor vertex ids, self first
  Eigen::MatrixXd w;     // 5 x ids.size()
};

ChartStencil vertex_stencil(const SurfaceMesh& mesh, int v);

/// Metric data entering the chart form of the operator:
/// Delta u = ginv^{ab} d_ab u + drift^b d_b u.
struct ChartOperatorData {
  Eigen::Matrix2d ginv;
  Eigen::Vector2d drift;
  double pot = 0;  // |B|^2 + 2
};

ChartOperatorData chart_operator_data(const SurfaceMesh& mesh, int v);

/// Chart finite-difference assembly of the same operator. Unlike the
/// cotangent assembly it is pointwise second-order consistent across the
/// chart seams (at the cost of symmetry), which the sup-norm patching
/// argument needs. apply() is interface-compatible (K holds M * rows).
DiscreteJacobi assemble_jacobi_fd(const SurfaceMesh& mesh);

/// Weighted C^k norm with the Holder seminorm replaced by a first-difference
/// surrogate at exponent alpha = 0.5: derivative levels are f, the edge
/// gradient magnitude, and the discrete Laplacian. Passing the assembled
/// operator avoids rebuilding it when k = 2.
double weighted_norm(const Eigen::VectorXd& field, const SurfaceMesh& mesh,
                     const Eigen::VectorXd& zeta, double gamma, int k,
                     const DiscreteJacobi* op = nullptr);

struct EigenPair {
  double lambda;
  Eigen::VectorXd vec;
};

/// Lowest-|lambda| eigenpairs of the operator restricted to the G-invariant
/// subspace (dense solve in orbit space). With restrict_symmetric = false the
/// full vertex space is used (coarse meshes only).
std::vector<EigenPair> symmetric_spectrum(const DiscreteJacobi& op, int count,
                                          bool restrict_symmetric = true);

struct MatchingCoefficients {
  double p1 = 0, p2 = 0;
  double q1 = 0, q2 = 0, rplus = 0, rminus = 0;
  double qhat1 = 0, qhat2 = 0, rhatplus = 0, rhatminus = 0;
  double uext_plus0 = 0, uext_minus0 = 0;
  double residual = 0;     // max residual of the solved 4x4 system
  double bound_const = 0;  // measured constant of the printed scaling bound
};

/// Transition matching of the neck solve tails against the Green tails:
///   r+ (gL) - q1 + q2 = p1 - p2,   r- (gL) + q1 + q2 = p1 + p2,
///   r+ + q2 = -p2,                 r- + q2 = p2,      gL = gamma - log(eps/2).
MatchingCoefficients solve_matching_step1(double p1, double p2, const NeckScale& ns);

/// Matching of the exterior solutions against the neck kernel fields:
///   rh+ (gL) + u+(0) = qh1 - qh2,  rh- (gL) + u-(0) = -qh1 - qh2,
///   rh+ = -qh2,                    rh- = -qh2.
MatchingCoefficients solve_matching_step2(double uext_plus0, double uext_minus0,
                                          const NeckScale& ns);

struct RightInverseResult {
  Eigen::VectorXd u;
  double rho = 0;  // weighted residual ratio |L u - f| / |f| at weight gamma-2
  MatchingCoefficients step1;
  MatchingCoefficients step2;
};

/// Approximate right inverse assembled by patching a catenoid-chart solve near
/// the necks (with the deficiency decomposition and the step-1 matching)
/// against a flat-torus spectral solve away from them (step-2 matching).
RightInverseResult patching_right_inverse(const DiscreteJacobi& op, const Eigen::VectorXd& f,
                                          double gamma, double kappa1 = 0.1);

struct ProbeResult {
  double max_ratio = 0;    // max |u|_{2,gamma} / (eps^gamma |L u|_{0,gamma-2})
  double mean_ratio = 0;
};

/// Empirical constant of the linear estimate over seeded random symmetric
/// fields.
ProbeResult linear_estimate_probe(const DiscreteJacobi& op, double gamma, int trials,
                                  std::uint64_t seed = 2024);

/// Smooth, G-symmetric, band-limited random field on the mesh (fixed seed).
Eigen::VectorXd random_symmetric_field(const SurfaceMesh& mesh, std::uint64_t seed);

}  // namespace cmc
