#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "cmclab/clifford.hpp"
#include "cmclab/glue.hpp"
#include "cmclab/torus_field.hpp"

namespace cmc {

/// Second-order jet of a chart immersion in toroidal coordinates
/// X = (mu1, mu2, t) as a function of two chart parameters.
struct ChartJet2 {
  Eigen::Vector3d X = Eigen::Vector3d::Zero();
  Eigen::Matrix<double, 3, 2> D = Eigen::Matrix<double, 3, 2>::Zero();
  std::array<Eigen::Matrix2d, 3> DD = {Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero(),
                                       Eigen::Matrix2d::Zero()};
};

struct PointGeometry {
  Eigen::Matrix2d metric = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d second_form = Eigen::Matrix2d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();  // toroidal components, unit
  double H = 0;
  double norm_B_sq = 0;
};

/// First and second fundamental forms, normal and mean curvature of a chart
/// immersion into S^3 given its toroidal-coordinate jet. The ambient
/// Christoffel symbols of the diagonal toroidal metric are analytic. The
/// normal sign is fixed by g(N, reference) > 0.
PointGeometry immersion_geometry(const ChartJet2& jet, const Eigen::Vector3d& reference);

/// 4x3 Jacobian of the chart Xi at a toroidal point (columns d/dmu1, d/dmu2, d/dt).
Eigen::Matrix<double, 4, 3> toroidal_frame(const ToroidalPoint& p);

/// Closed-form mean curvature of the graph mu -> Xi(mu, sqrt2 u(mu)) from the
/// jet of u. Cross-validated against immersion_geometry.
double graph_mean_curvature_point(double u, const Eigen::Vector2d& du, const Eigen::Matrix2d& ddu);

/// Graph mean curvature on a periodic grid; derivatives of u spectral or FD.
TorusField graph_mean_curvature(const TorusField& u, DerivScheme scheme = DerivScheme::Spectral);

/// Chart jet of the glued surface at a mesh vertex: Cartesian vertices in
/// (mu1, mu2), tower vertices in (s, theta).
ChartJet2 vertex_chart_jet(const SurfaceMesh& mesh, int v);
/// Same, at an offset (d1, d2) from the vertex in its chart parameters.
ChartJet2 vertex_chart_jet_at(const SurfaceMesh& mesh, int v, double d1, double d2);
Eigen::Vector3d vertex_reference_direction(const SurfaceMesh& mesh, int v);
PointGeometry vertex_geometry(const SurfaceMesh& mesh, int v);

/// Unit normal at a vertex as an R^4 vector (tangent to S^3).
Eigen::Vector4d vertex_normal_r4(const SurfaceMesh& mesh, int v);

struct CurvatureField {
  Eigen::VectorXd H;      // mean curvature per vertex
  Eigen::VectorXd gradH;  // surface-gradient magnitude, chart finite differences
};

CurvatureField mesh_mean_curvature(const SurfaceMesh& mesh, bool with_gradient = true);

struct RegionEstimate {
  Region region;
  double a = 0;
  double sup_raw = 0;            // sup |H - H_a|
  double sup_weighted = 0;       // region weighting of |H - H_a|
  double sup_weighted_grad = 0;  // region weighting of the gradient term
  int samples = 0;
};

/// Weighted mean-curvature error suprema per region for a sweep of meshes.
std::vector<RegionEstimate> verify_estH(const std::vector<const SurfaceMesh*>& meshes);

/// Largest ratio max/min over the sweep of the per-region weighted suprema;
/// bounded-constant check passes when the ratio stays below the threshold.
double estimate_spread(const std::vector<RegionEstimate>& rows, Region region);

/// Discrete C^0_{gamma-2} norm of H - H_a: sup zeta^{2-gamma} |H - H_a|.
double global_error_norm(const SurfaceMesh& mesh, double gamma);

}  // namespace cmc
