#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "cmclab/catenoid.hpp"
#include "cmclab/clifford.hpp"
#include "cmclab/green.hpp"
#include "cmclab/lattice.hpp"

namespace cmc {

/// Neck-scale calibration: t_a = arcsin(a)/sqrt2 and the unique small solution
/// of t_a = -eps log eps + eps (gamma_lambda + log 2).
struct NeckScale {
  double a = 0;
  double t_a = 0;
  double epsilon = 0;
  double gamma_lambda = 0;
};

NeckScale neck_scale(double a, double gamma_lambda);

/// Radial blend in log radius: 0 for x <= 1/2, 1 for x >= 2 (x = r/sqrt(eps)).
double eta_blend(double x);
void eta_blend_jet(double x, double& val, double& d1, double& d2);

struct ProfileJet {
  double V = 0;
  Eigen::Vector2d dV = Eigen::Vector2d::Zero();
  Eigen::Matrix2d ddV = Eigen::Matrix2d::Zero();
};

/// Second-order jet in mu of the upper-sheet vertical profile, given the
/// nearest lattice point p and a cached jet of Gamma at mu.
ProfileJet profile_jet(const NeckScale& ns, const Eigen::Vector2d& mu, const Eigen::Vector2d& p,
                       double gval, const Eigen::Vector2d& ggrad, const Eigen::Matrix2d& ghess);

/// Vertical profile of the upper sheet over a punctured neighborhood of a
/// lattice point: eta (t_a - eps Gamma) + (1-eta) eps arccosh(r/eps).
/// Valid for r = dist(mu, Lambda) > eps; equals the neck graph for
/// r <= sqrt(eps)/2 and the Green graph for r >= 2 sqrt(eps).
double transition_profile(const Eigen::Vector2d& mu, const NeckScale& ns, const GreenFunction& g);

enum class Region : std::uint8_t { CPlus, CMinus, Neck, Transition };

struct MeshResolution {
  int n_torus = 128;  // Cartesian grid base (rounded up for lattice alignment)
  int n_theta = 64;   // angular samples on rings (even)
  int n_s = 64;       // rows across the neck span [-s_neck, s_neck]
};

struct MeshVertex {
  Eigen::Vector4d pos;     // ambient position on S^3
  Eigen::Vector2d mu;      // torus projection
  double s = 0;            // tower arclength coordinate (eps cosh s = radius)
  double theta = 0;        // tower angle
  double zeta = 0;         // weight: chart radius
  Region region = Region::CPlus;
  int sheet = +1;          // +1 upper, -1 lower, 0 at the waist row
  int tower = -1;          // lattice point index, -1 for Cartesian vertices
  int i = 0, j = 0;        // structured indices (tower row/col or grid i/j)
  // cached Green jet at mu (used by chart geometry)
  double gval = 0;
  Eigen::Vector2d ggrad = Eigen::Vector2d::Zero();
  Eigen::Matrix2d ghess = Eigen::Matrix2d::Zero();
};

/// Watertight triangle mesh of the glued surface, with structured charts
/// (per-lattice-point polar towers through the necks, two Cartesian sheets)
/// and the finite symmetry group acting by vertex permutations.
struct SurfaceMesh {
  LatticeSpec lattice;
  NeckScale ns;
  MeshResolution res;
  std::shared_ptr<const GreenFunction> green;

  std::vector<MeshVertex> verts;
  std::vector<std::array<int, 3>> tris;

  // geometry bookkeeping
  double kappa0 = 0;   // patching support radius (paper constraint < dmin/8)
  double r_out = 0;    // tower outer radius (= 2 kappa0, rounded to the row grid)
  double s_neck = 0;   // eps cosh(s_neck) = sqrt(eps)/2
  double ds = 0;       // uniform s step of the tower rows

  // Cartesian sheets: id = cart_id[sheet01][i * n + j], -1 where removed
  int n = 0;
  std::array<std::vector<int>, 2> cart_id;  // [0] upper, [1] lower

  // towers: id = tower_id[t][k * n_theta + j], rows k = 0..n_rows-1 with
  // s = row_s[k] decreasing from +S to -S (upper outer ring to lower)
  int n_rows = 0;
  std::vector<double> row_s;
  std::vector<std::vector<int>> tower_id;

  // group action: perms[g] is the vertex permutation of the g-th element
  // (g = e * m_lambda + t: translation by cell point t, then rho^e)
  std::vector<std::vector<int>> perms;
  std::vector<std::vector<int>> orbits;   // orbit id -> member vertices
  std::vector<int> orbit_of;              // vertex -> orbit id

  int num_vertices() const { return static_cast<int>(verts.size()); }
  int cart_index(int sheet01, int i, int j) const {
    return cart_id[sheet01][((i % n + n) % n) * n + ((j % n + n) % n)];
  }

  /// Group-average a per-vertex field.
  Eigen::VectorXd symmetrize(const Eigen::VectorXd& field) const;
  /// Largest deviation of f from its value at the image vertices.
  double symmetry_defect(const Eigen::VectorXd& field) const;

  /// Euler characteristic V - E + F (throws NotWatertight on boundary edges).
  int euler_characteristic() const;
};

SurfaceMesh build_approximate_surface(double a, const LatticeSpec& spec,
                                      std::shared_ptr<const GreenFunction> green,
                                      const MeshResolution& res);

/// Plain Clifford torus C_a meshed on an n x n grid (test fixture; no necks).
SurfaceMesh build_clifford_fixture(double a, const LatticeSpec& spec, int n);

int genus_check(const SurfaceMesh& mesh);

/// Per-vertex weight zeta: eps cosh s through the necks, distance to the
/// nearest lattice point on the sheets.
Eigen::VectorXd weight_function(const SurfaceMesh& mesh);

}  // namespace cmc
