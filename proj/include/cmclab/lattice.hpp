#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "cmclab/exact.hpp"
#include "cmclab/torus_field.hpp"

namespace cmc {

/// A plane lattice containing 2pi Z^2, given by generators tau1, tau2.
/// m_lambda = (2pi)^2 / |det(tau1,tau2)| is the number of lattice points in the
/// fundamental cell [0,2pi)^2. "admissible" is the hypothesis under which the
/// doubled surface exists: neither frequency (1,1) nor (1,-1) is dual to the
/// lattice.
struct LatticeSpec {
  Eigen::Vector2d tau1{0, 0};
  Eigen::Vector2d tau2{0, 0};
  int m_lambda = 0;
  bool admissible = false;

  // Generators as exact rational multiples of pi when recognizable,
  // in the order tau1.x, tau1.y, tau2.x, tau2.y.
  std::optional<std::array<PiRational, 4>> exact;

  /// Lattice points inside [0,2pi)^2, first entry (0,0); size m_lambda.
  const std::vector<Eigen::Vector2d>& cell_points() const { return points_; }

  /// Least distance between two distinct lattice points.
  double min_spacing() const { return min_spacing_; }

  /// Nearest lattice point to mu (in the full lattice, not just the cell).
  Eigen::Vector2d nearest_point(const Eigen::Vector2d& mu) const;

  /// Membership k in dual lattice: k.tau_j in 2pi Z for j=1,2.
  bool dual_contains(const Eigen::Vector2i& k) const;

 private:
  std::vector<Eigen::Vector2d> points_;
  double min_spacing_ = 0;
  friend LatticeSpec make_lattice(const Eigen::Vector2d&, const Eigen::Vector2d&);
};

struct FrequencySet {
  std::vector<Eigen::Vector2i> freqs;  // closed under k -> -k, sorted
  double radius = 0;
};

LatticeSpec make_lattice(const Eigen::Vector2d& tau1, const Eigen::Vector2d& tau2);
LatticeSpec make_lattice(const std::array<PiRational, 4>& generators);

bool is_admissible(const LatticeSpec& spec);

/// All k in Z^2 with |k| <= radius and k dual to the lattice.
FrequencySet dual_frequencies(const LatticeSpec& spec, double radius);

/// Group averaging over G = <translations by tau_j mod 2pi Z^2, mu -> -mu> on
/// a periodic grid field. The translations must map grid points to grid
/// points; otherwise SymmetryActionUndefined is thrown.
TorusField symmetrize(const TorusField& field, const LatticeSpec& spec);

/// Grid shifts realizing the translation subgroup of G on an n-grid (one
/// (si,sj) pair per lattice point of the cell).
std::vector<std::array<int, 2>> grid_shifts(const LatticeSpec& spec, int n);

}  // namespace cmc
