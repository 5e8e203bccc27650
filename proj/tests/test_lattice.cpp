#include <doctest.h>

#include <cmath>
#include <random>

#include "cmclab/errors.hpp"
#include "cmclab/lattice.hpp"

using namespace cmc;

namespace {

// Brute-force count of lattice points in [0,2pi)^2 by scanning integer
// combinations; independent of the cell_points() enumeration order.
int enumerate_cell_count(const Eigen::Vector2d& t1, const Eigen::Vector2d& t2) {
  const double twopi = 2.0 * kPi;
  std::vector<Eigen::Vector2d> found;
  for (int n1 = -24; n1 <= 24; ++n1) {
    for (int n2 = -24; n2 <= 24; ++n2) {
      Eigen::Vector2d p = n1 * t1 + n2 * t2;
      double x = std::fmod(p.x(), twopi);
      double y = std::fmod(p.y(), twopi);
      if (x < -1e-9) x += twopi;
      if (y < -1e-9) y += twopi;
      if (x > twopi - 1e-9) x = 0;
      if (y > twopi - 1e-9) y = 0;
      bool seen = false;
      for (auto& q : found) {
        if (std::abs(q.x() - x) < 1e-9 && std::abs(q.y() - y) < 1e-9) {
          seen = true;
          break;
        }
      }
      if (!seen) found.push_back({x, y});
    }
  }
  return static_cast<int>(found.size());
}

// A point set lies inside {mu1 +- mu2 = 0 mod 2pi} iff the corresponding
// congruence holds at every enumerated point.
bool all_points_on_curve(const LatticeSpec& spec, int sign) {
  for (const auto& p : spec.cell_points()) {
    double v = p.x() + sign * p.y();
    double m = v / (2.0 * kPi);
    if (std::abs(m - std::round(m)) > 1e-9) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("square 2pi lattice: m=1, inadmissible") {
  auto spec = make_lattice(Eigen::Vector2d(2 * kPi, 0), Eigen::Vector2d(0, 2 * kPi));
  CHECK(spec.m_lambda == 1);
  CHECK(enumerate_cell_count(spec.tau1, spec.tau2) == 1);
  CHECK(all_points_on_curve(spec, +1));
  CHECK_FALSE(spec.admissible);
  CHECK_FALSE(is_admissible(spec));
}

TEST_CASE("pi x 2pi lattice: m=2, admissible") {
  auto spec = make_lattice(Eigen::Vector2d(kPi, 0), Eigen::Vector2d(0, 2 * kPi));
  CHECK(spec.m_lambda == 2);
  CHECK(enumerate_cell_count(spec.tau1, spec.tau2) == 2);
  CHECK_FALSE(all_points_on_curve(spec, +1));
  CHECK_FALSE(all_points_on_curve(spec, -1));
  CHECK(spec.admissible);
  // the two points are (0,0) and (pi,0)
  REQUIRE(spec.cell_points().size() == 2);
  CHECK(spec.cell_points()[0].norm() < 1e-12);
  CHECK((spec.cell_points()[1] - Eigen::Vector2d(kPi, 0)).norm() < 1e-9);
}

TEST_CASE("checkerboard lattice (pi,pi),(pi,-pi): m=2, inadmissible") {
  auto spec = make_lattice(Eigen::Vector2d(kPi, kPi), Eigen::Vector2d(kPi, -kPi));
  CHECK(spec.m_lambda == 2);
  CHECK(enumerate_cell_count(spec.tau1, spec.tau2) == 2);
  CHECK(all_points_on_curve(spec, -1));  // mu1 - mu2 = 0 mod 2pi on all points
  CHECK_FALSE(spec.admissible);
}

TEST_CASE("2pi/3 lattice: m=3, admissible") {
  auto spec = make_lattice(Eigen::Vector2d(2 * kPi / 3, 0), Eigen::Vector2d(0, 2 * kPi));
  CHECK(spec.m_lambda == 3);
  CHECK(enumerate_cell_count(spec.tau1, spec.tau2) == 3);
  CHECK(spec.admissible);
}

TEST_CASE("rejects degenerate and non-containing generators") {
  CHECK_THROWS_AS(make_lattice(Eigen::Vector2d(kPi, 0), Eigen::Vector2d(2 * kPi, 0)), NotALattice);
  CHECK_THROWS_AS(make_lattice(Eigen::Vector2d(3.0, 0), Eigen::Vector2d(0, 2 * kPi)),
                  DoesNotContain2PiZ2);
}

TEST_CASE("admissible lattices never contain (1,+-1) in the dual") {
  auto spec = make_lattice(Eigen::Vector2d(kPi, 0), Eigen::Vector2d(0, 2 * kPi));
  CHECK_FALSE(spec.dual_contains({1, 1}));
  CHECK_FALSE(spec.dual_contains({1, -1}));
  // cos(mu1 +- mu2) is not Lambda-periodic: check at a sample point
  bool broken = false;
  for (auto tau : {spec.tau1, spec.tau2}) {
    Eigen::Vector2d mu(0.7, 0.3);
    double before = std::cos(mu.x() + mu.y());
    double after = std::cos(mu.x() + tau.x() + mu.y() + tau.y());
    if (std::abs(after - before) > 0.1) broken = true;
  }
  CHECK(broken);
}

TEST_CASE("dual frequencies") {
  auto z2 = make_lattice(Eigen::Vector2d(2 * kPi, 0), Eigen::Vector2d(0, 2 * kPi));
  auto fs = dual_frequencies(z2, 1.5);
  // dual of 2pi Z^2 is Z^2: 9 points within radius 1.5
  CHECK(fs.freqs.size() == 9);

  auto spec = make_lattice(Eigen::Vector2d(kPi, 0), Eigen::Vector2d(0, 2 * kPi));
  auto fs2 = dual_frequencies(spec, 1.5);
  // k . (pi,0) in 2pi Z forces k1 even: {(0,0),(0,+-1)}
  CHECK(fs2.freqs.size() == 3);
  for (const auto& k : fs2.freqs) CHECK(k.x() % 2 == 0);

  // closed under negation
  for (const auto& k : fs2.freqs) {
    bool has = false;
    for (const auto& q : fs2.freqs)
      if (q == Eigen::Vector2i(-k.x(), -k.y())) has = true;
    CHECK(has);
  }
}

TEST_CASE("symmetrize: projection property and invariance") {
  auto spec = make_lattice(Eigen::Vector2d(kPi, 0), Eigen::Vector2d(0, 2 * kPi));
  const int n = 32;
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> unif(-1, 1);
  TorusField f(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = unif(rng);

  TorusField g = symmetrize(f, spec);
  TorusField g2 = symmetrize(g, spec);
  CHECK((g2.v - g.v).abs().maxCoeff() < 1e-12);

  // invariance under each translation and the involution
  for (const auto& s : grid_shifts(spec, n)) {
    double worst = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(g((i + s[0]) % n, (j + s[1]) % n) - g(i, j)));
    CHECK(worst < 1e-12);
  }
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(g((n - i) % n, (n - j) % n) - g(i, j)));
  CHECK(worst < 1e-12);
}

TEST_CASE("symmetrize kills sin(mu1+mu2)") {
  auto z2 = make_lattice(Eigen::Vector2d(2 * kPi, 0), Eigen::Vector2d(0, 2 * kPi));
  const int n = 32;
  TorusGrid grid{n};
  TorusField f(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = std::sin(grid.mu1(i) + grid.mu2(j));
  TorusField g = symmetrize(f, z2);
  CHECK(g.max_abs() < 1e-12);
}

TEST_CASE("pi-rational recognition") {
  auto r = recognize_pi_rational(2 * kPi / 3);
  REQUIRE(r.has_value());
  CHECK(r->num == 2);
  CHECK(r->den == 3);
  CHECK_FALSE(recognize_pi_rational(1.0).has_value());
}
