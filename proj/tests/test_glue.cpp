#include <doctest.h>

#include <cmath>
#include <memory>

#include "cmclab/errors.hpp"
#include "cmclab/glue.hpp"

using namespace cmc;

namespace {

std::shared_ptr<const GreenFunction> shared_green() {
  static auto g = std::make_shared<GreenFunction>(
      build_green(make_lattice(Eigen::Vector2d(kPi, 0), Eigen::Vector2d(0, 2 * kPi)), 80.0));
  return g;
}

}  // namespace

TEST_CASE("neck scale: defining equations and asymptotics") {
  auto g = shared_green();
  const double gamma = g->gamma();

  for (double a : {0.02, 0.05, 0.1, 0.2}) {
    NeckScale ns = neck_scale(a, gamma);
    CHECK(std::abs(std::sin(std::sqrt(2.0) * ns.t_a) - a) < 1e-14);
    CHECK(std::abs(ns.t_a + ns.epsilon * std::log(ns.epsilon) -
                   ns.epsilon * (gamma + std::log(2.0))) < 1e-12);
  }

  double prev = 0;
  for (double a : {0.01, 0.02, 0.05, 0.1, 0.15, 0.2}) {
    NeckScale ns = neck_scale(a, gamma);
    CHECK(ns.epsilon > prev);
    prev = ns.epsilon;
  }

  // a -> 0: eps log(1/eps) / t_a -> 1
  NeckScale tiny = neck_scale(0.0005, gamma);
  CHECK(std::abs(tiny.epsilon * std::log(1.0 / tiny.epsilon) / tiny.t_a - 1.0) < 0.12);

  // Newton cross-check from an independent starting point
  NeckScale ns = neck_scale(0.05, gamma);
  const double c = gamma + std::log(2.0);
  double e = ns.epsilon * 1.371;
  for (int it = 0; it < 200; ++it) {
    const double F = -e * std::log(e) + c * e - ns.t_a;
    const double dF = -std::log(e) - 1.0 + c;
    e -= F / dF;
  }
  CHECK(std::abs(e - ns.epsilon) < 1e-12 * ns.epsilon + 1e-15);

  CHECK_THROWS_AS(neck_scale(0.5, gamma), ParamOutOfRange);
}

TEST_CASE("transition profile endpoints and mid-annulus mismatch") {
  auto g = shared_green();
  for (double a : {0.02, 0.05, 0.1}) {
    NeckScale ns = neck_scale(a, g->gamma());
    const double se = std::sqrt(ns.epsilon);
    const Eigen::Vector2d dir(std::cos(0.4), std::sin(0.4));

    // outer edge: exactly the Green graph
    Eigen::Vector2d mu = 2.0 * se * dir;
    CHECK(std::abs(transition_profile(mu, ns, *g) - (ns.t_a - ns.epsilon * g->value(mu))) < 1e-14);

    // inner edge: exactly the catenoid graph
    mu = 0.5 * se * dir;
    CHECK(std::abs(transition_profile(mu, ns, *g) -
                   ns.epsilon * std::acosh(mu.norm() / ns.epsilon)) < 1e-14);

    CHECK_THROWS_AS(transition_profile(3.0 * se * dir, ns, *g), OutsideAnnulus);

    // mid-annulus mismatch of the two blended graphs
    double worst = 0;
    for (int k = 0; k <= 20; ++k) {
      const double r = se * (0.5 + 1.5 * k / 20.0);
      mu = r * dir;
      const double blend_gap = std::abs((ns.t_a - ns.epsilon * g->value(mu)) -
                                        ns.epsilon * std::acosh(r / ns.epsilon));
      worst = std::max(worst, blend_gap);
    }
    CHECK(worst <= 5.0 * ns.epsilon * ns.epsilon * std::log(1.0 / se));
  }
}

TEST_CASE("glued mesh: topology, symmetry, weights") {
  auto g = shared_green();
  auto spec = g->lattice();
  MeshResolution res;
  res.n_torus = 48;
  res.n_theta = 24;
  res.n_s = 24;
  SurfaceMesh mesh = build_approximate_surface(0.05, spec, g, res);

  double worst = 0;
  for (const auto& v : mesh.verts) worst = std::max(worst, std::abs(v.pos.norm() - 1.0));
  CHECK(worst < 1e-12);

  CHECK(mesh.euler_characteristic() == 2 - 2 * 3);
  CHECK(genus_check(mesh) == 3);

  // the group acts by vertex permutations (bijective)
  for (const auto& perm : mesh.perms) {
    std::vector<char> hit(mesh.num_vertices(), 0);
    for (int v = 0; v < mesh.num_vertices(); ++v) hit[perm[v]] = 1;
    for (char c : hit) CHECK(c == 1);
  }
  // positions map to positions under the ambient isometries
  {
    // translation by (pi, 0): e^{i pi} z1 = -z1
    const auto& perm = mesh.perms[1];
    double worst_pos = 0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const Eigen::Vector4d& x = mesh.verts[v].pos;
      const Eigen::Vector4d gx(-x(0), -x(1), x(2), x(3));
      worst_pos = std::max(worst_pos, (mesh.verts[perm[v]].pos - gx).norm());
    }
    CHECK(worst_pos < 1e-12);
  }
  {
    // rho: conjugate both circles
    const auto& perm = mesh.perms[spec.m_lambda];
    double worst_pos = 0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const Eigen::Vector4d& x = mesh.verts[v].pos;
      const Eigen::Vector4d gx(x(0), -x(1), x(2), -x(3));
      worst_pos = std::max(worst_pos, (mesh.verts[perm[v]].pos - gx).norm());
    }
    CHECK(worst_pos < 1e-12);
  }

  // symmetrize is a projection onto exactly invariant fields
  Eigen::VectorXd f(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    f(v) = std::sin(3.0 * mesh.verts[v].mu.x()) + 0.25 * mesh.verts[v].mu.y();
  }
  Eigen::VectorXd sf = mesh.symmetrize(f);
  CHECK(mesh.symmetry_defect(sf) < 1e-12);
  CHECK((mesh.symmetrize(sf) - sf).cwiseAbs().maxCoeff() < 1e-12);

  // weights: minimum eps at the waist; equals the chart radius
  Eigen::VectorXd zeta = weight_function(mesh);
  CHECK(std::abs(zeta.minCoeff() - mesh.ns.epsilon) < 0.01 * mesh.ns.epsilon);
  for (int v = 0; v < mesh.num_vertices(); v += 17) {
    const auto& vx = mesh.verts[v];
    const double r = (vx.mu - spec.nearest_point(vx.mu)).norm();
    CHECK(std::abs(zeta(v) - r) < 1e-9);
  }
}

TEST_CASE("genus for the m=3 lattice") {
  auto spec3 = make_lattice(Eigen::Vector2d(2 * kPi / 3, 0), Eigen::Vector2d(0, 2 * kPi));
  auto g3 = std::make_shared<GreenFunction>(build_green(spec3, 130.0));
  MeshResolution res;
  res.n_torus = 48;
  res.n_theta = 16;
  res.n_s = 16;
  SurfaceMesh mesh = build_approximate_surface(0.05, spec3, g3, res);
  CHECK(genus_check(mesh) == 4);
}

TEST_CASE("clifford fixture: two disjoint tori have genus 1 each") {
  auto spec = make_lattice(Eigen::Vector2d(kPi, 0), Eigen::Vector2d(0, 2 * kPi));
  SurfaceMesh t1 = build_clifford_fixture(0.05, spec, 24);
  SurfaceMesh t2 = build_clifford_fixture(-0.05, spec, 24);
  CHECK(t1.euler_characteristic() == 0);
  CHECK(t2.euler_characteristic() == 0);
  CHECK(genus_check(t1) == 1);
  CHECK(genus_check(t2) == 1);
}

TEST_CASE("surface approaches the doubled minimal torus as a -> 0") {
  auto g = shared_green();
  auto spec = g->lattice();
  MeshResolution res;
  res.n_torus = 32;
  res.n_theta = 16;
  res.n_s = 16;
  double prev = 1e300;
  for (double a : {0.1, 0.05, 0.02}) {
    SurfaceMesh mesh = build_approximate_surface(a, spec, g, res);
    double dist = 0;
    for (const auto& v : mesh.verts) {
      if (v.zeta < 0.3) continue;  // outside fixed balls around the lattice points
      ToroidalPoint tp = toroidal_coordinates(v.pos);
      dist = std::max(dist, std::abs(tp.t));
    }
    CHECK(dist < prev);
    prev = dist;
  }
}
