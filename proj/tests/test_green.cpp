#include <doctest.h>

#include <cmath>
#include <random>

#include "cmclab/errors.hpp"
#include "cmclab/green.hpp"

using namespace cmc;

namespace {

LatticeSpec pi_lattice() {
  return make_lattice(Eigen::Vector2d(kPi, 0), Eigen::Vector2d(0, 2 * kPi));
}

}  // namespace

TEST_CASE("build rejects inadmissible lattice and tiny truncation") {
  auto bad = make_lattice(Eigen::Vector2d(kPi, kPi), Eigen::Vector2d(kPi, -kPi));
  CHECK_THROWS_AS(build_green(bad, 60.0), InadmissibleLattice);
  CHECK_THROWS_AS(build_green(pi_lattice(), 10.0), TruncationTooSmall);
}

TEST_CASE("evenness and periodicity") {
  auto g = build_green(pi_lattice(), 60.0);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(0.0, 2 * kPi);
  double worst_even = 0, worst_per = 0;
  int used = 0;
  for (int k = 0; used < 100 && k < 1000; ++k) {
    Eigen::Vector2d mu(unif(rng), unif(rng));
    if ((mu - g.lattice().nearest_point(mu)).norm() < 0.05) continue;
    ++used;
    worst_even = std::max(worst_even, std::abs(g.value(-mu) - g.value(mu)));
    for (auto tau : {g.lattice().tau1, g.lattice().tau2}) {
      worst_per = std::max(worst_per, std::abs(g.value(mu + tau) - g.value(mu)));
    }
  }
  CHECK(worst_even < 1e-10);
  CHECK(worst_per < 1e-10);
}

TEST_CASE("log slope is exactly -1 and remainder exponent >= 1.5") {
  auto g = build_green(pi_lattice(), 60.0);
  // fit Gamma against -log r over r in [1e-3, 1e-2]
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int i = 0; i < 40; ++i) {
    const double r = 1e-3 * std::pow(10.0, i / 39.0);
    const Eigen::Vector2d mu(r * std::cos(0.7), r * std::sin(0.7));
    const double x = -std::log(r), y = g.value(mu);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++cnt;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  CHECK(std::abs(slope - 1.0) < 1e-3);

  // remainder Gamma + log r - gamma decays at least like r^{1.5}
  const double gam = g.gamma();
  double e1 = std::abs(g.value({1e-2, 0.37e-2}) + std::log(std::hypot(1e-2, 0.37e-2)) - gam);
  double e2 = std::abs(g.value({1e-3, 0.37e-3}) + std::log(std::hypot(1e-3, 0.37e-3)) - gam);
  const double fitted_exponent = std::log(e1 / e2) / std::log(10.0);
  CHECK(fitted_exponent >= 1.5);
}

TEST_CASE("gamma: fit windows, truncation stability, direct value") {
  auto g60 = build_green(pi_lattice(), 60.0);
  auto g120 = build_green(pi_lattice(), 120.0);
  CHECK(std::abs(g60.gamma() - g120.gamma()) < 1e-6);

  auto fit = gamma_constant(g60);
  CHECK(std::abs(fit.gamma - g60.gamma()) < 1e-5);
  auto fit_lo = gamma_constant(g60, 1e-3, 1e-2);
  auto fit_hi = gamma_constant(g60, 1e-2, 1e-1);
  CHECK(std::abs(fit_lo.gamma - fit_hi.gamma) < 1e-5);
}

TEST_CASE("gamma is even under lattice reflection") {
  // the rho-reflected lattice is generated by -tau1, -tau2: same lattice here,
  // use the reordered generators to exercise a different construction path
  auto g1 = build_green(pi_lattice(), 60.0);
  auto spec2 = make_lattice(Eigen::Vector2d(-kPi, 0), Eigen::Vector2d(0, -2 * kPi));
  auto g2 = build_green(spec2, 60.0);
  CHECK(std::abs(g1.gamma() - g2.gamma()) < 1e-9);
}

TEST_CASE("FD residual of L Gamma away from the lattice") {
  auto g = build_green(pi_lattice(), 60.0);
  // second-order convergence of the 5-point residual at distance > 0.3
  auto residual = [&](const Eigen::Vector2d& mu, double h) {
    const double lap = (g.value({mu.x() + h, mu.y()}) + g.value({mu.x() - h, mu.y()}) +
                        g.value({mu.x(), mu.y() + h}) + g.value({mu.x(), mu.y() - h}) -
                        4.0 * g.value(mu)) /
                       (h * h);
    return 2.0 * lap + 4.0 * g.value(mu);
  };
  const Eigen::Vector2d far(1.3, 1.9);  // distance ~ 1.5 from the lattice
  CHECK(std::abs(residual(far, 0.02)) < 10.0 * 0.02 * 0.02);
  const Eigen::Vector2d nearer(0.25, 0.21);  // distance ~ 0.33
  const double r1 = residual(nearer, 0.02), r2 = residual(nearer, 0.01);
  CHECK(std::abs(r1 / r2) > 3.0);  // order 2
  CHECK(std::abs(r1 / r2) < 5.0);
  CHECK(std::abs(r1) < 400.0 * 0.02 * 0.02);
}

TEST_CASE("analytic gradient and hessian match finite differences") {
  auto g = build_green(pi_lattice(), 60.0);
  const Eigen::Vector2d mu(0.9, 1.4);
  const double h = 1e-5;
  double v;
  Eigen::Vector2d grad;
  Eigen::Matrix2d hess;
  g.jet(mu, v, grad, hess);
  CHECK(std::abs(v - g.value(mu)) < 1e-14);
  Eigen::Vector2d fd_grad((g.value({mu.x() + h, mu.y()}) - g.value({mu.x() - h, mu.y()})) / (2 * h),
                          (g.value({mu.x(), mu.y() + h}) - g.value({mu.x(), mu.y() - h})) / (2 * h));
  CHECK((grad - fd_grad).norm() < 1e-8);
  // hessian against centered differences of the analytic gradient
  Eigen::Vector2d gp = g.gradient({mu.x() + h, mu.y()});
  Eigen::Vector2d gm = g.gradient({mu.x() - h, mu.y()});
  Eigen::Vector2d col0 = (gp - gm) / (2 * h);
  gp = g.gradient({mu.x(), mu.y() + h});
  gm = g.gradient({mu.x(), mu.y() - h});
  Eigen::Vector2d col1 = (gp - gm) / (2 * h);
  CHECK(std::abs(hess(0, 0) - col0(0)) < 1e-6);
  CHECK(std::abs(hess(0, 1) - col0(1)) < 1e-6);
  CHECK(std::abs(hess(1, 1) - col1(1)) < 1e-6);
}

TEST_CASE("green_field: sampling, symmetry, expansion value") {
  auto spec = pi_lattice();
  auto g = build_green(spec, 60.0);
  const int n = 64;
  TorusField f = green_field(g, n);

  // a sampling whose cell centers hit a lattice point is rejected:
  // the pi/2 lattice has a point at pi/2 = (2.5) * (2pi/10)
  // a skew lattice with a point at 2pi(0.2, 0.4), close to a 4-grid center
  auto spec5 = make_lattice(Eigen::Vector2d(2 * kPi / 5, 4 * kPi / 5), Eigen::Vector2d(0, 2 * kPi));
  auto g5 = build_green(spec5, 100.0);
  CHECK_THROWS_AS(green_field(g5, 4), SingularitySampled);

  // minimum far from the lattice points: at least 0.3 away
  const double h = 2.0 * kPi / n;
  double best = 1e300;
  Eigen::Vector2d arg;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (f(i, j) < best) {
        best = f(i, j);
        arg = {(i + 0.5) * h, (j + 0.5) * h};
      }
    }
  }
  CHECK((arg - spec.nearest_point(arg)).norm() > 0.3);

  // expansion near r = 1e-2
  const double r = 1e-2;
  CHECK(std::abs(g.value({r, 0}) - (-std::log(r) + g.gamma())) < 1e-3);

  // Lambda-periodic and even up to the grid symmetry that exists for odd n:
  // check G-invariance pointwise through evaluations instead
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.3, 2.8);
  for (int k = 0; k < 20; ++k) {
    Eigen::Vector2d mu(unif(rng), unif(rng));
    CHECK(std::abs(g.value(mu + spec.tau1) - g.value(mu)) < 1e-10);
    CHECK(std::abs(g.value(-mu) - g.value(mu)) < 1e-10);
  }
}

TEST_CASE("distributional mass per lattice point (normalization record)") {
  // The expansion pins the -log coefficient to 1; the measured coordinate
  // delta mass of L Gamma is then -4pi per lattice point.
  auto g = build_green(pi_lattice(), 60.0);
  const int n = 512;
  const double h = 2.0 * kPi / n;
  double mass = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2d mu((i + 0.5) * h, (j + 0.5) * h);  // staggered, avoids singularities
      if ((mu - Eigen::Vector2d(0, 0)).norm() > 0.7 && (mu - Eigen::Vector2d(kPi, 0)).norm() > 0.7 &&
          (mu - Eigen::Vector2d(2 * kPi, 0)).norm() > 0.7 &&
          (mu - Eigen::Vector2d(0, 2 * kPi)).norm() > 0.7 &&
          (mu - Eigen::Vector2d(2 * kPi, 2 * kPi)).norm() > 0.7 &&
          (mu - Eigen::Vector2d(kPi, 2 * kPi)).norm() > 0.7)
        continue;
      const double lap = (g.value({mu.x() + h, mu.y()}) + g.value({mu.x() - h, mu.y()}) +
                          g.value({mu.x(), mu.y() + h}) + g.value({mu.x(), mu.y() - h}) -
                          4.0 * g.value(mu)) /
                         (h * h);
      mass += (2.0 * lap + 4.0 * g.value(mu)) * h * h;
    }
  }
  // two lattice points in the cell; remainder of the integrand away from the
  // bumps contributes the 4*Gamma part which we add back over the full cell
  // -> measure only near the points: mass within the disks approximates
  // -4pi * 2 plus the smooth part integral over the disks (small)
  CHECK(mass / 2.0 == doctest::Approx(-4.0 * kPi).epsilon(0.02));
}
