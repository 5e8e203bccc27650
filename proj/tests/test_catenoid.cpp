#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cmclab/catenoid.hpp"
#include "cmclab/errors.hpp"
#include "cmclab/exact.hpp"

using namespace cmc;

TEST_CASE("catenoid immersion") {
  CHECK((catenoid_immersion(1.0, 0, 0) - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
  Eigen::Vector3d p = catenoid_immersion(0.01, 3.0, kPi / 2);
  CHECK(std::abs(p(0)) < 1e-15);
  CHECK(std::abs(p(1) - 0.01 * std::cosh(3.0)) < 1e-15);
  CHECK(std::abs(p(2) - 0.03) < 1e-15);
  // radial distance is eps cosh s
  Eigen::Vector3d q = catenoid_immersion(0.2, -1.3, 0.4);
  CHECK(std::abs(std::hypot(q(0), q(1)) - 0.2 * std::cosh(1.3)) < 1e-14);
  CHECK_THROWS_AS(catenoid_immersion(-1.0, 0, 0), ParamOutOfRange);
}

TEST_CASE("induced metric is eps^2 cosh^2 s (ds^2 + dtheta^2)") {
  const double eps = 0.05, h = 1e-5;
  for (double s : {-1.2, 0.0, 2.0}) {
    for (double th : {0.3, 2.0}) {
      Eigen::Vector3d ds =
          (catenoid_immersion(eps, s + h, th) - catenoid_immersion(eps, s - h, th)) / (2 * h);
      Eigen::Vector3d dt =
          (catenoid_immersion(eps, s, th + h) - catenoid_immersion(eps, s, th - h)) / (2 * h);
      const double factor = eps * eps * std::cosh(s) * std::cosh(s);
      CHECK(std::abs(ds.squaredNorm() - factor) < 1e-7);
      CHECK(std::abs(dt.squaredNorm() - factor) < 1e-7);
      CHECK(std::abs(ds.dot(dt)) < 1e-8);
    }
  }
}

TEST_CASE("explicit Jacobi fields annihilated to O(h^2)") {
  CatenoidChart chart;
  chart.epsilon = 0.05;
  chart.s_max = 3.0;
  chart.n_s = 300;  // h = 0.02
  chart.n_theta = 16;
  const double h = chart.hs();

  ChartField f1(chart.n_s + 1, chart.n_theta), f2(chart.n_s + 1, chart.n_theta);
  for (int i = 0; i <= chart.n_s; ++i) {
    const double s = chart.s(i);
    for (int j = 0; j < chart.n_theta; ++j) {
      f1(i, j) = std::tanh(s);
      f2(i, j) = s * std::tanh(s) - 1.0;
    }
  }
  // the residual bound 10 h^2 refers to the flat operator (eps^2 cosh^2 s) L
  for (auto* f : {&f1, &f2}) {
    ChartField r = catenoid_jacobi_apply(chart, *f);
    double worst = 0;
    for (int i = 1; i < chart.n_s; ++i) {
      const double cs = std::cosh(chart.s(i));
      for (int j = 0; j < chart.n_theta; ++j) {
        worst =
            std::max(worst, std::abs(r(i, j)) * chart.epsilon * chart.epsilon * cs * cs);
      }
    }
    CHECK(worst < 10.0 * h * h);
  }

  // constant: L 1 = 2 / (eps^2 cosh^4 s)
  ChartField one(chart.n_s + 1, chart.n_theta);
  one.v.setConstant(1.0);
  ChartField r = catenoid_jacobi_apply(chart, one);
  for (int i = 1; i < chart.n_s; ++i) {
    const double cs = std::cosh(chart.s(i));
    const double expected = 2.0 / (chart.epsilon * chart.epsilon * cs * cs * cs * cs);
    CHECK(std::abs(r(i, 8) - expected) < 1e-9 / (chart.epsilon * chart.epsilon));
  }
}

TEST_CASE("mode ODE: growth exponents +-2j and no decaying shooting solution") {
  // data along the leftward-growing direction so one mode dominates each end
  auto sol = catenoid_mode_solve(1, 6.0, {1.0, -2.0});
  CHECK(std::abs(std::abs(sol.exponent_left) - 2.0) < 0.05);
  CHECK(std::abs(std::abs(sol.exponent_right) - 2.0) < 0.05);

  auto sol2 = catenoid_mode_solve(2, 6.0, {1.0, -4.0});
  CHECK(std::abs(std::abs(sol2.exponent_left) - 4.0) < 0.1);
  CHECK(std::abs(std::abs(sol2.exponent_right) - 4.0) < 0.1);

  // shooting: start decaying on the left (a' = 2j a), scan nearby slopes; the
  // decay mismatch at the right end never vanishes
  const int j = 1;
  const double S = 5.0;
  double min_mismatch = 1e300;
  for (int k = 0; k < 40; ++k) {
    const double a0 = 1e-4;
    const double da = 2.0 * j * a0 * (1.0 + 0.02 * (k - 20) / 20.0);
    auto s = catenoid_mode_solve(j, S, {a0, da});
    const std::size_t n = s.a.size();
    const double aN = s.a[n - 1];
    const double aN1 = s.a[n - 2];
    const double ds = s.s[n - 1] - s.s[n - 2];
    const double deriv = (aN - aN1) / ds;
    const double scale = std::abs(*std::max_element(
        s.a.begin(), s.a.end(), [](double x, double y) { return std::abs(x) < std::abs(y); }));
    const double mismatch = std::abs(deriv + 2.0 * j * aN) / scale;
    min_mismatch = std::min(min_mismatch, mismatch);
  }
  CHECK(min_mismatch > 1e-4);
}

TEST_CASE("deficiency basis values and symmetry") {
  CatenoidChart chart;
  chart.epsilon = 0.02;
  chart.s_max = 4.0;
  chart.n_s = 200;
  chart.n_theta = 16;
  auto basis = deficiency_basis(chart);
  for (int i = 0; i <= chart.n_s; ++i) {
    const double s = chart.s(i);
    if (s > 1.0) {
      CHECK(basis.ftilde0_1(i, 0) == doctest::Approx(std::tanh(s)).epsilon(1e-14));
    }
    if (s < -1.0) {
      CHECK(basis.ftilde0_1(i, 0) == doctest::Approx(-std::tanh(s)).epsilon(1e-14));
      CHECK(basis.ftilde0_2(i, 0) == doctest::Approx(-(s * std::tanh(s) - 1.0)).epsilon(1e-14));
    }
  }
  // f0_2(0) = -1
  int mid = chart.n_s / 2;
  CHECK(basis.f0_2(mid, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  // theta -> theta + pi invariance (fields are theta-independent)
  const int half = chart.n_theta / 2;
  for (int j = 0; j < chart.n_theta; ++j) {
    CHECK(basis.ftilde0_2(3, j) == basis.ftilde0_2(3, (j + half) % chart.n_theta));
  }
}

TEST_CASE("neck solve with deficiency") {
  CatenoidChart chart;
  chart.epsilon = 0.01;
  chart.s_max = 5.0;
  chart.n_s = 500;
  chart.n_theta = 32;
  const double gamma = -0.2;

  SUBCASE("zero input") {
    ChartField z(chart.n_s + 1, chart.n_theta);
    auto res = neck_solve_with_deficiency(chart, z, gamma);
    CHECK(res.v.v.abs().maxCoeff() < 1e-14);
    CHECK(std::abs(res.p1) < 1e-14);
    CHECK(std::abs(res.p2) < 1e-14);
  }

  SUBCASE("recovers the cut-tanh coefficient") {
    // f = L(chi * tanh s): the solution decomposes with p1 = 1/2, p2 = 0
    ChartField u(chart.n_s + 1, chart.n_theta);
    for (int i = 0; i <= chart.n_s; ++i) {
      const double s = chart.s(i);
      for (int j = 0; j < chart.n_theta; ++j) u(i, j) = chi_cutoff(s) * std::tanh(s);
    }
    ChartField f = catenoid_jacobi_apply(chart, u);
    for (int j = 0; j < chart.n_theta; ++j) f(0, j) = f(chart.n_s, j) = 0;
    auto res = neck_solve_with_deficiency(chart, f, gamma);
    CHECK(std::abs(res.p1 - 0.5) < 0.025);
    CHECK(std::abs(res.p2) < 0.01);
    CHECK(res.residual_rel < 1e-10);
  }

  SUBCASE("random symmetric input: estimate shape and residual") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unif(-1, 1);
    ChartField f(chart.n_s + 1, chart.n_theta);
    double c[3][5];
    for (auto& row : c)
      for (auto& x : row) x = unif(rng);
    for (int i = 0; i <= chart.n_s; ++i) {
      const double s = chart.s(i);
      const double env = std::exp(-0.5 * s * s);
      for (int j = 0; j < chart.n_theta; ++j) {
        const double th = chart.theta(j);
        double val = 0;
        for (int m = 0; m < 3; ++m)
          for (int q = 0; q < 5; ++q)
            val += c[m][q] * std::cos(2 * m * th + 0.3 * q) * std::cos(0.7 * q * s);
        f(i, j) = env * val;
      }
    }
    auto res = neck_solve_with_deficiency(chart, f, gamma);
    CHECK(res.residual_rel < 1e-10);

    auto weight = [&](int i) { return chart.epsilon * std::cosh(chart.s(i)); };
    double nv = 0, nf = 0;
    for (int i = 0; i <= chart.n_s; ++i) {
      for (int j = 0; j < chart.n_theta; ++j) {
        nv = std::max(nv, std::pow(weight(i), -gamma) * std::abs(res.v(i, j)));
        nf = std::max(nf, std::pow(weight(i), -(gamma - 2)) * std::abs(f(i, j)));
      }
    }
    const double lhs = nv + std::pow(chart.epsilon, -gamma) * (std::abs(res.p1) + std::abs(res.p2));
    CHECK(lhs < 100.0 * nf);
  }
}

TEST_CASE("symmetric discrete kernel dimension is exactly 2") {
  // mode 0: interior collocation rectangle has nullity 2 (both homogeneous
  // solutions grow slower than cosh^2); modes m >= 2 with decay closures have
  // none. Count singular values below 1e-6 * ||A||.
  const double S = 4.0;
  const int N = 200;
  const double h = 2.0 * S / N;
  auto potential = [&](int i) {
    const double s = -S + i * h;
    return 2.0 / (std::cosh(s) * std::cosh(s));
  };

  int total_null = 0;
  for (int m = 0; m <= 6; m += 2) {
    if (m == 0) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N - 1, N + 1);
      for (int i = 1; i < N; ++i) {
        A(i - 1, i - 1) = 1.0 / (h * h);
        A(i - 1, i) = -2.0 / (h * h) + potential(i);
        A(i - 1, i + 1) = 1.0 / (h * h);
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
      const auto& sv = svd.singularValues();
      // rectangular: nullity = cols - rank
      int rank = 0;
      for (int i = 0; i < sv.size(); ++i)
        if (sv(i) >= 1e-6 * sv(0)) ++rank;
      total_null += (N + 1) - rank;
    } else {
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + 1, N + 1);
      for (int i = 1; i < N; ++i) {
        A(i, i - 1) = 1.0 / (h * h);
        A(i, i) = -2.0 / (h * h) - m * m + potential(i);
        A(i, i + 1) = 1.0 / (h * h);
      }
      A(0, 0) = -3.0 / (2 * h) - m;
      A(0, 1) = 4.0 / (2 * h);
      A(0, 2) = -1.0 / (2 * h);
      A(N, N) = 3.0 / (2 * h) + m;
      A(N, N - 1) = -4.0 / (2 * h);
      A(N, N - 2) = 1.0 / (2 * h);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
      const auto& sv = svd.singularValues();
      for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) < 1e-6 * sv(0)) ++total_null;
      }
    }
  }
  CHECK(total_null == 2);
}
