#include "cmclab/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "cmclab/errors.hpp"

namespace cmc {

std::optional<PiRational> recognize_pi_rational(double x, std::int64_t max_den) {
  const double q = x / kPi;
  // continued fraction expansion of q
  double r = q;
  std::int64_t p0 = 0, p1 = 1, q0 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(r);
    std::int64_t a = static_cast<std::int64_t>(fl);
    std::int64_t p2 = a * p1 + p0;
    std::int64_t q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; p1 = p2; q0 = q1; q1 = q2;
    double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::abs(approx - q) < 1e-12 * std::max(1.0, std::abs(q))) {
      return PiRational(p1, q1);
    }
    double frac = r - fl;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

namespace {

// k.tau in 2pi Z, exactly when tau components are rational multiples of pi.
bool dual_condition_exact(const Eigen::Vector2i& k, const PiRational& tx, const PiRational& ty) {
  // k1*tx + k2*ty must be an even multiple of pi.
  PiRational s = static_cast<std::int64_t>(k.x()) * tx + static_cast<std::int64_t>(k.y()) * ty;
  return s.is_multiple_of_2pi();
}

bool dual_condition_approx(const Eigen::Vector2i& k, const Eigen::Vector2d& tau) {
  double s = k.x() * tau.x() + k.y() * tau.y();
  double m = s / (2.0 * kPi);
  return std::abs(m - std::round(m)) < 1e-10;
}

std::optional<std::array<PiRational, 4>> try_exact(const Eigen::Vector2d& t1,
                                                   const Eigen::Vector2d& t2) {
  auto a = recognize_pi_rational(t1.x());
  auto b = recognize_pi_rational(t1.y());
  auto c = recognize_pi_rational(t2.x());
  auto d = recognize_pi_rational(t2.y());
  if (a && b && c && d) return std::array<PiRational, 4>{*a, *b, *c, *d};
  return std::nullopt;
}

}  // namespace

bool LatticeSpec::dual_contains(const Eigen::Vector2i& k) const {
  if (exact) {
    return dual_condition_exact(k, (*exact)[0], (*exact)[1]) &&
           dual_condition_exact(k, (*exact)[2], (*exact)[3]);
  }
  return dual_condition_approx(k, tau1) && dual_condition_approx(k, tau2);
}

LatticeSpec make_lattice(const Eigen::Vector2d& tau1, const Eigen::Vector2d& tau2) {
  const double det = tau1.x() * tau2.y() - tau1.y() * tau2.x();
  const double scale = std::max(tau1.norm(), tau2.norm());
  if (std::abs(det) < 1e-12 * scale * scale) {
    throw NotALattice("generators are linearly dependent");
  }

  // 2pi Z^2 subset Lambda: both (2pi,0) and (0,2pi) are integer combinations.
  Eigen::Matrix2d T;
  T.col(0) = tau1;
  T.col(1) = tau2;
  Eigen::Matrix2d Tinv = T.inverse();
  for (int e = 0; e < 2; ++e) {
    Eigen::Vector2d v = Eigen::Vector2d::Zero();
    v(e) = 2.0 * kPi;
    Eigen::Vector2d n = Tinv * v;
    if (std::abs(n.x() - std::round(n.x())) > 1e-12 ||
        std::abs(n.y() - std::round(n.y())) > 1e-12) {
      throw DoesNotContain2PiZ2("2pi e_" + std::to_string(e + 1) +
                                " is not an integer combination of the generators");
    }
  }

  const double m_real = (2.0 * kPi) * (2.0 * kPi) / std::abs(det);
  const int m = static_cast<int>(std::round(m_real));
  if (std::abs(m_real - m) > 1e-9 || m < 1) {
    throw NotALattice("cell count (2pi)^2/|det| is not a positive integer");
  }

  LatticeSpec spec;
  spec.tau1 = tau1;
  spec.tau2 = tau2;
  spec.m_lambda = m;
  spec.exact = try_exact(tau1, tau2);
  spec.admissible = !spec.dual_contains({1, 1}) && !spec.dual_contains({1, -1});

  // enumerate and cache the cell points and the least spacing
  const double twopi = 2.0 * kPi;
  auto reduce = [&](double x) {
    double y = std::fmod(x, twopi);
    if (y < 0) y += twopi;
    if (twopi - y < 1e-9) y = 0.0;
    return y;
  };
  // The quotient Lambda / 2pi Z^2 has order m_lambda; coefficients in
  // [0, m_lambda] reach every coset.
  for (int n1 = 0; n1 <= m; ++n1) {
    for (int n2 = 0; n2 <= m; ++n2) {
      Eigen::Vector2d p = n1 * tau1 + n2 * tau2;
      Eigen::Vector2d q(reduce(p.x()), reduce(p.y()));
      bool seen = false;
      for (const auto& r : spec.points_) {
        if ((r - q).norm() < 1e-9) {
          seen = true;
          break;
        }
      }
      if (!seen) spec.points_.push_back(q);
    }
  }
  std::sort(spec.points_.begin(), spec.points_.end(), [](const auto& a, const auto& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  for (std::size_t i = 0; i < spec.points_.size(); ++i) {
    if (spec.points_[i].norm() < 1e-9) {
      std::swap(spec.points_[0], spec.points_[i]);
      break;
    }
  }
  double best = std::numeric_limits<double>::max();
  for (const auto& p : spec.points_) {
    for (int a2 = -1; a2 <= 1; ++a2) {
      for (int b2 = -1; b2 <= 1; ++b2) {
        Eigen::Vector2d q = p + Eigen::Vector2d(a2 * twopi, b2 * twopi);
        double d = q.norm();
        if (d > 1e-9) best = std::min(best, d);
      }
    }
  }
  spec.min_spacing_ = best;
  return spec;
}

LatticeSpec make_lattice(const std::array<PiRational, 4>& g) {
  Eigen::Vector2d t1(g[0].value(), g[1].value());
  Eigen::Vector2d t2(g[2].value(), g[3].value());
  LatticeSpec spec = make_lattice(t1, t2);
  spec.exact = g;
  spec.admissible = !spec.dual_contains({1, 1}) && !spec.dual_contains({1, -1});
  return spec;
}

bool is_admissible(const LatticeSpec& spec) { return spec.admissible; }

Eigen::Vector2d LatticeSpec::nearest_point(const Eigen::Vector2d& mu) const {
  // Reduce in the 2pi cell, then compare against cell points and their
  // immediate periodic images.
  const double twopi = 2.0 * kPi;
  Eigen::Vector2d base(std::floor(mu.x() / twopi) * twopi, std::floor(mu.y() / twopi) * twopi);
  Eigen::Vector2d rem = mu - base;
  double best = std::numeric_limits<double>::max();
  Eigen::Vector2d arg = Eigen::Vector2d::Zero();
  for (const auto& p : cell_points()) {
    for (int a = -1; a <= 1; ++a) {
      for (int b = -1; b <= 1; ++b) {
        Eigen::Vector2d q = p + Eigen::Vector2d(a * twopi, b * twopi);
        double d = (rem - q).norm();
        if (d < best) {
          best = d;
          arg = base + q;
        }
      }
    }
  }
  return arg;
}

FrequencySet dual_frequencies(const LatticeSpec& spec, double radius) {
  FrequencySet out;
  out.radius = radius;
  const int R = static_cast<int>(std::floor(radius));
  for (int k1 = -R; k1 <= R; ++k1) {
    for (int k2 = -R; k2 <= R; ++k2) {
      if (k1 * k1 + k2 * k2 > radius * radius) continue;
      Eigen::Vector2i k(k1, k2);
      if (spec.dual_contains(k)) out.freqs.push_back(k);
    }
  }
  std::sort(out.freqs.begin(), out.freqs.end(), [](const auto& a, const auto& b) {
    int na = a.squaredNorm(), nb = b.squaredNorm();
    if (na != nb) return na < nb;
    if (a.x() != b.x()) return a.x() < b.x();
    return a.y() < b.y();
  });
  return out;
}

std::vector<std::array<int, 2>> grid_shifts(const LatticeSpec& spec, int n) {
  std::vector<std::array<int, 2>> shifts;
  for (const auto& p : spec.cell_points()) {
    double si = p.x() * n / (2.0 * kPi);
    double sj = p.y() * n / (2.0 * kPi);
    if (std::abs(si - std::round(si)) > 1e-9 || std::abs(sj - std::round(sj)) > 1e-9) {
      throw SymmetryActionUndefined("lattice translation does not map the " + std::to_string(n) +
                                    "-grid to itself");
    }
    int i = static_cast<int>(std::round(si)) % n;
    int j = static_cast<int>(std::round(sj)) % n;
    shifts.push_back({(i + n) % n, (j + n) % n});
  }
  return shifts;
}

TorusField symmetrize(const TorusField& field, const LatticeSpec& spec) {
  const int n = field.n;
  auto shifts = grid_shifts(spec, n);
  TorusField acc(n);
  for (const auto& s : shifts) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        int ii = (i + s[0]) % n;
        int jj = (j + s[1]) % n;
        // average f(mu + p) and f(-mu - p): translation and the involution
        acc(i, j) += field(ii, jj) + field((n - ii) % n, (n - jj) % n);
      }
    }
  }
  acc.v /= 2.0 * shifts.size();
  return acc;
}

}  // namespace cmc
