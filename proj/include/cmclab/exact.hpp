#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>

namespace cmc {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// A real number of the form (num/den)*pi, kept exact when possible.
/// Lattice generators are usually rational multiples of pi; admissibility is a
/// congruence property and must not flip under roundoff, so we carry the
/// fraction whenever the input provides one.
struct PiRational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr PiRational() = default;
  PiRational(std::int64_t n, std::int64_t d) : num(n), den(d) { reduce(); }

  void reduce() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den) * kPi; }

  friend PiRational operator+(PiRational a, PiRational b) {
    return PiRational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend PiRational operator-(PiRational a, PiRational b) {
    return PiRational(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend PiRational operator*(std::int64_t k, PiRational a) { return PiRational(k * a.num, a.den); }
  friend bool operator==(PiRational a, PiRational b) { return a.num == b.num && a.den == b.den; }

  /// True iff this value is an integer multiple of 2*pi.
  bool is_multiple_of_2pi() const { return den == 1 && num % 2 == 0; }
};

/// Attempt to recognize x as a rational multiple of pi with small denominator.
/// Returns nullopt if no convincing fraction exists (tolerance 1e-12 relative).
std::optional<PiRational> recognize_pi_rational(double x, std::int64_t max_den = 720);

}  // namespace cmc
