#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace savg {

using Rational = boost::multiprecision::cpp_rational;

/// A real weight that may also carry its exact rational value.
///
/// Weights read as fractions ("2/3") or computed from integer counts keep
/// the exact value; anything that passes through transcendental functions
/// (bisection, sqrt, exp) is decimal only.
struct Weight {
  double value = 1.0;
  std::optional<Rational> exact;

  Weight() = default;
  Weight(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
  explicit Weight(const Rational& r);

  bool isExact() const { return exact.has_value(); }
};

/// Parses "3", "2/3", "0.125" or "1e-3". Fractions and integers are exact.
/// Throws std::invalid_argument on malformed input.
Weight parseWeight(std::string_view text);

double toDouble(const Rational& r);

/// Fraction when the denominator is at most 10^6, else 12 significant digits.
std::string formatRational(const Rational& r);
std::string formatWeight(const Weight& w);
/// Decimal with the given number of significant digits (%.Ng).
std::string formatDecimal(double v, int digits = 12);

}  // namespace savg
