#include "savg/numeric.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace savg {

Weight::Weight(const Rational& r) : value(toDouble(r)), exact(r) {}

double toDouble(const Rational& r) { return r.convert_to<double>(); }

namespace {

bool isInteger(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

boost::multiprecision::cpp_int parseInteger(std::string_view s) {
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  return boost::multiprecision::cpp_int(std::string(s));
}

}  // namespace

Weight parseWeight(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty weight");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!isInteger(num) || !isInteger(den))
      throw std::invalid_argument("malformed fraction '" + std::string(text) + "'");
    auto d = parseInteger(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Weight(Rational(parseInteger(num), d));
  }
  if (isInteger(text)) return Weight(Rational(parseInteger(text)));

  std::string owned(text);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(owned, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed number '" + owned + "'");
  }
  if (used != owned.size()) throw std::invalid_argument("malformed number '" + owned + "'");
  return Weight(v);
}

std::string formatDecimal(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string formatRational(const Rational& r) {
  const auto den = boost::multiprecision::denominator(r);
  if (den <= 1000000) {
    if (den == 1) return boost::multiprecision::numerator(r).str();
    return boost::multiprecision::numerator(r).str() + "/" + den.str();
  }
  return formatDecimal(toDouble(r));
}

std::string formatWeight(const Weight& w) {
  return w.exact ? formatRational(*w.exact) : formatDecimal(w.value);
}

}  // namespace savg
