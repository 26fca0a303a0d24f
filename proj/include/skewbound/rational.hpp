#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace skewbound {

// Every time, delay, shift and bound in this library is an exact rational.
// cpp_rational keeps values normalized (reduced, positive denominator), so
// operator== is exact equality and no tolerance appears anywhere.
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

/// Parses "num", "-num" or "num/den" (den > 0). Unreduced input is accepted
/// and normalized; anything else throws std::invalid_argument.
inline Rat parse_rational(const std::string& text) {
  const auto bad = [&] {
    throw std::invalid_argument("not a rational literal: '" + text + "'");
  };
  std::size_t pos = 0;
  if (pos < text.size() && text[pos] == '-') ++pos;
  std::size_t num_begin = pos;
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  if (pos == num_begin) bad();
  const std::string num = text.substr(0, pos);
  if (pos == text.size()) return Rat(Int(num));
  if (text[pos] != '/') bad();
  ++pos;
  std::size_t den_begin = pos;
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  if (pos == den_begin || pos != text.size()) bad();
  const Int den(text.substr(den_begin));
  if (den == 0) throw std::invalid_argument("rational with zero denominator: '" + text + "'");
  return Rat(Int(num), den);
}

/// Canonical text form: "num" when the denominator is 1, otherwise "num/den",
/// always fully reduced.
inline std::string format_rational(const Rat& value) {
  if (denominator(value) == 1) return numerator(value).str();
  return numerator(value).str() + "/" + denominator(value).str();
}

/// Decimal approximation for display only; never used in comparisons.
inline double approx(const Rat& value) { return value.convert_to<double>(); }

}  // namespace skewbound
