#include "tabproc/rational.h"

#include <charconv>
#include <cmath>

#include "tabproc/error.h"

namespace tabproc {

std::string toString(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

namespace {

std::int64_t parseInt(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error("malformed rational '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational parseRational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parseInt(text, text));
  std::int64_t num = parseInt(text.substr(0, slash), text);
  std::int64_t den = parseInt(text.substr(slash + 1), text);
  if (den == 0) throw Error("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

double toDouble(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

Rational rationalFromFloat(float value, std::int64_t maxDenominator) {
  if (!std::isfinite(value)) throw Error("non-finite time stamp");
  for (std::int64_t den = 1; den <= maxDenominator; ++den) {
    double scaled = static_cast<double>(value) * static_cast<double>(den);
    auto num = static_cast<std::int64_t>(std::llround(scaled));
    if (static_cast<float>(static_cast<double>(num) / static_cast<double>(den)) == value) {
      return Rational(num, den);
    }
  }
  int exponent = 0;
  float mantissa = std::frexp(value, &exponent);
  auto bits = static_cast<std::int64_t>(std::ldexp(mantissa, 24));
  exponent -= 24;
  if (exponent >= 0) return Rational(bits * (std::int64_t{1} << exponent));
  if (exponent < -62) throw Error("time stamp too small to represent");
  return Rational(bits, std::int64_t{1} << -exponent);
}

}  // namespace tabproc
