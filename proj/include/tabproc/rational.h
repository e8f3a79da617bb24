// Exact rational arithmetic for onsets and durations.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

// Boost 1.74 compares rationals with integers through an operator template
// that C++20 rewrites into a call to itself, recursing until the stack runs
// out. These exact-match overloads take precedence over that template.
namespace boost {

#define TABPROC_RATIONAL_INT_EQ(Int)                                                              \
  inline bool operator==(const rational<std::int64_t>& r, Int i) {                                \
    return r.denominator() == 1 && r.numerator() == static_cast<std::int64_t>(i);                 \
  }                                                                                               \
  inline bool operator==(Int i, const rational<std::int64_t>& r) { return r == i; }               \
  inline bool operator!=(const rational<std::int64_t>& r, Int i) { return !(r == i); }            \
  inline bool operator!=(Int i, const rational<std::int64_t>& r) { return !(r == i); }

TABPROC_RATIONAL_INT_EQ(int)
TABPROC_RATIONAL_INT_EQ(long)
TABPROC_RATIONAL_INT_EQ(long long)

#undef TABPROC_RATIONAL_INT_EQ

}  // namespace boost

namespace tabproc {

/// Durations and onsets in quarter notes (quarter = 1).
using Rational = boost::rational<std::int64_t>;

/// "3/2", or "2" when the denominator is 1.
std::string toString(const Rational& r);

/// Inverse of toString. Throws Error on malformed text or zero denominator.
Rational parseRational(std::string_view text);

double toDouble(const Rational& r);

/// Recovers the exact rational a float32 time stamp was produced from.
///
/// Searches fractions with denominator up to maxDenominator whose float32
/// image equals `value` bit-for-bit; when none exists the exact binary
/// fraction of the float is returned.
Rational rationalFromFloat(float value, std::int64_t maxDenominator = 1920);

}  // namespace tabproc
