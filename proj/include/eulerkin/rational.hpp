#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "eulerkin/error.hpp"

namespace eulerkin {

using Integer = boost::multiprecision::cpp_int;

// Arbitrary-precision rational scalar. Always stored reduced with positive
// denominator; equality of values is equality of representations.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// Safe construction from a possibly negative or unreduced pair. The raw
// two-argument constructor rejects negative denominators.
inline Rational make_rational(Integer p, Integer q) {
  if (q == 0) fail(ErrorCode::ParseError, "zero denominator");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  return Rational(p, q);
}

inline int sign(const Rational& x) { return x.sign(); }

// Serializes as "p" for integers and "p/q" otherwise.
inline std::string to_string(const Rational& x) {
  std::string s = numerator(x).str();
  if (denominator(x) != 1) {
    s += '/';
    s += denominator(x).str();
  }
  return s;
}

// Accepts "p" or "p/q" with optional leading '-' on p; q must be positive.
inline Rational parse_rational(const std::string& s) {
  auto bad = [&]() -> Rational {
    fail(ErrorCode::ParseError, "not a rational: '" + s + "'");
  };
  if (s.empty()) return bad();
  size_t slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  auto digits_ok = [](const std::string& t, bool allow_sign) {
    if (t.empty()) return false;
    size_t i = allow_sign && (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  if (!digits_ok(num, true) || !digits_ok(den, false)) return bad();
  Integer p(num), q(den);
  if (q == 0) return bad();
  return Rational(p, q);
}

}  // namespace eulerkin
