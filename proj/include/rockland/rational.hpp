#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace rockland {

/// Exact rational number, always canonical (lowest terms, positive denominator).
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational canonical(Rational r) {
  r.canonicalize();
  return r;
}

/// Parses "p", "-p" or "p/q".
inline Rational parse_rational(const std::string& text) {
  Rational r;
  if (r.set_str(text, 10) != 0) throw std::invalid_argument("not a rational number: " + text);
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
  r.canonicalize();
  return r;
}

/// Serializes as "p" or "p/q".
inline std::string to_string(const Rational& r) { return r.get_str(10); }

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational rational_pow(const Rational& base, unsigned e) {
  Rational out(1);
  Rational b = base;
  while (e) {
    if (e & 1u) out *= b;
    e >>= 1u;
    if (e) b *= b;
  }
  return out;
}

inline Rational factorial(unsigned k) {
  Integer f = 1;
  for (unsigned i = 2; i <= k; ++i) f *= i;
  return Rational(f);
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

}  // namespace rockland
