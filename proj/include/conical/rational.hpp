#pragma once

// Exact rational scalars. Everything in the library computes over these;
// no floating point enters the core.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace conical {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Parses "p", "-p" or "p/q". Used by the file formats; whitespace not allowed.
inline Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("rat_from_string: empty string");
  Rat r;
  if (r.set_str(s, 10) != 0)
    throw std::invalid_argument("rat_from_string: bad rational '" + s + "'");
  r.canonicalize();
  if (r.get_den() == 0)
    throw std::invalid_argument("rat_from_string: zero denominator in '" + s + "'");
  return r;
}

// "p/q", or just "p" when q == 1.
inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline Rat rat_pow(const Rat& base, int exp) {
  if (exp < 0) {
    if (base == 0) throw std::domain_error("rat_pow: zero base, negative exponent");
    return rat_pow(1 / base, -exp);
  }
  Rat acc = 1, b = base;
  while (exp > 0) {
    if (exp & 1) acc *= b;
    b *= b;
    exp >>= 1;
  }
  return acc;
}

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline double rat_to_double(const Rat& r) { return r.get_d(); }

}  // namespace conical
