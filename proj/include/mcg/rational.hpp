#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mcg {

// Exact rational scalar. mpq_class keeps values in lowest terms with a
// positive denominator as long as every value is produced by arithmetic or
// canonicalized on entry; rat_parse is the only raw entry point.
using Rational = mpq_class;

inline std::string rat_str(const Rational& r) {
  return r.get_str();  // "p" when the denominator is 1, else "p/q"
}

inline Rational rat_parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  mpq_class r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  r.canonicalize();
  return r;
}

inline bool rat_is_integer(const Rational& r) { return r.get_den() == 1; }

// Small-integer power, exact.
inline Rational rat_pow(const Rational& base, unsigned e) {
  Rational acc(1);
  for (unsigned i = 0; i < e; ++i) acc *= base;
  return acc;
}

inline std::int64_t rat_to_i64(const Rational& r) {
  if (!rat_is_integer(r) || !r.get_num().fits_slong_p())
    throw std::overflow_error("rational does not fit int64: " + rat_str(r));
  return static_cast<std::int64_t>(r.get_num().get_si());
}

}  // namespace mcg
