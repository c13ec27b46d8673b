#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <string>

namespace holobar {

/* Exact scalar backend. All algebraic identities in the bar/Hochschild and
 * lifting layers are checked over these; doubles appear only at quadrature
 * leaves. */
using rat = mpq_class;

inline rat rat_of(long num, long den = 1) {
  rat r(num, den);
  r.canonicalize();
  return r;
}

inline bool is_zero(const rat& r) { return sgn(r) == 0; }

inline double to_double(const rat& r) { return r.get_d(); }

inline std::string rat_str(const rat& r) { return r.get_str(); }

inline rat rat_parse(const std::string& s) {
  rat r(s);
  r.canonicalize();
  return r;
}

}  // namespace holobar
