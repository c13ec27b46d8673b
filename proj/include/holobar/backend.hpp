#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "holobar/dga.hpp"

namespace holobar {

/* Adapter exposing a DgAlgebraSpec through the interface the bar machinery
 * is templated over.  The forms layer provides a second adapter with the
 * same surface (see polyform.hpp). */
struct FiniteBackend {
  const DgAlgebraSpec* A;
  using Elem = Element;

  explicit FiniteBackend(const DgAlgebraSpec& a) : A(&a) {}

  Elem zero() const { return Element(); }
  Elem unit() const { return A->unit; }
  bool is_zero(const Elem& x) const { return x.zero(); }
  Elem mul(const Elem& x, const Elem& y) const { return A->mul(x, y); }
  Elem d(const Elem& x) const { return A->d(x); }
  bool has_aug() const { return A->aug.has_value(); }
  rat aug(const Elem& x) const { return A->augment(x); }
  Elem bar_project(const Elem& x) const { return A->bar_project(x); }
  bool commutative() const { return A->commutative; }
  std::vector<std::pair<int, Elem>> homogeneous_parts(const Elem& x) const {
    return A->homogeneous_parts(x);
  }
  /* full multilinear expansion: (degree, unit term, coefficient) triples */
  std::vector<std::tuple<int, Elem, rat>> term_decomposition(const Elem& x) const {
    std::vector<std::tuple<int, Elem, rat>> out;
    out.reserve(x.c.size());
    for (auto& [i, v] : x.c) out.emplace_back(A->space.degree[i], Element::basis(i), v);
    return out;
  }
  std::string to_string(const Elem& x) const {
    if (x.zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [i, v] : x.c) {
      if (!first) os << " + ";
      os << rat_str(v) << "*" << A->space.labels[i];
      first = false;
    }
    return os.str();
  }
};

}  // namespace holobar
