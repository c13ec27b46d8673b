#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "holobar/fibre.hpp"
#include "holobar/rational.hpp"

namespace holobar {

/* Sparse element of a finite graded basis space: sorted (label, coeff) pairs,
 * zero coefficients dropped, so equality is syntactic. */
struct Element {
  std::vector<std::pair<int, rat>> c;

  bool zero() const { return c.empty(); }

  void add_term(int i, const rat& v) {
    if (is_zero(v)) return;
    auto it = std::lower_bound(c.begin(), c.end(), i,
                               [](const auto& p, int k) { return p.first < k; });
    if (it != c.end() && it->first == i) {
      it->second += v;
      if (is_zero(it->second)) c.erase(it);
    } else {
      c.insert(it, {i, v});
    }
  }

  Element& operator+=(const Element& o) {
    for (auto& [i, v] : o.c) add_term(i, v);
    return *this;
  }
  Element& operator-=(const Element& o) {
    for (auto& [i, v] : o.c) add_term(i, -v);
    return *this;
  }
  Element& operator*=(const rat& s) {
    if (is_zero(s)) {
      c.clear();
      return *this;
    }
    for (auto& [i, v] : c) v *= s;
    return *this;
  }
  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(Element a, const rat& s) { return a *= s; }
  friend Element operator*(const rat& s, Element a) { return a *= s; }
  friend Element operator-(Element a) { return a *= rat(-1); }
  bool operator==(const Element& o) const { return c == o.c; }
  bool operator<(const Element& o) const { return c < o.c; }

  static Element basis(int i, rat v = rat(1)) {
    Element e;
    e.add_term(i, v);
    return e;
  }

  /* divide out the leading coefficient; returns it (1 on zero) */
  rat extract_leading() {
    if (c.empty()) return rat(1);
    rat lead = c.front().second;
    for (auto& [i, v] : c) v /= lead;
    return lead;
  }

  /* x = s*y syntactically, if such s exists */
  static std::optional<rat> proportional(const Element& x, const Element& y) {
    if (x.c.size() != y.c.size() || x.c.empty()) return std::nullopt;
    rat s = x.c.front().second / y.c.front().second;
    for (std::size_t i = 0; i < x.c.size(); ++i) {
      if (x.c[i].first != y.c[i].first) return std::nullopt;
      if (!(x.c[i].second == s * y.c[i].second)) return std::nullopt;
    }
    return s;
  }
};

struct GradedBasisSpace {
  std::vector<std::string> labels;
  std::vector<int> degree;

  int size() const { return static_cast<int>(labels.size()); }
  int add(const std::string& name, int deg) {
    labels.push_back(name);
    degree.push_back(deg);
    return size() - 1;
  }
  int find(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if (labels[i] == name) return i;
    throw std::out_of_range("label not in basis: " + name);
  }
};

/* Finite-dimensional dg algebra by structure constants.  The augmentation is
 * optional: End(V) factors have none, and only the normalized-complex layer
 * ever needs it. */
struct DgAlgebraSpec {
  std::string name;
  GradedBasisSpace space;
  std::unordered_map<std::int64_t, Element> mult;  // key i*n+j -> e_i * e_j
  std::vector<Element> diff;                       // d(e_i)
  Element unit;
  std::optional<std::vector<rat>> aug;
  bool commutative = false;

  int dim() const { return space.size(); }
  std::int64_t mkey(int i, int j) const {
    return static_cast<std::int64_t>(i) * dim() + j;
  }
  const Element* mult_entry(int i, int j) const {
    auto it = mult.find(mkey(i, j));
    return it == mult.end() ? nullptr : &it->second;
  }
  void set_mult(int i, int j, Element e) {
    if (!e.zero()) mult[mkey(i, j)] = std::move(e);
  }

  Element mul(const Element& x, const Element& y) const {
    Element out;
    for (auto& [i, xi] : x.c)
      for (auto& [j, yj] : y.c)
        if (const Element* m = mult_entry(i, j)) {
          rat s = xi * yj;
          for (auto& [k, v] : m->c) out.add_term(k, s * v);
        }
    return out;
  }
  Element d(const Element& x) const {
    Element out;
    for (auto& [i, xi] : x.c)
      for (auto& [k, v] : diff[i].c) out.add_term(k, xi * v);
    return out;
  }
  rat augment(const Element& x) const {
    if (!aug) throw std::logic_error("algebra " + name + " has no augmentation");
    rat s(0);
    for (auto& [i, xi] : x.c) s += xi * (*aug)[i];
    return s;
  }
  /* x - eps(x) 1; identity when no augmentation is present. */
  Element bar_project(const Element& x) const {
    if (!aug) return x;
    rat e = augment(x);
    if (is_zero(e)) return x;
    Element out = x;
    out -= unit * e;
    return out;
  }

  bool homogeneous(const Element& x, int* deg_out = nullptr) const {
    if (x.zero()) return true;
    int deg = space.degree[x.c.front().first];
    for (auto& [i, v] : x.c)
      if (space.degree[i] != deg) return false;
    if (deg_out) *deg_out = deg;
    return true;
  }
  std::vector<std::pair<int, Element>> homogeneous_parts(const Element& x) const {
    std::map<int, Element> by_deg;
    for (auto& [i, v] : x.c) by_deg[space.degree[i]].add_term(i, v);
    return {by_deg.begin(), by_deg.end()};
  }

  Element element(const std::string& label, rat v = rat(1)) const {
    return Element::basis(space.find(label), v);
  }
};

/* Axiom check per the conventions: d^2 = 0, graded Leibniz, associativity,
 * unit laws, augmentation is a dg map, graded commutativity when flagged.
 * Violations are reported, never thrown. */
inline std::vector<std::string> dga_validate(const DgAlgebraSpec& A) {
  std::vector<std::string> report;
  const int n = A.dim();
  auto deg = [&](int i) { return A.space.degree[i]; };
  auto fail = [&](const std::string& s) { report.push_back(s); };

  for (int i = 0; i < n; ++i)
    if (!A.d(A.diff[i]).zero()) fail("d^2 != 0 on " + A.space.labels[i]);
  for (int i = 0; i < n; ++i) {
    Element ei = Element::basis(i);
    for (int j = 0; j < n; ++j) {
      Element ej = Element::basis(j);
      Element lhs = A.d(A.mul(ei, ej));
      Element rhs = A.mul(A.diff[i], ej);
      Element t = A.mul(ei, A.diff[j]);
      rhs += (deg(i) % 2 ? -t : t);
      if (!(lhs == rhs))
        fail("Leibniz fails on (" + A.space.labels[i] + "," + A.space.labels[j] + ")");
      if (A.commutative) {
        Element ba = A.mul(ej, ei);
        if (deg(i) * deg(j) % 2) ba *= rat(-1);
        if (!(A.mul(ei, ej) == ba))
          fail("graded commutativity fails on (" + A.space.labels[i] + "," +
               A.space.labels[j] + ")");
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Element lhs = A.mul(A.mul(Element::basis(i), Element::basis(j)), Element::basis(k));
        Element rhs = A.mul(Element::basis(i), A.mul(Element::basis(j), Element::basis(k)));
        if (!(lhs == rhs))
          fail("associativity fails on (" + A.space.labels[i] + "," + A.space.labels[j] +
               "," + A.space.labels[k] + ")");
      }
  for (int i = 0; i < n; ++i) {
    Element ei = Element::basis(i);
    if (!(A.mul(A.unit, ei) == ei)) fail("left unit fails on " + A.space.labels[i]);
    if (!(A.mul(ei, A.unit) == ei)) fail("right unit fails on " + A.space.labels[i]);
  }
  if (A.aug) {
    if (!(A.augment(A.unit) == rat(1))) fail("aug(1) != 1");
    for (int i = 0; i < n; ++i) {
      if (!is_zero(A.augment(A.diff[i]))) fail("aug(d " + A.space.labels[i] + ") != 0");
      if (deg(i) != 0 && !is_zero((*A.aug)[i]))
        fail("aug nonzero off degree 0 at " + A.space.labels[i]);
      for (int j = 0; j < n; ++j) {
        rat lhs = A.augment(A.mul(Element::basis(i), Element::basis(j)));
        rat rhs = (*A.aug)[i] * (*A.aug)[j];
        if (!(lhs == rhs))
          fail("aug not multiplicative on (" + A.space.labels[i] + "," +
               A.space.labels[j] + ")");
      }
    }
  }
  return report;
}

/* ---- constructors for the models used across the test and scenario suites ---- */

inline DgAlgebraSpec ground_field() {
  DgAlgebraSpec A;
  A.name = "R";
  A.space.add("1", 0);
  A.set_mult(0, 0, Element::basis(0));
  A.diff = {Element()};
  A.unit = Element::basis(0);
  A.aug = std::vector<rat>{rat(1)};
  A.commutative = true;
  return A;
}

/* End(V) for a graded fibre V, as a graded algebra with zero differential.
 * Basis E_{(p,i),(q,j)} : V^q -> V^p of degree p-q; not commutative, no
 * augmentation. */
inline DgAlgebraSpec end_algebra(const GradedFibre& V, const std::string& name = "EndV") {
  DgAlgebraSpec K;
  K.name = name;
  struct Slot {
    int p, i, q, j;
  };
  std::vector<Slot> slots;
  for (auto& [p, dp] : V.dims)
    for (auto& [q, dq] : V.dims)
      for (int i = 0; i < dp; ++i)
        for (int j = 0; j < dq; ++j) {
          std::ostringstream nm;
          nm << "E[" << p << "," << i << ";" << q << "," << j << "]";
          K.space.add(nm.str(), p - q);
          slots.push_back({p, i, q, j});
        }
  const int n = K.dim();
  K.diff.assign(n, Element());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Slot &s = slots[a], &t = slots[b];
      if (s.q == t.p && s.j == t.i) {
        // E_{s} E_{t} = E_{(s.p,s.i),(t.q,t.j)}
        for (int c = 0; c < n; ++c) {
          const Slot& u = slots[c];
          if (u.p == s.p && u.i == s.i && u.q == t.q && u.j == t.j) {
            K.set_mult(a, b, Element::basis(c));
            break;
          }
        }
      }
    }
  Element unit;
  for (int c = 0; c < n; ++c) {
    const Slot& u = slots[c];
    if (u.p == u.q && u.i == u.j) unit.add_term(c, rat(1));
  }
  K.unit = unit;
  K.commutative = false;
  return K;
}

/* A tensor K: d(a ox k) = da ox k + (-1)^{|a|} a ox dk and
 * (a ox k)(a' ox k') = (-1)^{|k||a'|} aa' ox kk'. */
struct TensorDga {
  DgAlgebraSpec spec;
  int dimA = 0, dimK = 0;
  int pair_index(int ia, int ik) const { return ia * dimK + ik; }
  std::pair<int, int> split(int idx) const { return {idx / dimK, idx % dimK}; }
};

inline TensorDga tensor_dga(const DgAlgebraSpec& A, const DgAlgebraSpec& K) {
  TensorDga T;
  T.dimA = A.dim();
  T.dimK = K.dim();
  DgAlgebraSpec& P = T.spec;
  P.name = A.name + "(x)" + K.name;
  for (int ia = 0; ia < T.dimA; ++ia)
    for (int ik = 0; ik < T.dimK; ++ik)
      P.space.add(A.space.labels[ia] + "(x)" + K.space.labels[ik],
                  A.space.degree[ia] + K.space.degree[ik]);
  const int n = P.dim();
  P.diff.assign(n, Element());
  for (int ia = 0; ia < T.dimA; ++ia)
    for (int ik = 0; ik < T.dimK; ++ik) {
      Element d;
      for (auto& [a2, v] : A.diff[ia].c) d.add_term(T.pair_index(a2, ik), v);
      int sgn = (A.space.degree[ia] % 2) ? -1 : 1;
      for (auto& [k2, v] : K.diff[ik].c) d.add_term(T.pair_index(ia, k2), v * sgn);
      P.diff[T.pair_index(ia, ik)] = std::move(d);
    }
  for (int ia = 0; ia < T.dimA; ++ia)
    for (int ik = 0; ik < T.dimK; ++ik)
      for (int ja = 0; ja < T.dimA; ++ja)
        for (int jk = 0; jk < T.dimK; ++jk) {
          const Element* ma = A.mult_entry(ia, ja);
          const Element* mk = K.mult_entry(ik, jk);
          if (!ma || !mk) continue;
          int sgn = (K.space.degree[ik] * A.space.degree[ja]) % 2 ? -1 : 1;
          Element prod;
          for (auto& [ka, va] : ma->c)
            for (auto& [kk, vk] : mk->c)
              prod.add_term(T.pair_index(ka, kk), va * vk * rat(sgn));
          if (!prod.zero()) P.set_mult(T.pair_index(ia, ik), T.pair_index(ja, jk), prod);
        }
  Element unit;
  for (auto& [ia, va] : A.unit.c)
    for (auto& [ik, vk] : K.unit.c) unit.add_term(T.pair_index(ia, ik), va * vk);
  P.unit = unit;
  if (A.aug && K.aug) {
    std::vector<rat> aug(n, rat(0));
    for (int ia = 0; ia < T.dimA; ++ia)
      for (int ik = 0; ik < T.dimK; ++ik)
        aug[T.pair_index(ia, ik)] = (*A.aug)[ia] * (*K.aug)[ik];
    P.aug = std::move(aug);
  }
  P.commutative = false;
  return T;
}

/* Exterior algebra on generators of odd degrees (graded commutative). */
inline DgAlgebraSpec exterior_algebra(const std::vector<std::string>& gens,
                                      const std::vector<int>& degs) {
  for (int d : degs)
    if (d % 2 == 0) throw std::invalid_argument("exterior_algebra: generators must be odd");
  DgAlgebraSpec A;
  A.name = "Lambda";
  const int m = static_cast<int>(gens.size());
  const int n = 1 << m;
  auto subset_name = [&](int mask) {
    if (!mask) return std::string("1");
    std::string s;
    for (int i = 0; i < m; ++i)
      if (mask & (1 << i)) s += (s.empty() ? "" : "^") + gens[i];
    return s;
  };
  auto subset_deg = [&](int mask) {
    int d = 0;
    for (int i = 0; i < m; ++i)
      if (mask & (1 << i)) d += degs[i];
    return d;
  };
  for (int mask = 0; mask < n; ++mask) A.space.add(subset_name(mask), subset_deg(mask));
  A.diff.assign(n, Element());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a & b) continue;
      // sign: count inversions when merging sorted generator lists (all odd degree)
      int sign = 1;
      for (int i = 0; i < m; ++i)
        if (b & (1 << i))
          for (int j = i + 1; j < m; ++j)
            if (a & (1 << j)) sign = -sign;
      A.set_mult(a, b, Element::basis(a | b, rat(sign)));
    }
  A.unit = Element::basis(0);
  std::vector<rat> aug(n, rat(0));
  aug[0] = 1;
  A.aug = std::move(aug);
  A.commutative = true;
  return A;
}

/* Truncated polynomial de Rham model on one variable: basis u^a for
 * a < trunc and u^a du for a < trunc-1, with d(u^a) = a u^{a-1} du.  The
 * quotient ideal (u^trunc, u^{trunc-1} du) is differential, so this
 * validates.  Acyclic in positive degree; H^0 = R. */
inline DgAlgebraSpec poly_line_model(int trunc, const std::string& var = "u") {
  DgAlgebraSpec A;
  A.name = "R[" + var + "]/(" + var + "^" + std::to_string(trunc) + ") (x) d" + var;
  for (int a = 0; a < trunc; ++a)
    A.space.add(a == 0 ? "1" : var + "^" + std::to_string(a), 0);
  const int oneforms = trunc - 1;
  for (int a = 0; a < oneforms; ++a)
    A.space.add((a == 0 ? std::string("") : var + "^" + std::to_string(a)) + "d" + var, 1);
  const int n = trunc + oneforms;
  A.diff.assign(n, Element());
  for (int a = 1; a < trunc; ++a) A.diff[a] = Element::basis(trunc + a - 1, rat(a));
  for (int a = 0; a < trunc; ++a)
    for (int b = 0; b < trunc; ++b) {
      if (a + b < trunc) A.set_mult(a, b, Element::basis(a + b));
      if (b < oneforms && a + b < oneforms) {
        A.set_mult(a, trunc + b, Element::basis(trunc + a + b));
        A.set_mult(trunc + b, a, Element::basis(trunc + a + b));
      }
    }
  A.unit = Element::basis(0);
  std::vector<rat> aug(n, rat(0));
  aug[0] = 1;  // evaluation at u = 0
  A.aug = std::move(aug);
  A.commutative = true;
  return A;
}

/* 2x2 upper-triangular matrices with d = [n,-] for n the strict
 * upper-triangular generator placed in degree 1: E11, E22 in degree 0 and
 * E12 in degree... the grading that makes d = [n,-] degree +1 puts E12 in
 * degree -1 fibre terms; concretely this is End(V) for V = R[0] (+) R[1]
 * restricted to the triangle, with d = [E12^{deg1}, -]. */
inline DgAlgebraSpec triangular_with_commutator_d() {
  GradedFibre V;
  V.dims[0] = 1;
  V.dims[1] = 1;
  DgAlgebraSpec K = end_algebra(V, "tri");
  // keep only the upper triangle in internal degree: spans E[0,0;0,0],
  // E[1,0;1,0], E[0,0;1,0] (degree -1), and n = E[1,0;0,0] (degree +1)
  int e11 = K.space.find("E[0,0;0,0]");
  int e22 = K.space.find("E[1,0;1,0]");
  int n_up = K.space.find("E[1,0;0,0]");
  Element n = Element::basis(n_up);
  for (int i = 0; i < K.dim(); ++i) {
    Element ei = Element::basis(i);
    Element com = K.mul(n, ei);
    Element t = K.mul(ei, n);
    com += (K.space.degree[i] % 2 ? t : -t);
    K.diff[i] = com;
  }
  (void)e11;
  (void)e22;
  K.name = "tri[d=[n,-]]";
  return K;
}

}  // namespace holobar
