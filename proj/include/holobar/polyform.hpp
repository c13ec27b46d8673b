#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "holobar/fibre.hpp"
#include "holobar/rational.hpp"

namespace holobar {

/* Multivariate monomial, exponents over x_1..x_n. */
struct Monomial {
  std::vector<int> e;

  bool operator<(const Monomial& o) const { return e < o.e; }
  bool operator==(const Monomial& o) const { return e == o.e; }
  int total() const {
    int t = 0;
    for (int v : e) t += v;
    return t;
  }
  static Monomial one(int n) { return Monomial{std::vector<int>(n, 0)}; }
  Monomial times(const Monomial& o) const {
    Monomial m = *this;
    for (std::size_t i = 0; i < e.size(); ++i) m.e[i] += o.e[i];
    return m;
  }
  double eval(const std::vector<double>& x) const {
    double v = 1.0;
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) v *= x[i];
    return v;
  }
};

/* Polynomial with rational coefficients. */
struct Poly {
  std::map<Monomial, rat> t;

  bool zero() const { return t.empty(); }
  void add(const Monomial& m, const rat& c) {
    if (is_zero(c)) return;
    auto it = t.find(m);
    if (it == t.end()) {
      t.emplace(m, c);
    } else {
      it->second += c;
      if (is_zero(it->second)) t.erase(it);
    }
  }
  Poly times(const Poly& o) const {
    Poly p;
    for (auto& [m1, c1] : t)
      for (auto& [m2, c2] : o.t) p.add(m1.times(m2), c1 * c2);
    return p;
  }
  Poly deriv(int v) const {
    Poly p;
    for (auto& [m, c] : t) {
      if (m.e[v] == 0) continue;
      Monomial q = m;
      q.e[v] -= 1;
      p.add(q, c * rat(m.e[v]));
    }
    return p;
  }
  double eval(const std::vector<double>& x) const {
    double s = 0;
    for (auto& [m, c] : t) s += to_double(c) * m.eval(x);
    return s;
  }
  bool operator==(const Poly& o) const { return t == o.t; }
};

/* One graded-matrix block slot: entry (i,j) of Hom(V^q, V^p). */
struct BlockPos {
  int p = 0, q = 0, i = 0, j = 0;
  bool operator<(const BlockPos& o) const {
    return std::tie(p, q, i, j) < std::tie(o.p, o.q, o.i, o.j);
  }
  bool operator==(const BlockPos& o) const {
    return p == o.p && q == o.q && i == o.i && j == o.j;
  }
  int internal_degree() const { return p - q; }
};

/* Matrix-valued polynomial differential form on R^n:
 *   sum of  c * x^e / den^k  dx_I  E_{(p,i),(q,j)}.
 * Total degree of a term is |I| + (p-q).  The denominator base is a property
 * of the ambient algebra (see FormsAlgebra); polynomial terms have k = 0. */
struct PolyForm {
  struct Key {
    Monomial mono;
    std::uint32_t dxmask = 0;
    BlockPos block;
    int den_exp = 0;
    bool operator<(const Key& o) const {
      if (dxmask != o.dxmask) return dxmask < o.dxmask;
      if (!(block == o.block)) return block < o.block;
      if (den_exp != o.den_exp) return den_exp < o.den_exp;
      return mono < o.mono;
    }
    bool operator==(const Key& o) const {
      return dxmask == o.dxmask && block == o.block && den_exp == o.den_exp &&
             mono == o.mono;
    }
  };
  std::map<Key, rat> terms;

  bool zero() const { return terms.empty(); }
  void add(const Key& k, const rat& c) {
    if (is_zero(c)) return;
    auto it = terms.find(k);
    if (it == terms.end()) {
      terms.emplace(k, c);
    } else {
      it->second += c;
      if (is_zero(it->second)) terms.erase(it);
    }
  }
  PolyForm& operator+=(const PolyForm& o) {
    for (auto& [k, c] : o.terms) add(k, c);
    return *this;
  }
  PolyForm& operator-=(const PolyForm& o) {
    for (auto& [k, c] : o.terms) add(k, -c);
    return *this;
  }
  PolyForm& operator*=(const rat& s) {
    if (is_zero(s)) {
      terms.clear();
      return *this;
    }
    for (auto& [k, c] : terms) c *= s;
    return *this;
  }
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
  friend PolyForm operator*(PolyForm a, const rat& s) { return a *= s; }
  friend PolyForm operator*(const rat& s, PolyForm a) { return a *= s; }
  friend PolyForm operator-(PolyForm a) { return a *= rat(-1); }
  bool operator==(const PolyForm& o) const { return terms == o.terms; }
  bool operator<(const PolyForm& o) const { return terms < o.terms; }

  rat extract_leading() {
    if (terms.empty()) return rat(1);
    rat lead = terms.begin()->second;
    for (auto& [k, v] : terms) v /= lead;
    return lead;
  }

  static std::optional<rat> proportional(const PolyForm& x, const PolyForm& y) {
    if (x.terms.size() != y.terms.size() || x.terms.empty()) return std::nullopt;
    auto ix = x.terms.begin();
    auto iy = y.terms.begin();
    rat s = ix->second / iy->second;
    for (; ix != x.terms.end(); ++ix, ++iy) {
      if (!(ix->first == iy->first)) return std::nullopt;
      if (!(ix->second == s * iy->second)) return std::nullopt;
    }
    return s;
  }
};

inline int popcount32(std::uint32_t m) { return __builtin_popcount(m); }

/* The ambient algebra Omega(R^n, End V) with an optional denominator base.
 * Doubles as the bar-machinery backend; with a trivial fibre it is the
 * graded-commutative algebra of scalar polynomial forms. */
struct FormsAlgebra {
  int n = 1;
  GradedFibre fibre;          // {0:1} means scalar forms
  std::optional<Poly> den;    // denominator base, e.g. x^2+y^2
  std::string name = "Omega";

  using Elem = PolyForm;

  FormsAlgebra() { fibre.dims[0] = 1; }
  FormsAlgebra(int n_, GradedFibre f) : n(n_), fibre(std::move(f)) {}
  static FormsAlgebra scalar(int n_) {
    FormsAlgebra A;
    A.n = n_;
    return A;
  }

  bool scalar_fibre() const { return fibre.total() == 1 && fibre.dim(0) == 1; }

  Elem zero() const { return PolyForm(); }
  Elem unit() const {
    PolyForm u;
    for (auto& [p, dim] : fibre.dims)
      for (int i = 0; i < dim; ++i)
        u.add({Monomial::one(n), 0, {p, p, i, i}, 0}, rat(1));
    return u;
  }
  bool is_zero(const Elem& x) const { return x.zero(); }
  bool commutative() const { return scalar_fibre(); }

  int term_degree(const PolyForm::Key& k) const {
    return popcount32(k.dxmask) + k.block.internal_degree();
  }

  /* merge sign for dx_I ^ dx_J (disjoint), counting inversions */
  static int merge_sign(std::uint32_t I, std::uint32_t J) {
    int sign = 1;
    for (int b = 0; b < 32; ++b)
      if (J & (1u << b)) {
        std::uint32_t above = I >> (b + 1);
        if (popcount32(above) % 2) sign = -sign;
      }
    return sign;
  }

  Elem mul(const Elem& x, const Elem& y) const {
    PolyForm out;
    for (auto& [k1, c1] : x.terms)
      for (auto& [k2, c2] : y.terms) {
        if (k1.dxmask & k2.dxmask) continue;
        if (k1.block.q != k2.block.p || k1.block.j != k2.block.i) continue;
        int sgn = merge_sign(k1.dxmask, k2.dxmask);
        int koszul = k1.block.internal_degree() * popcount32(k2.dxmask);
        if (koszul % 2) sgn = -sgn;
        PolyForm::Key k;
        k.mono = k1.mono.times(k2.mono);
        k.dxmask = k1.dxmask | k2.dxmask;
        k.block = {k1.block.p, k2.block.q, k1.block.i, k2.block.j};
        k.den_exp = k1.den_exp + k2.den_exp;
        out.add(k, c1 * c2 * rat(sgn));
      }
    return normalize_den(out);
  }

  Elem d(const Elem& x) const {
    PolyForm out;
    for (auto& [k, c] : x.terms) {
      for (int v = 0; v < n; ++v) {
        if (k.dxmask & (1u << v)) continue;
        int below = popcount32(k.dxmask & ((1u << v) - 1));
        int sgn = (below % 2) ? -1 : 1;
        // d(p/q^e) = dp/q^e - e p dq / q^{e+1}
        if (k.mono.e[v] > 0) {
          PolyForm::Key nk = k;
          nk.mono.e[v] -= 1;
          nk.dxmask |= (1u << v);
          out.add(nk, c * rat(k.mono.e[v]) * rat(sgn));
        }
        if (k.den_exp > 0) {
          Poly dq = den->deriv(v);
          for (auto& [qm, qc] : dq.t) {
            PolyForm::Key nk = k;
            nk.mono = k.mono.times(qm);
            nk.dxmask |= (1u << v);
            nk.den_exp = k.den_exp + 1;
            out.add(nk, -c * qc * rat(k.den_exp) * rat(sgn));
          }
        }
      }
    }
    return normalize_den(out);
  }

  /* bring all terms sharing (dxmask, block) to the common maximal den_exp so
   * equality of equal forms is syntactic */
  Elem normalize_den(const Elem& x) const {
    if (!den) return x;
    std::map<std::pair<std::uint32_t, BlockPos>, int> maxexp;
    for (auto& [k, c] : x.terms) {
      auto key = std::make_pair(k.dxmask, k.block);
      auto it = maxexp.find(key);
      if (it == maxexp.end())
        maxexp[key] = k.den_exp;
      else
        it->second = std::max(it->second, k.den_exp);
    }
    PolyForm out;
    for (auto& [k, c] : x.terms) {
      int target = maxexp[{k.dxmask, k.block}];
      if (k.den_exp == target) {
        out.add(k, c);
        continue;
      }
      Poly lift;
      lift.add(k.mono, c);
      for (int i = k.den_exp; i < target; ++i) lift = lift.times(*den);
      for (auto& [m, cc] : lift.t) {
        PolyForm::Key nk = k;
        nk.mono = m;
        nk.den_exp = target;
        out.add(nk, cc);
      }
    }
    return out;
  }

  bool has_aug() const { return scalar_fibre(); }
  rat aug(const Elem& x) const {
    if (!has_aug()) throw std::logic_error("matrix-valued forms have no augmentation");
    rat s(0);
    for (auto& [k, c] : x.terms) {
      if (k.dxmask != 0) continue;
      if (k.den_exp != 0) throw std::logic_error("augmentation at a denominator zero");
      if (k.mono.total() == 0) s += c;
    }
    return s;
  }
  Elem bar_project(const Elem& x) const {
    if (!has_aug()) return x;
    rat e = aug(x);
    if (holobar::is_zero(e)) return x;
    Elem out = x;
    out -= unit() * e;
    return out;
  }

  std::vector<std::pair<int, Elem>> homogeneous_parts(const Elem& x) const {
    std::map<int, Elem> by_deg;
    for (auto& [k, c] : x.terms) by_deg[term_degree(k)].add(k, c);
    return {by_deg.begin(), by_deg.end()};
  }
  std::vector<std::tuple<int, Elem, rat>> term_decomposition(const Elem& x) const {
    std::vector<std::tuple<int, Elem, rat>> out;
    out.reserve(x.terms.size());
    for (auto& [k, c] : x.terms) {
      PolyForm t;
      t.add(k, rat(1));
      out.emplace_back(term_degree(k), std::move(t), c);
    }
    return out;
  }

  std::string to_string(const Elem& x) const {
    if (x.zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [k, c] : x.terms) {
      if (!first) os << " + ";
      first = false;
      os << rat_str(c);
      for (int v = 0; v < n; ++v)
        if (k.mono.e[v]) os << "*x" << (v + 1) << "^" << k.mono.e[v];
      if (k.den_exp) os << "/q^" << k.den_exp;
      for (int v = 0; v < n; ++v)
        if (k.dxmask & (1u << v)) os << "*dx" << (v + 1);
      if (!scalar_fibre())
        os << "*E[" << k.block.p << "," << k.block.i << ";" << k.block.q << ","
           << k.block.j << "]";
    }
    return os.str();
  }

  /* ---- convenience builders ---- */
  Elem coordinate(int v) const {
    PolyForm f;
    Monomial m = Monomial::one(n);
    m.e[v] = 1;
    add_scalar_term(f, m, 0, rat(1));
    return f;
  }
  Elem dx(int v) const {
    PolyForm f;
    add_scalar_term(f, Monomial::one(n), 1u << v, rat(1));
    return f;
  }
  void add_scalar_term(PolyForm& f, const Monomial& m, std::uint32_t mask, const rat& c,
                       int den_exp = 0) const {
    for (auto& [p, dim] : fibre.dims)
      for (int i = 0; i < dim; ++i) f.add({m, mask, {p, p, i, i}, den_exp}, c);
  }

  /* Poincare potential of a closed polynomial scalar 1-form:
   * F(x) = int_0^1 sum_v x_v w_v(tx) dt, exact over Q. */
  std::optional<Elem> poincare_potential(const Elem& w) const {
    if (!scalar_fibre()) return std::nullopt;
    for (auto& [k, c] : w.terms)
      if (popcount32(k.dxmask) != 1 || k.den_exp != 0) return std::nullopt;
    if (!is_zero_form(d(w))) return std::nullopt;
    PolyForm F;
    for (auto& [k, c] : w.terms) {
      int v = 0;
      while (!(k.dxmask & (1u << v))) ++v;
      Monomial m = k.mono;
      m.e[v] += 1;
      F.add({m, 0, k.block, 0}, c / rat(m.total()));
    }
    return F;
  }
  static bool is_zero_form(const Elem& x) { return x.zero(); }
};

/* Superconnection alpha on a trivialized patch: one form-degree-p component
 * of internal degree 1-p for each p; D = d + alpha has total degree 1. */
struct SuperConnection {
  FormsAlgebra* ctx = nullptr;
  PolyForm alpha;  // sum of the components; each term has total degree 1

  bool check_total_degree() const {
    for (auto& [k, c] : alpha.terms)
      if (ctx->term_degree(k) != 1) return false;
    return true;
  }
  PolyForm component(int form_degree) const {
    PolyForm out;
    for (auto& [k, c] : alpha.terms)
      if (popcount32(k.dxmask) == form_degree) out.add(k, c);
    return out;
  }
};

/* Residuals R_p = d alpha_{p-1} + sum_{q+r=p} alpha_q ^ alpha_r by
 * form-degree; all zero iff D^2 = 0. */
inline std::vector<std::pair<int, PolyForm>> superconnection_flatness(
    const SuperConnection& sc) {
  const FormsAlgebra& A = *sc.ctx;
  PolyForm total = A.normalize_den(A.d(sc.alpha) + A.mul(sc.alpha, sc.alpha));
  std::map<int, PolyForm> by_p;
  for (auto& [k, c] : total.terms) by_p[popcount32(k.dxmask)].add(k, c);
  return {by_p.begin(), by_p.end()};
}

}  // namespace holobar
