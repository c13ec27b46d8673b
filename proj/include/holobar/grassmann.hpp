#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "holobar/fibre.hpp"

namespace holobar {

/* Small dense double matrix. */
struct DMat {
  int r = 0, c = 0;
  std::vector<double> a;

  DMat() = default;
  DMat(int rr, int cc) : r(rr), c(cc), a(static_cast<std::size_t>(rr) * cc, 0.0) {}
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * c + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * c + j]; }
  static DMat identity(int n) {
    DMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }
  DMat& operator+=(const DMat& o) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    return *this;
  }
  DMat& operator*=(double s) {
    for (double& v : a) v *= s;
    return *this;
  }
  double max_abs() const {
    double m = 0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }
};

inline DMat dmat_mul(const DMat& x, const DMat& y) {
  DMat z(x.r, y.c);
  for (int i = 0; i < x.r; ++i)
    for (int k = 0; k < x.c; ++k) {
      double v = x.at(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < y.c; ++j) z.at(i, j) += v * y.at(k, j);
    }
  return z;
}

/* Evaluation algebra Lambda(generators) ox End(V) ox F_tau over doubles.
 *
 * Generators (dt's and tangent placeholders) are odd; blocks are graded by
 * internal degree p - q; tau words are contiguous descending segments
 * (hi, lo] standing for tau_hi tau_{hi-1} ... tau_{lo+1}, which is all the
 * free algebra the coefficient extraction ever visits.  Multiplication
 * composes segments end-to-start and drops everything else. */
struct SuperContext {
  const GradedFibre* fib = nullptr;
  int n_gen = 0;                 // Grassmann generators, all of degree 1
  std::vector<int> tau_degree;   // degree of tau_i, index 1-based: tau_degree[i-1]
  std::vector<int> degs;         // fibre degrees present (sorted)

  explicit SuperContext(const GradedFibre& f, int gens = 0, std::vector<int> taud = {})
      : fib(&f), n_gen(gens), tau_degree(std::move(taud)) {
    for (auto& [d, dim] : f.dims) degs.push_back(d);
  }
  int seg_degree(int hi, int lo) const {
    int d = 0;
    for (int i = lo + 1; i <= hi; ++i) d += tau_degree[i - 1];
    return d;
  }
};

struct SuperElem {
  struct Key {
    std::uint32_t gmask = 0;
    int p = 0, q = 0;   // block Hom(V^q, V^p)
    int hi = 0, lo = 0; // tau segment; hi == lo means empty
    bool operator<(const Key& o) const {
      if (gmask != o.gmask) return gmask < o.gmask;
      if (p != o.p) return p < o.p;
      if (q != o.q) return q < o.q;
      if (hi != o.hi) return hi < o.hi;
      return lo < o.lo;
    }
  };
  std::map<Key, DMat> terms;

  bool zero(double tol = 0.0) const {
    for (auto& [k, m] : terms)
      if (m.max_abs() > tol) return false;
    return true;
  }
  void add(const Key& k, const DMat& m) {
    auto it = terms.find(k);
    if (it == terms.end())
      terms.emplace(k, m);
    else
      it->second += m;
  }
  SuperElem& operator+=(const SuperElem& o) {
    for (auto& [k, m] : o.terms) add(k, m);
    return *this;
  }
  SuperElem& operator*=(double s) {
    for (auto& [k, m] : terms) m *= s;
    return *this;
  }
  double max_abs() const {
    double v = 0;
    for (auto& [k, m] : terms) v = std::max(v, m.max_abs());
    return v;
  }

  static SuperElem identity(const SuperContext& ctx) {
    SuperElem e;
    for (int d : ctx.degs) {
      int dim = ctx.fib->dim(d);
      e.add({0u, d, d, 0, 0}, DMat::identity(dim));
    }
    return e;
  }
};

inline int grassmann_merge_sign(std::uint32_t a, std::uint32_t b) {
  if (a & b) return 0;
  int sign = 1;
  for (int bit = 0; bit < 32; ++bit)
    if (b & (1u << bit)) {
      std::uint32_t above = a >> (bit + 1);
      if (__builtin_popcount(above) % 2) sign = -sign;
    }
  return sign;
}

inline SuperElem super_mul(const SuperContext& ctx, const SuperElem& x, const SuperElem& y) {
  SuperElem out;
  for (auto& [k1, m1] : x.terms)
    for (auto& [k2, m2] : y.terms) {
      if (k1.q != k2.p) continue;
      int gs = grassmann_merge_sign(k1.gmask, k2.gmask);
      if (gs == 0) continue;
      /* tau segments compose when the left ends where the right starts */
      int hi, lo;
      if (k1.hi == k1.lo) {
        hi = k2.hi;
        lo = k2.lo;
      } else if (k2.hi == k2.lo) {
        hi = k1.hi;
        lo = k1.lo;
      } else if (k1.lo == k2.hi) {
        hi = k1.hi;
        lo = k2.lo;
      } else {
        continue;
      }
      /* Koszul: tau-word and block of the left factor cross the Grassmann
       * part of the right factor; the left tau-word also crosses the right
       * block. */
      long sgn = 0;
      int wdeg1 = (k1.hi == k1.lo) ? 0 : ctx.seg_degree(k1.hi, k1.lo);
      int g2 = __builtin_popcount(k2.gmask);
      int bdeg1 = k1.p - k1.q;
      int bdeg2 = k2.p - k2.q;
      sgn += static_cast<long>(wdeg1) * (g2 + bdeg2);
      sgn += static_cast<long>(bdeg1) * g2;
      int total = gs * ((sgn % 2) ? -1 : 1);
      DMat prod = dmat_mul(m1, m2);
      prod *= static_cast<double>(total);
      out.add({k1.gmask | k2.gmask, k1.p, k2.q, hi, lo}, prod);
    }
  return out;
}

/* extract the coefficient of a full Grassmann monomial (sorted generator
 * order) and tau segment (hi, lo], as a block map V^q -> V^p */
inline DMat super_coefficient(const SuperContext& ctx, const SuperElem& x,
                              std::uint32_t gmask, int p, int q, int hi = 0, int lo = 0) {
  auto it = x.terms.find({gmask, p, q, hi, lo});
  if (it != x.terms.end()) return it->second;
  return DMat(ctx.fib->dim(p), ctx.fib->dim(q));
}

}  // namespace holobar
