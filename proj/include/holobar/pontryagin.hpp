#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "holobar/chen.hpp"
#include "holobar/loops.hpp"

namespace holobar {

/* Formal R-linear combination of based Moore simplices; the degree of a
 * k-simplex is -k (cohomological conventions). */
struct SingularChain {
  struct Term {
    double coeff = 1.0;
    MooreLoopSimplex s;
  };
  std::vector<Term> terms;

  static SingularChain of(MooreLoopSimplex s, double c = 1.0) {
    SingularChain x;
    x.terms.push_back({c, std::move(s)});
    return x;
  }
  SingularChain& operator+=(const SingularChain& o) {
    for (auto& t : o.terms) terms.push_back(t);
    return *this;
  }
  SingularChain& operator*=(double c) {
    for (auto& t : terms) t.coeff *= c;
    return *this;
  }
};

inline SingularChain chain_boundary(const SingularChain& x) {
  SingularChain out;
  for (auto& t : x.terms) {
    for (int j = 0; j <= t.s.k; ++j) {
      double sgn = (j % 2 == 0) ? 1.0 : -1.0;
      out.terms.push_back({t.coeff * sgn, moore_face(t.s, j)});
    }
  }
  return out;
}

/* restriction of mu along the shuffle slot-selection: a Delta_{r+s} simplex
 * reading its r arguments off the selected global slots */
inline MooreLoopSimplex shuffle_restrict(const MooreLoopSimplex& mu,
                                         const std::vector<int>& slots, int total_dim) {
  MooreLoopSimplex out;
  out.k = total_dim;
  out.n = mu.n;
  out.basepoint = mu.basepoint;
  MooreLoopSimplex m = mu;
  std::vector<int> sl = slots;
  auto select = [sl](std::span<const double> t) {
    std::vector<double> tt(sl.size());
    for (std::size_t i = 0; i < sl.size(); ++i) tt[i] = t[sl[i]];
    return tt;
  };
  out.length = [m, select](std::span<const double> t) { return m.length(select(t)); };
  out.length_grad = [m, select, sl, total_dim](std::span<const double> t) {
    std::vector<double> g = m.length_grad(select(t));
    std::vector<double> out_g(total_dim, 0.0);
    for (std::size_t i = 0; i < sl.size(); ++i) out_g[sl[i]] = g[i];
    return out_g;
  };
  out.eval = [m, select, sl, total_dim](std::span<const double> t, double sv) {
    LoopJet jet = m.eval(select(t), sv);
    std::vector<std::vector<double>> du(total_dim, std::vector<double>(m.n, 0.0));
    for (std::size_t i = 0; i < sl.size(); ++i) du[sl[i]] = jet.du[i];
    jet.du = std::move(du);
    return jet;
  };
  return out;
}

/* EZ(mu ox nu) = sum over (r,s)-shuffles of signed pairs of reparametrized
 * (r+s)-simplices on the product space. */
struct EzTerm {
  int sign = 1;
  MooreLoopSimplex a, b;
};

inline std::vector<EzTerm> ez_map(const MooreLoopSimplex& mu, const MooreLoopSimplex& nu) {
  const int r = mu.k, s = nu.k;
  std::vector<EzTerm> out;
  for (const std::vector<int>& pos : shuffles(r, s)) {
    /* pos[i] = output slot of mu's i-th argument (i < r), nu's (i-r)-th */
    std::vector<int> chi(r + s);
    for (int i = 0; i < r + s; ++i) chi[i] = pos[i];
    int sign = perm_parity(chi);
    std::vector<int> slots_a(pos.begin(), pos.begin() + r);
    std::vector<int> slots_b(pos.begin() + r, pos.end());
    out.push_back({sign, shuffle_restrict(mu, slots_a, r + s),
                   shuffle_restrict(nu, slots_b, r + s)});
  }
  return out;
}

/* c_* after EZ: Moore concatenation of the paired simplices. */
inline SingularChain pontryagin_product(const SingularChain& x, const SingularChain& y) {
  SingularChain out;
  for (auto& tx : x.terms)
    for (auto& ty : y.terms)
      for (EzTerm& ez : ez_map(tx.s, ty.s))
        out.terms.push_back(
            {tx.coeff * ty.coeff * ez.sign, moore_concat(ez.a, ez.b)});
  return out;
}

/* ---- hol-hat: the Pontryagin-algebra representation ---- */

/* The printed sign (-1)^{(k+1)(k+2)/2} sends the point loop to -id; the
 * calibrated convention (-1)^{k(k+1)/2} keeps the map unital and satisfies
 * T(r+s) = T(r)+T(s)+rs, which is exactly what multiplicativity needs. */
enum class HolHatSign { calibrated, as_printed };

inline double hol_hat_sign(int k, HolHatSign c) {
  long e = (c == HolHatSign::calibrated) ? static_cast<long>(k) * (k + 1) / 2
                                         : static_cast<long>(k + 1) * (k + 2) / 2;
  return (e % 2) ? -1.0 : 1.0;
}

/* nu |-> sign(k) int_{Delta_k} nu^*(q^* hol_*(E)) */
inline DMat hol_hat_simplex(const FormsAlgebra& M, const SuperConnection& alpha,
                            const MooreLoopSimplex& nu, const QuadratureSpec& q,
                            HolHatSign sc = HolHatSign::calibrated) {
  const int k = nu.k;
  LoopFamily plot = q_reparametrized(nu);
  std::vector<std::vector<double>> basis(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i) basis[i][i] = 1.0;
  DMat acc(M.fibre.total(), M.fibre.total());
  QuadratureSpec outer = q;
  simplex_quadrature(k, 0.0, 1.0, outer, [&](const std::vector<double>& t, double w) {
    HolonomyValue H = holonomy(M, alpha, plot, t, basis, q);
    DMat comp = H.component(k);
    comp *= w;
    acc += comp;
  });
  acc *= hol_hat_sign(k, sc);
  return acc;
}

inline DMat hol_hat(const FormsAlgebra& M, const SuperConnection& alpha,
                    const SingularChain& x, const QuadratureSpec& q,
                    HolHatSign sc = HolHatSign::calibrated) {
  DMat acc(M.fibre.total(), M.fibre.total());
  for (auto& t : x.terms) {
    DMat v = hol_hat_simplex(M, alpha, t.s, q, sc);
    v *= t.coeff;
    acc += v;
  }
  return acc;
}

/* ---- the I^Y pairing and the suspended operators ---- */

/* A differential form on the Moore loop space given through its integrals
 * over simplices (the only access the pairing ever needs). */
struct LoopSpaceForm {
  int degree = 0;  // the form degree paired against dim-k simplices
  std::function<DMat(const MooreLoopSimplex&)> integrate;  // int_{Delta_k} nu^* alpha
};

inline double i_pairing_sign(int form_degree) {
  long e = static_cast<long>(form_degree + 1) * (form_degree + 2) / 2;
  return (e % 2) ? -1.0 : 1.0;
}

/* I^Y(alpha)(s mu_1 ox .. ox s mu_k): arity-1 supported. */
inline DMat chain_pairing_I(const LoopSpaceForm& alpha,
                            const std::vector<const SingularChain*>& chains, int rows,
                            int cols) {
  DMat acc(rows, cols);
  if (chains.size() != 1) return acc;  // "0 otherwise"
  for (auto& t : chains[0]->terms) {
    if (t.s.k != alpha.degree) continue;
    DMat v = alpha.integrate(t.s);
    v *= t.coeff * i_pairing_sign(alpha.degree);
    acc += v;
  }
  return acc;
}

/* suspended Hochschild operators on arity-(<=1) cochain values over the
 * Pontryagin algebra, with the signs the factorization lemma displays:
 *   b1~(eta)(s mu ox s nu) = (-1)^{dim nu + 1} eta(s(mu * nu))
 *   u~(eta1 ox eta2)(s mu ox s nu) = (-1)^{dim nu (dim mu + 1)}
 *                                     eta1(s mu) . eta2(s nu). */
inline double b1_tilde_sign(int dim_nu) { return (dim_nu % 2) ? 1.0 : -1.0; }
inline double cup_tilde_sign(int dim_mu, int dim_nu) {
  long e = static_cast<long>(dim_nu) * (dim_mu + 1);
  return (e % 2) ? -1.0 : 1.0;
}

/* ---- the FHT chain map phi ---- */

/* beta in Omega(X): m=0 slot gives beta|_*, m=1 pairs a k-simplex with the
 * (k+1)-form integral over Delta_k x [0,1] of the adjoint map's pullback,
 * m>=2 vanishes.  This is the trivial-coefficient restriction of phi~_1. */
struct FhtValue {
  DMat at_point;                      // arity-0 slot
  std::function<DMat(const SingularChain&)> arity1;
};

inline DMat fht_integral(const FormsAlgebra& M, const PolyForm& beta,
                         const MooreLoopSimplex& nu, const QuadratureSpec& q) {
  /* int over Delta_k of the degree-k component of sigma(s beta) on the
   * q-reparametrized plot */
  const int k = nu.k;
  LoopFamily plot = q_reparametrized(nu);
  std::vector<std::vector<double>> basis(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i) basis[i][i] = 1.0;
  DMat acc(M.fibre.total(), M.fibre.total());
  simplex_quadrature(k, 0.0, 1.0, q, [&](const std::vector<double>& t, double w) {
    SuperElem val = iterated_integral_word(M, std::nullopt, {beta}, plot, t, basis, q);
    HolonomyValue H{val, 0, 0, &M.fibre};
    DMat comp = H.component(k);
    comp *= w;
    acc += comp;
  });
  return acc;
}

inline FhtValue fht_phi(const FormsAlgebra& M, const PolyForm& beta,
                        const std::vector<double>& basepoint, const QuadratureSpec& q) {
  FhtValue out;
  const int total = M.fibre.total();
  out.at_point = DMat(total, total);
  for (auto& [key, c] : beta.terms) {
    if (key.dxmask != 0) continue;
    double v = to_double(c) * key.mono.eval(basepoint);
    out.at_point.at(M.fibre.offset(key.block.p) + key.block.i,
                    M.fibre.offset(key.block.q) + key.block.j) += v;
  }
  const FormsAlgebra* Mp = &M;
  PolyForm b = beta;
  QuadratureSpec qq = q;
  out.arity1 = [Mp, b, qq](const SingularChain& mu) {
    DMat acc(Mp->fibre.total(), Mp->fibre.total());
    for (auto& t : mu.terms) {
      /* sigma(s beta) has form-degree k on k-simplex plots; the I-pairing
       * sign enters at that degree */
      DMat v = fht_integral(*Mp, b, t.s, qq);
      v *= t.coeff * i_pairing_sign(t.s.k);
      acc += v;
    }
    return acc;
  };
  return out;
}

}  // namespace holobar
