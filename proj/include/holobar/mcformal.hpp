#pragma once

#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "holobar/backend.hpp"
#include "holobar/bar.hpp"
#include "holobar/polyform.hpp"

namespace holobar {

/* Hard truncation order for the completed bar complex: computations are
 * exact modulo words of arity > T. */
struct TruncationOrder {
  int T = 4;
};

template <class Backend>
BarChain<Backend> truncate_arity(const BarChain<Backend>& x, int max_arity) {
  BarChain<Backend> out;
  out.tag = x.tag;
  for (auto& [k, m] : x.words)
    if (static_cast<int>(k.letters.size()) <= max_arity) out.words.emplace(k, m);
  return out;
}

/* Element of B(A) ox K: chains over A indexed by a K basis label. */
template <class AB>
struct BarChainK {
  using Chain = BarChain<AB>;
  using Elem = typename AB::Elem;
  std::map<int, Chain> comps;

  bool zero() const {
    for (auto& [k, c] : comps)
      if (!c.zero()) return false;
    return true;
  }
  void prune() {
    for (auto it = comps.begin(); it != comps.end();)
      it = it->second.zero() ? comps.erase(it) : std::next(it);
  }
  Chain& at(int kidx) {
    auto it = comps.find(kidx);
    if (it == comps.end()) {
      it = comps.emplace(kidx, Chain{}).first;
      it->second.tag = BarModule::regular;
    }
    return it->second;
  }
  BarChainK& operator+=(const BarChainK& o) {
    for (auto& [k, c] : o.comps) at(k) += c;
    prune();
    return *this;
  }
  BarChainK& operator-=(const BarChainK& o) {
    for (auto& [k, c] : o.comps) at(k) -= c;
    prune();
    return *this;
  }
  BarChainK& operator*=(const rat& s) {
    for (auto& [k, c] : comps) c *= s;
    prune();
    return *this;
  }
  friend BarChainK operator+(BarChainK a, const BarChainK& b) { return a += b; }
  friend BarChainK operator-(BarChainK a, const BarChainK& b) { return a -= b; }
  bool operator==(const BarChainK& o) const {
    BarChainK d = *this;
    d -= o;
    return d.zero();
  }
};

template <class AB>
BarChainK<AB> boundary_k(const BarChainK<AB>& x, const AB& A,
                         WrapSign wrap = WrapSign::as_printed) {
  BarChainK<AB> out;
  for (auto& [k, c] : x.comps) out.at(k) = hochschild_boundary(c, A, wrap);
  out.prune();
  return out;
}

template <class AB>
BarChainK<AB> truncate_arity_k(const BarChainK<AB>& x, int max_arity) {
  BarChainK<AB> out;
  for (auto& [k, c] : x.comps) out.at(k) = truncate_arity(c, max_arity);
  out.prune();
  return out;
}

template <class AB>
BarChainK<AB> reduce_k(const BarChainK<AB>& x, const NormalFormRewriter<AB>& rw, const AB& A,
                       std::vector<std::string>* unreduced = nullptr,
                       WrapSign wrap = WrapSign::as_printed) {
  BarChainK<AB> out;
  for (auto& [k, c] : x.comps) {
    auto r = degenerate_reduce(c, rw, A, wrap);
    out.at(k) = r.value;
    if (unreduced)
      for (auto& s : r.unreduced) unreduced->push_back(s);
  }
  out.prune();
  return out;
}

/* Splitter for A ox K built as a finite tensor spec. */
struct FiniteTensorSplit {
  const TensorDga* T = nullptr;
  using TElem = Element;
  using AElem = Element;

  std::vector<std::tuple<AElem, int, rat>> split(const TElem& x) const {
    std::vector<std::tuple<AElem, int, rat>> out;
    out.reserve(x.c.size());
    for (auto& [idx, v] : x.c) {
      auto [ia, ik] = T->split(idx);
      out.emplace_back(Element::basis(ia), ik, v);
    }
    return out;
  }
};

/* Splitter for matrix-valued polynomial forms: scalar form part + End(V)
 * basis index, enumerated exactly as end_algebra() enumerates blocks. */
struct FormsTensorSplit {
  const FormsAlgebra* W = nullptr;  // matrix-valued
  std::map<std::tuple<int, int, int, int>, int> block_index;

  using TElem = PolyForm;
  using AElem = PolyForm;

  void build_index() {
    block_index.clear();
    int c = 0;
    for (auto& [p, dp] : W->fibre.dims)
      for (auto& [q, dq] : W->fibre.dims)
        for (int i = 0; i < dp; ++i)
          for (int j = 0; j < dq; ++j) block_index[{p, q, i, j}] = c++;
  }

  std::vector<std::tuple<AElem, int, rat>> split(const TElem& x) const {
    std::vector<std::tuple<AElem, int, rat>> out;
    out.reserve(x.terms.size());
    for (auto& [k, c] : x.terms) {
      PolyForm a;
      a.add({k.mono, k.dxmask, {0, 0, 0, 0}, k.den_exp}, rat(1));
      auto it = block_index.find({k.block.p, k.block.q, k.block.i, k.block.j});
      if (it == block_index.end()) throw std::logic_error("FormsTensorSplit: unknown block");
      out.emplace_back(std::move(a), it->second, c);
    }
    return out;
  }
};

/* Degree-1 candidate beta in (A ox K)^1 together with its ambient data. */
template <class TB>
struct McCandidate {
  typename TB::Elem beta;
};

/* Invertible degree-0 gauge with cached exact inverse. */
template <class TB>
struct GaugeElement {
  typename TB::Elem g, ginv;

  static GaugeElement make(const TB& W, const typename TB::Elem& g,
                           const typename TB::Elem& ginv) {
    typename TB::Elem check = W.mul(g, ginv);
    check -= W.unit();
    if (!W.is_zero(check)) throw std::invalid_argument("gauge: g*ginv != 1");
    check = W.mul(ginv, g);
    check -= W.unit();
    if (!W.is_zero(check)) throw std::invalid_argument("gauge: ginv*g != 1");
    return {g, ginv};
  }
};

/* The formal-holonomy operations of section-2 scope, over a tensor algebra
 * W = A ox K presented by backend TB, base backend AB and a splitter. */
template <class TB, class AB, class Split>
struct McFormal {
  const TB* W;
  const AB* A;
  const DgAlgebraSpec* K;
  Split split;
  WrapSign wrap = WrapSign::as_printed;

  using TElem = typename TB::Elem;
  using AElem = typename AB::Elem;
  using TChain = BarChain<TB>;
  using KChain = BarChainK<AB>;

  TElem mc_residual(const TElem& beta) const {
    TElem r = W->d(beta);
    r += W->mul(beta, beta);
    return r;
  }

  /* 1 ox e^beta = sum_k 1 ox beta^{ox k}, arities <= T */
  TChain bar_exponential(const TElem& beta, int T) const {
    TChain out;
    out.tag = BarModule::regular;
    std::vector<TElem> letters;
    for (int k = 0; k <= T; ++k) {
      out.add_word(W->unit(), letters, *W);
      letters.push_back(beta);
    }
    return out;
  }

  /* phi_K: a_0 ox k_0 ox ... ox a_r ox k_r |->
   * (-1)^{sum_{i<j} |k_i|(|a_j|+1)} a_0 ox a_1..a_r ox k_0...k_r */
  KChain phi_K(const TChain& x) const {
    KChain out;
    for (auto& [key, m] : x.words) {
      const int r = static_cast<int>(key.letters.size());
      std::vector<std::vector<std::tuple<AElem, int, rat>>> slots;
      slots.reserve(r + 1);
      slots.push_back(split.split(m));
      for (auto& l : key.letters) slots.push_back(split.split(l));
      std::vector<std::size_t> idx(r + 1, 0);
      bool any_empty = false;
      for (auto& s : slots)
        if (s.empty()) any_empty = true;
      if (any_empty) continue;
      while (true) {
        rat coeff(1);
        long sgn = 0;
        std::vector<int> kdegs(r + 1);
        std::vector<int> kidx(r + 1);
        std::vector<const AElem*> aparts(r + 1);
        for (int i = 0; i <= r; ++i) {
          auto& [a, ki, c] = slots[i][idx[i]];
          aparts[i] = &a;
          kidx[i] = ki;
          kdegs[i] = K->space.degree[ki];
          coeff *= c;
        }
        /* the a-part degree of slot j: m-part degree is key.dm - |k_0|,
         * letter j degree is key.ldeg[j-1] - |k_j| */
        std::vector<int> adeg(r + 1);
        adeg[0] = key.dm - kdegs[0];
        for (int j = 1; j <= r; ++j) adeg[j] = key.ldeg[j - 1] - kdegs[j];
        for (int i = 0; i <= r; ++i)
          for (int j = i + 1; j <= r; ++j) sgn += static_cast<long>(kdegs[i]) * (adeg[j] + 1);
        if (sgn % 2) coeff = -coeff;
        /* multiply out k_0...k_r in K */
        Element kprod = Element::basis(kidx[0]);
        for (int j = 1; j <= r; ++j) {
          Element next;
          for (auto& [ci, cv] : kprod.c)
            if (const Element* mm = K->mult_entry(ci, kidx[j]))
              for (auto& [ti, tv] : mm->c) next.add_term(ti, cv * tv);
          kprod = std::move(next);
          if (kprod.zero()) break;
        }
        if (!kprod.zero()) {
          std::vector<AElem> ls;
          ls.reserve(r);
          for (int j = 1; j <= r; ++j) ls.push_back(*aparts[j]);
          for (auto& [ki, kv] : kprod.c)
            out.at(ki).add_word(*aparts[0], ls, *A, coeff * kv);
        }
        std::size_t j = 0;
        for (; j < slots.size(); ++j) {
          if (++idx[j] < slots[j].size()) break;
          idx[j] = 0;
        }
        if (j == slots.size()) break;
      }
    }
    out.prune();
    return out;
  }

  /* left multiplication by a ox kappa inside B(A) ox K (A commutative) */
  void mul_left_term(const AElem& a, int adeg, int kap, KChain& acc, const KChain& x,
                     const rat& coeff) const {
    int kapdeg = K->space.degree[kap];
    for (auto& [ki, chain] : x.comps) {
      const Element* kp = K->mult_entry(kap, ki);
      if (!kp) continue;
      for (auto& [key, m] : chain.words) {
        long bar_deg = chain.word_degree(key);
        rat c = coeff;
        if ((static_cast<long>(kapdeg) * bar_deg) % 2) c = -c;
        AElem m2 = A->mul(a, m);
        if (A->is_zero(m2)) continue;
        for (auto& [ti, tv] : kp->c) {
          typename BarChain<AB>::WordKey nk = key;
          nk.dm = key.dm + adeg;
          AElem mm = m2;
          mm *= c * tv;
          acc.at(ti).add_keyed(std::move(nk), std::move(mm), *A);
        }
      }
    }
  }
  /* right multiplication by a ox kappa */
  void mul_right_term(const KChain& x, const AElem& a, int adeg, int kap, KChain& acc,
                      const rat& coeff) const {
    for (auto& [ki, chain] : x.comps) {
      const Element* kp = K->mult_entry(ki, kap);
      if (!kp) continue;
      int kideg = K->space.degree[ki];
      for (auto& [key, m] : chain.words) {
        long susp = 0;
        for (int d : key.ldeg) susp += d - 1;
        rat c = coeff;
        long sgn = static_cast<long>(adeg) * susp + static_cast<long>(adeg) * kideg;
        if (sgn % 2) c = -c;
        AElem m2 = A->mul(m, a);
        if (A->is_zero(m2)) continue;
        for (auto& [ti, tv] : kp->c) {
          typename BarChain<AB>::WordKey nk = key;
          nk.dm = key.dm + adeg;
          AElem mm = m2;
          mm *= c * tv;
          acc.at(ti).add_keyed(std::move(nk), std::move(mm), *A);
        }
      }
    }
  }

  KChain mul_left(const TElem& w, const KChain& x) const {
    KChain acc;
    for (auto& [a, ki, c] : split.split(w)) {
      auto parts = A->homogeneous_parts(a);
      for (auto& [adeg, ap] : parts) mul_left_term(ap, adeg, ki, acc, x, c);
    }
    acc.prune();
    return acc;
  }
  KChain mul_right(const KChain& x, const TElem& w) const {
    KChain acc;
    for (auto& [a, ki, c] : split.split(w)) {
      auto parts = A->homogeneous_parts(a);
      for (auto& [adeg, ap] : parts) mul_right_term(x, ap, adeg, ki, acc, c);
    }
    acc.prune();
    return acc;
  }

  /* graded commutator [j(w), x] for homogeneous w of degree wdeg */
  KChain bracket(const TElem& w, int wdeg, const KChain& x) const {
    KChain out = mul_left(w, x);
    /* right part word-by-word with the Koszul sign of the word */
    KChain right;
    for (auto& [ki, chain] : x.comps) {
      for (auto& [key, m] : chain.words) {
        KChain single;
        single.at(ki).add_keyed(key, m, *A);
        long deg = chain.word_degree(key) + K->space.degree[ki];
        KChain r = mul_right(single, w);
        if ((deg * static_cast<long>(wdeg)) % 2) r *= rat(-1);
        right += r;
      }
    }
    out -= right;
    out.prune();
    return out;
  }

  /* LHS - RHS of phi_K b(1 ox e^beta) = b phi_K(1 ox e^beta)
   *                                     + [j(beta), phi_K(1 ox e^beta)],
   * exact through arity T-1. */
  KChain phi_identity_residual(const TElem& beta, int T) const {
    TChain e = bar_exponential(beta, T);
    KChain lhs = phi_K(hochschild_boundary(e, *W, wrap));
    KChain phi_e = phi_K(e);
    KChain rhs = boundary_k(phi_e, *A, wrap);
    rhs += bracket(beta, 1, phi_e);
    KChain res = lhs;
    res -= rhs;
    return truncate_arity_k(res, T - 1);
  }

  TElem gauge_act(const TElem& beta, const GaugeElement<TB>& g) const {
    TElem out = W->mul(W->mul(g.ginv, beta), g.g);
    out += W->mul(g.ginv, W->d(g.g));
    return out;
  }

  /* phi_K(1 ox e^{beta . g}) - g^{-1} phi_K(1 ox e^beta) g, reduced in
   * N(A) ox K; zero through arity T-1 for admissible data. */
  KChain gauge_conjugation_residual(const TElem& beta, const GaugeElement<TB>& g,
                                    const NormalFormRewriter<AB>& rw, int T,
                                    std::vector<std::string>* unreduced = nullptr) const {
    TElem bg = gauge_act(beta, g);
    KChain lhs = phi_K(bar_exponential(bg, T));
    KChain rhs = mul_right(mul_left(g.ginv, phi_K(bar_exponential(beta, T))), g.g);
    KChain res = reduce_k(lhs, rw, *A, unreduced, wrap);
    res -= reduce_k(rhs, rw, *A, unreduced, wrap);
    return truncate_arity_k(res, T - 1);
  }
};

}  // namespace holobar
