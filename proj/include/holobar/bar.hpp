#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "holobar/koszul.hpp"
#include "holobar/linalg.hpp"
#include "holobar/rational.hpp"

namespace holobar {

/* Coefficient bimodule of a Hochschild chain complex.  Trivial means M = R
 * with both actions through the augmentation; Regular means M = A (the bar
 * complex).  The m slot is stored as an algebra element in both cases; for
 * the trivial module it is a multiple of the unit. */
enum class BarModule { trivial, regular };

/* The printed wrap-around exponent of b_1 is (|m|+...+|a_{n-1}|-n-1)(|a_n|-1);
 * `shifted` replaces -n-1 by -n.  b^2 = 0 decides which one is in force (see
 * the bar tests); as_printed is the one that survives. */
enum class WrapSign { as_printed, shifted };

template <class Backend>
struct BarChain {
  using Elem = typename Backend::Elem;

  struct WordKey {
    int dm = 0;                 // degree of the m slot
    std::vector<int> ldeg;      // letter degrees (cache; |a_i|-1 are the suspended ones)
    std::vector<Elem> letters;  // homogeneous, bar-projected

    bool operator<(const WordKey& o) const {
      if (letters.size() != o.letters.size()) return letters.size() < o.letters.size();
      if (ldeg != o.ldeg) return ldeg < o.ldeg;
      if (dm != o.dm) return dm < o.dm;
      return letters < o.letters;
    }
    bool operator==(const WordKey& o) const {
      return dm == o.dm && ldeg == o.ldeg && letters == o.letters;
    }
  };

  BarModule tag = BarModule::regular;
  std::map<WordKey, Elem> words;  // key -> m slot

  bool zero() const { return words.empty(); }
  std::size_t size() const { return words.size(); }

  int word_degree(const WordKey& k) const {
    int d = k.dm;
    for (int ld : k.ldeg) d += ld - 1;
    return d;
  }

  void add_keyed(WordKey key, Elem m, const Backend& B) {
    if (B.is_zero(m)) return;
    auto it = words.find(key);
    if (it == words.end()) {
      words.emplace(std::move(key), std::move(m));
    } else {
      it->second += m;
      if (B.is_zero(it->second)) words.erase(it);
    }
  }

  /* General insertion: bar-projects every letter and expands it into unit
   * basis terms (tensors are multilinear, so the stored form must be), with
   * the coefficients folded into the m slot.  m itself is split into
   * homogeneous parts only. */
  void add_word(const Elem& m_raw, const std::vector<Elem>& letters_raw, const Backend& B,
                const rat& scale = rat(1)) {
    if (is_zero(scale) || B.is_zero(m_raw)) return;
    std::vector<std::vector<std::tuple<int, Elem, rat>>> parts;
    parts.reserve(letters_raw.size());
    for (const Elem& l : letters_raw) {
      Elem p = B.bar_project(l);
      if (B.is_zero(p)) return;
      parts.push_back(B.term_decomposition(p));
    }
    std::vector<std::pair<int, Elem>> mparts = B.homogeneous_parts(m_raw);
    std::vector<std::size_t> idx(parts.size(), 0);
    for (auto& [dm, mpart] : mparts) {
      std::fill(idx.begin(), idx.end(), std::size_t{0});
      while (true) {
        WordKey key;
        key.dm = dm;
        key.letters.reserve(parts.size());
        key.ldeg.reserve(parts.size());
        rat f = scale;
        for (std::size_t i = 0; i < parts.size(); ++i) {
          auto& [dg, term, coeff] = parts[i][idx[i]];
          key.ldeg.push_back(dg);
          key.letters.push_back(term);
          f *= coeff;
        }
        Elem m = mpart;
        m *= f;
        add_keyed(std::move(key), std::move(m), B);
        std::size_t j = 0;
        for (; j < parts.size(); ++j) {
          if (++idx[j] < parts[j].size()) break;
          idx[j] = 0;
        }
        if (j == parts.size()) break;
      }
    }
  }

  BarChain& operator+=(const BarChain& o) {
    // backend-free merge relies on Elem's own += / zero test
    for (auto& [k, m] : o.words) {
      auto it = words.find(k);
      if (it == words.end()) {
        words.emplace(k, m);
      } else {
        it->second += m;
        if (it->second.zero()) words.erase(it);
      }
    }
    return *this;
  }
  BarChain& operator-=(const BarChain& o) {
    for (auto& [k, m] : o.words) {
      auto it = words.find(k);
      Elem neg = m;
      neg *= rat(-1);
      if (it == words.end()) {
        words.emplace(k, std::move(neg));
      } else {
        it->second += neg;
        if (it->second.zero()) words.erase(it);
      }
    }
    return *this;
  }
  BarChain& operator*=(const rat& s) {
    if (is_zero(s)) {
      words.clear();
      return *this;
    }
    for (auto& [k, m] : words) m *= s;
    return *this;
  }
  friend BarChain operator+(BarChain a, const BarChain& b) { return a += b; }
  friend BarChain operator-(BarChain a, const BarChain& b) { return a -= b; }
  friend BarChain operator*(BarChain a, const rat& s) { return a *= s; }
  bool operator==(const BarChain& o) const { return tag == o.tag && words == o.words; }
};

namespace detail {
inline int pow_sign(long e) { return (e % 2) ? -1 : 1; }
}

/* Action of the algebra on the m slot, per module tag. */
template <class Backend>
typename Backend::Elem module_right_act(BarModule tag, const Backend& B,
                                        const typename Backend::Elem& m,
                                        const typename Backend::Elem& a) {
  if (tag == BarModule::regular) return B.mul(m, a);
  typename Backend::Elem out = m;
  out *= B.aug(a);
  return out;
}
template <class Backend>
typename Backend::Elem module_left_act(BarModule tag, const Backend& B,
                                       const typename Backend::Elem& a,
                                       const typename Backend::Elem& m) {
  if (tag == BarModule::regular) return B.mul(a, m);
  typename Backend::Elem out = m;
  out *= B.aug(a);
  return out;
}

/* b = b_0 + b_1 with the printed signs:
 *   b_0 = dm ox a_1..a_n + sum_i (-1)^{|m|+...+|a_{i-1}|-i} m ox .. da_i ..
 *   b_1 = (-1)^{|m|+1} ma_1 ox a_2..a_n
 *         + sum_{i<n} (-1)^{|m|+...+|a_i|-i+1} m ox .. (a_i a_{i+1}) ..
 *         + (-1)^{(|m|+...+|a_{n-1}|-n-1)(|a_n|-1)} a_n m ox a_1..a_{n-1}. */
template <class Backend>
BarChain<Backend> hochschild_boundary(const BarChain<Backend>& x, const Backend& B,
                                      WrapSign wrap = WrapSign::as_printed) {
  using Chain = BarChain<Backend>;
  using Elem = typename Backend::Elem;
  Chain out;
  out.tag = x.tag;
  for (auto& [key, m] : x.words) {
    const int n = static_cast<int>(key.letters.size());
    const int dm = key.dm;
    // b_0
    {
      Elem dmv = B.d(m);
      if (!B.is_zero(dmv)) out.add_word(dmv, key.letters, B);
    }
    long prefix = dm;
    for (int i = 1; i <= n; ++i) {
      Elem da = B.d(key.letters[i - 1]);
      if (!B.is_zero(da)) {
        std::vector<Elem> ls = key.letters;
        ls[i - 1] = da;
        int sgn = detail::pow_sign(prefix - i);
        Elem mm = m;
        mm *= rat(sgn);
        out.add_word(mm, ls, B);
      }
      prefix += key.ldeg[i - 1];
    }
    // b_1
    if (n >= 1) {
      {
        Elem ma = module_right_act(x.tag, B, m, key.letters[0]);
        if (!B.is_zero(ma)) {
          std::vector<Elem> ls(key.letters.begin() + 1, key.letters.end());
          ma *= rat(detail::pow_sign(dm + 1));
          out.add_word(ma, ls, B);
        }
      }
      long pre = dm;
      for (int i = 1; i <= n - 1; ++i) {
        pre += key.ldeg[i - 1];
        Elem prod = B.mul(key.letters[i - 1], key.letters[i]);
        if (B.is_zero(prod)) continue;
        std::vector<Elem> ls;
        ls.reserve(n - 1);
        for (int j = 0; j < n; ++j) {
          if (j == i - 1) {
            ls.push_back(prod);
          } else if (j == i) {
            continue;
          } else {
            ls.push_back(key.letters[j]);
          }
        }
        Elem mm = m;
        mm *= rat(detail::pow_sign(pre - i + 1));
        out.add_word(mm, ls, B);
      }
      {
        Elem am = module_left_act(x.tag, B, key.letters[n - 1], m);
        if (!B.is_zero(am)) {
          long head = dm;
          for (int j = 0; j < n - 1; ++j) head += key.ldeg[j];
          long shift = (wrap == WrapSign::as_printed) ? (head - n - 1) : (head - n);
          int sgn = detail::pow_sign(shift * (key.ldeg[n - 1] - 1));
          std::vector<Elem> ls(key.letters.begin(), key.letters.end() - 1);
          am *= rat(sgn);
          out.add_word(am, ls, B);
        }
      }
    }
  }
  return out;
}

/* Shuffle product on the bar complex of a graded-commutative algebra:
 * global prefactor (-1)^{(|a_1|+...+|a_k|-k)|gamma|}, then the Koszul
 * character over (k,l)-shuffles of the suspended letters. */
template <class Backend>
BarChain<Backend> shuffle_product(const BarChain<Backend>& x, const BarChain<Backend>& y,
                                  const Backend& B) {
  if (!B.commutative())
    throw std::invalid_argument("shuffle_product: algebra is not graded-commutative");
  if (x.tag != BarModule::regular || y.tag != BarModule::regular)
    throw std::invalid_argument("shuffle_product: both factors must live in the bar complex");
  using Chain = BarChain<Backend>;
  using Elem = typename Backend::Elem;
  Chain out;
  out.tag = BarModule::regular;
  for (auto& [kx, mx] : x.words)
    for (auto& [ky, my] : y.words) {
      const int k = static_cast<int>(kx.letters.size());
      const int l = static_cast<int>(ky.letters.size());
      long sx = 0;
      for (int d : kx.ldeg) sx += d - 1;
      int pre = detail::pow_sign(sx * ky.dm);
      Elem m = B.mul(mx, my);
      if (B.is_zero(m)) continue;
      m *= rat(pre);
      for (const std::vector<int>& pos : shuffles(k, l)) {
        int sgn = 1;
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < l; ++j)
            if (pos[i] > pos[k + j] && ((kx.ldeg[i] - 1) & 1) && ((ky.ldeg[j] - 1) & 1))
              sgn = -sgn;
        std::vector<Elem> ls(k + l);
        for (int i = 0; i < k; ++i) ls[pos[i]] = kx.letters[i];
        for (int j = 0; j < l; ++j) ls[pos[k + j]] = ky.letters[j];
        Elem mm = m;
        mm *= rat(sgn);
        out.add_word(mm, ls, B);
      }
    }
  return out;
}

/* Deconcatenation coproduct on HC(A) (trivial coefficients, signs +1).
 * One output pair per split per word. */
template <class Backend>
std::vector<std::pair<BarChain<Backend>, BarChain<Backend>>> coproduct(
    const BarChain<Backend>& x, const Backend& B) {
  if (x.tag != BarModule::trivial)
    throw std::invalid_argument("coproduct: defined on HC(A) with trivial coefficients");
  using Chain = BarChain<Backend>;
  using Elem = typename Backend::Elem;
  std::vector<std::pair<Chain, Chain>> out;
  for (auto& [key, m] : x.words) {
    const int k = static_cast<int>(key.letters.size());
    for (int i = 0; i <= k; ++i) {
      Chain left, right;
      left.tag = right.tag = BarModule::trivial;
      std::vector<Elem> ls(key.letters.begin(), key.letters.begin() + i);
      std::vector<Elem> rs(key.letters.begin() + i, key.letters.end());
      left.add_word(m, ls, B);
      right.add_word(B.unit(), rs, B);
      if (!left.zero() && !right.zero()) out.emplace_back(std::move(left), std::move(right));
    }
  }
  return out;
}

/* S_i(f): insert f at slot i (1-based, up to arity+1). */
template <class Backend>
BarChain<Backend> insert_letter(const BarChain<Backend>& x, int slot,
                                const typename Backend::Elem& f, const Backend& B) {
  using Chain = BarChain<Backend>;
  using Elem = typename Backend::Elem;
  Chain out;
  out.tag = x.tag;
  for (auto& [key, m] : x.words) {
    const int n = static_cast<int>(key.letters.size());
    if (slot < 1 || slot > n + 1)
      throw std::invalid_argument("insert_letter: slot out of range");
    std::vector<Elem> ls = key.letters;
    ls.insert(ls.begin() + (slot - 1), f);
    out.add_word(m, ls, B);
  }
  return out;
}

/* Normalized-complex rewriter.  Two families of rules, both consequences of
 * killing the images of S_i(f) and R_i(f) = [b, S_i(f)]:
 *   - any word with a letter of algebra-degree 0 is degenerate and drops;
 *   - a letter recognized as s*d(f) for admissible f absorbs into its
 *     neighbours (identity (basic)); the replacement is derived on the spot
 *     from b(S_i(f) . word-with-slot-removed), which fixes every sign.
 * Letters of positive degree that are exact but not recognized are kept and
 * reported. */
template <class Backend>
struct NormalFormRewriter {
  using Elem = typename Backend::Elem;
  struct Admissible {
    Elem f;   // degree 0
    Elem df;  // cached differential
  };
  std::vector<Admissible> table;
  /* optional backend-specific recognizer: letter -> (f, s) with letter = s*df */
  std::function<std::optional<std::pair<Elem, rat>>(const Elem&)> recognize_extra;

  void add(const Elem& f, const Backend& B) { table.push_back({f, B.d(f)}); }

  /* letter = d(f) for f in the linear span of the admissible set?  The
   * operators S_i and R_i are linear in f, so the span is admissible too. */
  std::optional<std::pair<Elem, rat>> recognize(const Elem& letter, const Backend& B) const {
    if (!table.empty()) {
      std::map<Elem, int> coords;
      auto index_terms = [&](const Elem& x) {
        for (auto& [dg, term, c] : B.term_decomposition(x))
          if (coords.emplace(term, static_cast<int>(coords.size())).second) {
          }
      };
      index_terms(letter);
      std::vector<int> live;
      for (std::size_t a = 0; a < table.size(); ++a)
        if (!B.is_zero(table[a].df)) {
          index_terms(table[a].df);
          live.push_back(static_cast<int>(a));
        }
      if (!live.empty()) {
        QMat M(static_cast<int>(coords.size()), static_cast<int>(live.size()));
        std::vector<rat> rhs(coords.size(), rat(0));
        for (std::size_t c = 0; c < live.size(); ++c)
          for (auto& [dg, term, v] : B.term_decomposition(table[live[c]].df))
            M.at(coords.at(term), static_cast<int>(c)) += v;
        for (auto& [dg, term, v] : B.term_decomposition(letter)) rhs[coords.at(term)] += v;
        if (auto x = solve(M, rhs)) {
          Elem f = B.zero();
          for (std::size_t c = 0; c < live.size(); ++c) {
            Elem t = table[live[c]].f;
            t *= (*x)[c];
            f += t;
          }
          if (!B.is_zero(f)) return std::make_pair(f, rat(1));
        }
      }
    }
    if (recognize_extra) return recognize_extra(letter);
    return std::nullopt;
  }

  /* letter = s * ref, syntactically? */
  static std::optional<rat> proportionality(const Elem& letter, const Elem& ref) {
    if (letter.zero() || ref.zero()) return std::nullopt;
    return Elem::proportional(letter, ref);
  }
};

template <class Backend>
struct ReduceResult {
  BarChain<Backend> value;
  std::vector<std::string> unreduced;  // printable letters no rule reached
};

namespace detail {

/* x == s*y as chains (same keys, constant m ratio)? */
template <class Chain, class Elem>
std::optional<rat> chain_ratio(const Chain& x, const Chain& y) {
  if (x.words.size() != y.words.size() || x.words.empty()) return std::nullopt;
  auto ix = x.words.begin();
  auto iy = y.words.begin();
  std::optional<rat> s;
  for (; ix != x.words.end(); ++ix, ++iy) {
    if (!(ix->first == iy->first)) return std::nullopt;
    auto r = Elem::proportional(ix->second, iy->second);
    if (!r) return std::nullopt;
    if (!s)
      s = *r;
    else if (!(*s == *r))
      return std::nullopt;
  }
  return s;
}

}  // namespace detail

/* Reduce a chain to its normal form in N(A) (restricted to the admissible
 * set).  Words with a degree-0 letter drop (image of S_i).  Exact letters
 * are found by grouping words that agree outside one slot and have
 * proportional m slots, summing the slot letters, and asking the recognizer;
 * the replacement is derived from b(S_i(f) w') so every sign comes out of
 * the boundary operator itself. */
template <class Backend>
ReduceResult<Backend> degenerate_reduce(const BarChain<Backend>& x,
                                        const NormalFormRewriter<Backend>& rw,
                                        const Backend& B,
                                        WrapSign wrap = WrapSign::as_printed) {
  using Chain = BarChain<Backend>;
  using Elem = typename Backend::Elem;
  using Key = typename Chain::WordKey;

  Chain work;
  work.tag = x.tag;
  std::vector<std::string> unreduced;
  // rule S up front
  for (auto& [k, m] : x.words) {
    bool degenerate = false;
    for (int d : k.ldeg)
      if (d == 0) {
        degenerate = true;
        break;
      }
    if (!degenerate) work.add_keyed(k, m, B);
  }

  int guard = 0;
  bool progress = true;
  while (progress) {
    if (++guard > 100000) throw std::runtime_error("degenerate_reduce: no fixpoint");
    progress = false;
    for (auto it = work.words.begin(); it != work.words.end();) {
      const Key& key = it->first;
      const Elem& m0 = it->second;
      const int n = static_cast<int>(key.letters.size());
      for (int slot = 1; slot <= n && !progress; ++slot) {
        /* group: words agreeing with `key` outside `slot` whose m is
         * proportional to m0 */
        std::vector<typename std::map<Key, Elem>::iterator> group;
        Elem lsum = B.zero();
        for (auto jt = work.words.begin(); jt != work.words.end(); ++jt) {
          const Key& k2 = jt->first;
          if (k2.dm != key.dm || k2.ldeg != key.ldeg) continue;
          if (static_cast<int>(k2.letters.size()) != n) continue;
          bool same = true;
          for (int j = 0; j < n; ++j) {
            if (j == slot - 1) continue;
            if (!(k2.letters[j] == key.letters[j])) {
              same = false;
              break;
            }
          }
          if (!same) continue;
          auto r = Elem::proportional(jt->second, m0);
          if (!r) continue;
          Elem scaled = k2.letters[slot - 1];
          scaled *= *r;
          lsum += scaled;
          group.push_back(jt);
        }
        if (group.empty()) continue;
        auto hit = rw.recognize(lsum, B);
        if (!hit) continue;
        const Elem& f = hit->first;
        const rat& s = hit->second;  // lsum = s * d(f)

        /* derive the absorption from v = b(S_slot(f) w') */
        Chain wprime;
        wprime.tag = x.tag;
        {
          Key k2;
          k2.dm = key.dm;
          for (int j = 0; j < n; ++j) {
            if (j == slot - 1) continue;
            k2.ldeg.push_back(key.ldeg[j]);
            k2.letters.push_back(key.letters[j]);
          }
          wprime.add_keyed(std::move(k2), m0, B);
        }
        Chain v = hochschild_boundary(insert_letter(wprime, slot, f, B), B, wrap);
        Chain arity_n, absorbed;
        arity_n.tag = absorbed.tag = x.tag;
        for (auto& [vk, vm] : v.words) {
          bool has0 = false;
          for (int d : vk.ldeg)
            if (d == 0) {
              has0 = true;
              break;
            }
          if (has0) continue;
          if (static_cast<int>(vk.letters.size()) == n)
            arity_n.add_keyed(vk, vm, B);
          else
            absorbed.add_keyed(vk, vm, B);
        }
        /* arity_n must equal c0 * (m0 ox ... df at slot ... ) */
        Chain target;
        target.tag = x.tag;
        {
          std::vector<Elem> ls = key.letters;
          ls[slot - 1] = B.d(f);
          target.add_word(m0, ls, B);
        }
        auto c0 = detail::chain_ratio<Chain, Elem>(arity_n, target);
        if (!c0 || is_zero(*c0)) {
          if (arity_n.zero() && absorbed.zero()) {
            // the whole group is degenerate
            for (auto jt : group) work.words.erase(jt);
            progress = true;
            break;
          }
          continue;  // derivation did not isolate this group; try next slot
        }
        for (auto jt : group) work.words.erase(jt);
        absorbed *= -s / *c0;
        work += absorbed;
        // rule S again on whatever appeared
        Chain swept;
        swept.tag = x.tag;
        for (auto& [k, m] : work.words) {
          bool degenerate = false;
          for (int d : k.ldeg)
            if (d == 0) {
              degenerate = true;
              break;
            }
          if (!degenerate) swept.add_keyed(k, m, B);
        }
        work = std::move(swept);
        progress = true;
      }
      if (progress) break;  // iterators into work are stale after a rewrite
      ++it;
    }
  }
  /* report closed positive-degree letters outside the admissible reach */
  for (auto& [k, m] : work.words)
    for (std::size_t i = 0; i < k.letters.size(); ++i) {
      if (k.ldeg[i] <= 0) continue;
      if (!B.is_zero(B.d(k.letters[i]))) continue;
      if (rw.recognize(k.letters[i], B)) continue;
      std::string s = B.to_string(k.letters[i]);
      if (std::find(unreduced.begin(), unreduced.end(), s) == unreduced.end())
        unreduced.push_back(s);
    }
  return {std::move(work), std::move(unreduced)};
}

}  // namespace holobar
