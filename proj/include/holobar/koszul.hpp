#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace holobar {

/* Sign character on permutations of graded letters.  `perm[i]` is the target
 * position of the letter that starts at position i; `degrees[i]` is the
 * (caller-supplied, typically suspended) degree of that letter.  The value is
 * the product of (-1)^{d_i d_j} over all pairs that invert, which is the
 * unique character generated by adjacent transpositions. */
inline int koszul_sign(std::span<const int> perm, std::span<const int> degrees) {
  if (perm.size() != degrees.size())
    throw std::invalid_argument("koszul_sign: perm/degrees length mismatch");
  const std::size_t k = perm.size();
  std::vector<char> seen(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    if (perm[i] < 0 || static_cast<std::size_t>(perm[i]) >= k || seen[perm[i]])
      throw std::invalid_argument("koszul_sign: not a permutation");
    seen[perm[i]] = 1;
  }
  int sign = 1;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (perm[i] > perm[j] && (degrees[i] & 1) && (degrees[j] & 1)) sign = -sign;
  return sign;
}

inline int koszul_sign(const std::vector<int>& perm, const std::vector<int>& degrees) {
  return koszul_sign(std::span<const int>(perm), std::span<const int>(degrees));
}

/* Parity (+1/-1) of a permutation, for Eilenberg-Zilber shuffle signs. */
inline int perm_parity(std::span<const int> perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) sign = -sign;
  return sign;
}

/* All (k,l)-shuffles as position lists: result[s] is the vector `pos` of
 * length k+l where pos[i] is the output slot of input letter i (letters
 * 0..k-1 from the left word, k..k+l-1 from the right word, both in order). */
inline std::vector<std::vector<int>> shuffles(int k, int l) {
  std::vector<std::vector<int>> out;
  std::vector<int> slots(k);
  // choose which output slots receive the left word
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  auto emit = [&]() {
    std::vector<int> pos(k + l);
    std::vector<char> used(k + l, 0);
    for (int i = 0; i < k; ++i) {
      pos[i] = c[i];
      used[c[i]] = 1;
    }
    int q = 0;
    for (int j = 0; j < k + l; ++j)
      if (!used[j]) pos[k + q++] = j;
    out.push_back(std::move(pos));
  };
  if (k == 0 || l == 0) {
    std::vector<int> pos(k + l);
    for (int i = 0; i < k + l; ++i) pos[i] = i;
    out.push_back(pos);
    return out;
  }
  while (true) {
    emit();
    int i = k - 1;
    while (i >= 0 && c[i] == l + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

}  // namespace holobar
