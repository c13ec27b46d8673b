#include <catch2/catch_amalgamated.hpp>

#include "holobar/koszul.hpp"
#include "holobar/rng.hpp"

using namespace holobar;

TEST_CASE("adjacent transposition of two odd letters") {
  // perm (12) on suspended degrees [1,1]
  std::vector<int> perm{1, 0}, degs{1, 1};
  REQUIRE(koszul_sign(perm, degs) == -1);
}

TEST_CASE("identity permutation is +1") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    int k = rng.range(1, 5);
    std::vector<int> perm(k), degs(k);
    for (int i = 0; i < k; ++i) {
      perm[i] = i;
      degs[i] = rng.range(-2, 3);
    }
    REQUIRE(koszul_sign(perm, degs) == 1);
  }
}

TEST_CASE("3-cycle on degrees [1,1,0]") {
  // (123)->(231): letter 1 -> pos 3, letter 2 -> pos 1, letter 3 -> pos 2
  std::vector<int> perm{2, 0, 1}, degs{1, 1, 0};
  REQUIRE(koszul_sign(perm, degs) == -1);
}

TEST_CASE("koszul_sign is a character at fixed degrees") {
  // exhaustive over S_k for k <= 4
  for (int k = 2; k <= 4; ++k) {
    std::vector<int> degs(k);
    Rng rng(100 + k);
    for (int trial = 0; trial < 5; ++trial) {
      for (int i = 0; i < k; ++i) degs[i] = rng.range(0, 3);
      std::vector<int> p(k);
      for (int i = 0; i < k; ++i) p[i] = i;
      // iterate all permutations sigma, tau
      std::vector<std::vector<int>> all;
      do {
        all.push_back(p);
      } while (std::next_permutation(p.begin(), p.end()));
      for (const auto& sigma : all)
        for (const auto& tau : all) {
          // compose: letter i goes to sigma(tau(i)); degrees move with letters
          std::vector<int> comp(k);
          for (int i = 0; i < k; ++i) comp[i] = sigma[tau[i]];
          // sign(sigma tau) = sign(sigma on tau-permuted degrees) * sign(tau)
          std::vector<int> degs_tau(k);
          for (int i = 0; i < k; ++i) degs_tau[tau[i]] = degs[i];
          int lhs = koszul_sign(comp, degs);
          int rhs = koszul_sign(sigma, degs_tau) * koszul_sign(tau, degs);
          REQUIRE(lhs == rhs);
        }
    }
  }
}

TEST_CASE("length mismatch is rejected") {
  std::vector<int> perm{0, 1}, degs{1};
  REQUIRE_THROWS(koszul_sign(perm, degs));
}

TEST_CASE("shuffle enumeration has binomial count and preserves orders") {
  for (int k = 0; k <= 4; ++k)
    for (int l = 0; l <= 4; ++l) {
      auto sh = shuffles(k, l);
      long expect = 1;
      for (int i = 1; i <= l; ++i) expect = expect * (k + i) / i;
      REQUIRE(static_cast<long>(sh.size()) == expect);
      for (const auto& pos : sh) {
        for (int i = 0; i + 1 < k; ++i) REQUIRE(pos[i] < pos[i + 1]);
        for (int j = k; j + 1 < k + l; ++j) REQUIRE(pos[j] < pos[j + 1]);
      }
    }
}
