#include <catch2/catch_amalgamated.hpp>

#include "holobar/loops.hpp"

using namespace holobar;
using Catch::Approx;

namespace {
LoopFamily unit_circle(int m = 0) {
  FourierSpec spec;
  spec.m = m;
  FourierSpec::Coordinate cx, cy;
  cx.harmonics.push_back({1, {1.0, {}}, {0.0, {}}});  // cos
  cy.harmonics.push_back({1, {0.0, {}}, {1.0, {}}});  // sin
  spec.coords = {cx, cy};
  return fourier_family(spec);
}
}  // namespace

TEST_CASE("fourier circle: periodicity and derivatives") {
  LoopFamily f = unit_circle();
  std::vector<double> u;
  LoopJet a = f(u, 0.0), b = f(u, 1.0);
  REQUIRE(a.x[0] == Approx(b.x[0]).margin(1e-14));
  REQUIRE(a.x[1] == Approx(b.x[1]).margin(1e-14));
  // FD check of dtheta
  double h = 1e-6;
  LoopJet p = f(u, 0.3 + h), q = f(u, 0.3 - h), c = f(u, 0.3);
  for (int i = 0; i < 2; ++i)
    REQUIRE(c.dtheta[i] == Approx((p.x[i] - q.x[i]) / (2 * h)).margin(1e-7));
}

TEST_CASE("reverse is an involution and flips the theta derivative") {
  LoopFamily f = unit_circle();
  LoopFamily rr = loop_reverse(loop_reverse(f));
  std::vector<double> u;
  for (double theta : {0.1, 0.5, 0.9}) {
    LoopJet a = f(u, theta), b = rr(u, theta);
    REQUIRE(a.x[0] == Approx(b.x[0]).margin(1e-14));
    LoopJet r = loop_reverse(f)(u, theta), o = f(u, 1.0 - theta);
    REQUIRE(r.x[0] == Approx(o.x[0]).margin(1e-14));
    REQUIRE(r.dtheta[0] == Approx(-o.dtheta[0]).margin(1e-14));
  }
  LoopFamily c = constant_loop({2.0, 3.0});
  LoopJet rc = loop_reverse(c)(u, 0.4);
  REQUIRE(rc.x[0] == Approx(2.0));
}

TEST_CASE("based plateau family has exact collars") {
  LoopFamily f = based_family(unit_circle(), 1.0 / 8);
  std::vector<double> u;
  for (double theta : {0.0, 0.05, 0.1, 0.95, 1.0}) {
    LoopJet j = f(u, theta);
    REQUIRE(j.x[0] == Approx(1.0).margin(1e-14));
    REQUIRE(j.x[1] == Approx(0.0).margin(1e-14));
    REQUIRE(j.dtheta[0] == Approx(0.0).margin(1e-14));
  }
  REQUIRE(f.based);
}

TEST_CASE("halfspeed concat evaluates the first loop at doubled time") {
  LoopFamily f = based_family(unit_circle(), 1.0 / 8);
  LoopFamily c = loop_concat(f, f, ConcatMode::halfspeed);
  std::vector<double> u;
  LoopJet a = c(u, 0.25), b = f(u, 0.5);
  REQUIRE(a.x[0] == Approx(b.x[0]).margin(1e-14));
  REQUIRE(a.x[1] == Approx(b.x[1]).margin(1e-14));
  REQUIRE(a.dtheta[0] == Approx(2 * b.dtheta[0]).margin(1e-12));
}

TEST_CASE("mismatched basepoints are rejected") {
  LoopFamily f = based_family(unit_circle(), 1.0 / 8);
  LoopFamily g = constant_loop({5.0, 5.0});
  REQUIRE_THROWS(loop_concat(f, g, ConcatMode::halfspeed));
}

TEST_CASE("moore concat adds lengths and splices") {
  LoopFamily f = based_family(unit_circle(), 1.0 / 8);
  MooreLoopSimplex a = moore_from_based(f, 2.0);
  MooreLoopSimplex b = moore_from_based(f, 3.0);
  MooreLoopSimplex c = moore_concat(a, b);
  std::vector<double> t;
  REQUIRE(c.length(t) == Approx(5.0));
  // first part traverses a
  LoopJet j1 = c.eval(t, 1.0), j2 = a.eval(t, 1.0);
  REQUIRE(j1.x[0] == Approx(j2.x[0]).margin(1e-14));
  // past length 2, in b
  LoopJet j3 = c.eval(t, 3.5), j4 = b.eval(t, 1.5);
  REQUIRE(j3.x[0] == Approx(j4.x[0]).margin(1e-14));
}

TEST_CASE("q-reparametrization derivative bookkeeping (FD check)") {
  // one-parameter Moore simplex with t-dependent loop and constant length
  FourierSpec spec;
  spec.m = 1;
  FourierSpec::Coordinate cx, cy;
  cx.harmonics.push_back({1, {1.0, {0.5}}, {0.0, {}}});
  cy.harmonics.push_back({1, {0.0, {}}, {1.0, {0.25}}});
  spec.coords = {cx, cy};
  LoopFamily base = based_family(fourier_family(spec), 1.0 / 8);
  MooreLoopSimplex s = moore_from_based(base, 2.0);
  LoopFamily q = q_reparametrized(s);
  std::vector<double> t{0.4};
  double h = 1e-6;
  for (double theta : {0.3, 0.7}) {
    LoopJet c = q(t, theta);
    std::vector<double> tp{0.4 + h}, tm{0.4 - h};
    LoopJet p = q(tp, theta), m = q(tm, theta);
    for (int i = 0; i < 2; ++i)
      REQUIRE(c.du[0][i] == Approx((p.x[i] - m.x[i]) / (2 * h)).margin(1e-6));
    LoopJet pt = q(t, theta + h), mt = q(t, theta - h);
    for (int i = 0; i < 2; ++i)
      REQUIRE(c.dtheta[i] == Approx((pt.x[i] - mt.x[i]) / (2 * h)).margin(1e-6));
  }
}

TEST_CASE("simplex faces compose to the boundary-of-boundary relation") {
  // geometric identity d_i d_j = d_{j} d_{i-1} style check through point maps
  const int k = 2;
  std::vector<double> t{0.6};
  // faces of faces of a 2-simplex land on the 4 corner points / edges
  for (int j = 0; j <= k; ++j) {
    auto tt = simplex_face(t, j, k);
    REQUIRE(tt.size() == 2);
    REQUIRE(tt[0] <= tt[1] + 1e-15);
  }
  // coface identity delta_i o delta_j = delta_j o delta_{i-1} for j < i,
  // checked from the 0-simplex up
  std::vector<double> pt{};
  for (int i = 0; i <= 2; ++i)
    for (int jj = 0; jj < i; ++jj) {
      auto a = simplex_face(simplex_face(pt, jj, 1), i, 2);
      auto b = simplex_face(simplex_face(pt, i - 1, 1), jj, 2);
      REQUIRE(a.size() == b.size());
      for (std::size_t w = 0; w < a.size(); ++w) REQUIRE(a[w] == Approx(b[w]).margin(1e-15));
    }
}
