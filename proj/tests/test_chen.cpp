#include <catch2/catch_amalgamated.hpp>

#include "holobar/chen.hpp"
#include "holobar/rng.hpp"

using namespace holobar;
using Catch::Approx;

namespace {

LoopFamily unit_circle(int m = 0) {
  FourierSpec spec;
  spec.m = m;
  FourierSpec::Coordinate cx, cy;
  cx.harmonics.push_back({1, {1.0, {}}, {0.0, {}}});
  cy.harmonics.push_back({1, {0.0, {}}, {1.0, {}}});
  spec.coords = {cx, cy};
  return fourier_family(spec);
}

/* circles of radius 1 + u/2 centered at (u/4, 0): a 1-parameter plot */
LoopFamily annulus_family() {
  FourierSpec spec;
  spec.m = 1;
  FourierSpec::Coordinate cx, cy;
  cx.center = {0.0, {0.25}};
  cx.harmonics.push_back({1, {1.0, {0.5}}, {0.0, {}}});
  cy.harmonics.push_back({1, {0.0, {}}, {1.0, {0.5}}});
  spec.coords = {cx, cy};
  return fourier_family(spec);
}

/* the angular form c (x dy - y dx)/(x^2+y^2) on scalar coefficients */
FormsAlgebra angular_context(GradedFibre fib) {
  FormsAlgebra M(2, std::move(fib));
  Poly q;
  Monomial x2 = Monomial::one(2), y2 = Monomial::one(2);
  x2.e[0] = 2;
  y2.e[1] = 2;
  q.add(x2, rat(1));
  q.add(y2, rat(1));
  M.den = q;
  return M;
}

PolyForm angular_block(const FormsAlgebra& M, BlockPos block, rat c) {
  PolyForm w;
  Monomial mx = Monomial::one(2), my = Monomial::one(2);
  mx.e[0] = 1;
  my.e[1] = 1;
  w.add({mx, 2u, block, 1}, c);
  w.add({my, 1u, block, 1}, -c);
  return w;
}

GradedFibre scalar_fibre() {
  GradedFibre f;
  f.dims[0] = 1;
  return f;
}

}  // namespace

TEST_CASE("simplex quadrature integrates ordered volumes") {
  QuadratureSpec q;
  q.nodes = 16;
  for (int k = 1; k <= 4; ++k) {
    double vol = 0.0;
    simplex_quadrature(k, 0.0, 1.0, q,
                       [&](const std::vector<double>&, double w) { vol += w; });
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    REQUIRE(vol == Approx(1.0 / fact).epsilon(1e-12));
  }
}

TEST_CASE("k=1 line integral of the angular form is 2 pi c") {
  FormsAlgebra M = angular_context(scalar_fibre());
  PolyForm w = angular_block(M, {0, 0, 0, 0}, rat(3, 7));
  LoopFamily circle = unit_circle();
  QuadratureSpec q;
  q.nodes = 64;
  std::vector<double> u;
  SuperElem val = iterated_integral_word(M, std::nullopt, {w}, circle, u, {}, q);
  DMat res = HolonomyValue{val, 0, 0, &M.fibre}.component(0);
  REQUIRE(res.at(0, 0) == Approx(2.0 * M_PI * 3.0 / 7.0).margin(1e-10));
}

TEST_CASE("constant loops kill positive form-degree words") {
  FormsAlgebra M = FormsAlgebra::scalar(2);
  PolyForm w = M.mul(M.coordinate(0), M.dx(1));
  LoopFamily c = constant_loop({0.3, 0.4});
  QuadratureSpec q;
  q.nodes = 8;
  std::vector<double> u;
  SuperElem val = iterated_integral_word(M, std::nullopt, {w, w}, c, u, {}, q);
  REQUIRE(val.zero());
}

TEST_CASE("ordered double integral of equal scalar 1-forms is half the square") {
  FormsAlgebra M = angular_context(scalar_fibre());
  PolyForm w = angular_block(M, {0, 0, 0, 0}, rat(1, 2));
  LoopFamily circle = unit_circle();
  QuadratureSpec q;
  q.nodes = 32;
  std::vector<double> u;
  SuperElem one = iterated_integral_word(M, std::nullopt, {w}, circle, u, {}, q);
  SuperElem two = iterated_integral_word(M, std::nullopt, {w, w}, circle, u, {}, q);
  double a = HolonomyValue{one, 0, 0, &M.fibre}.component(0).at(0, 0);
  double b = HolonomyValue{two, 0, 0, &M.fibre}.component(0).at(0, 0);
  REQUIRE(b == Approx(0.5 * a * a).margin(1e-9));
}

TEST_CASE("holonomy of the zero connection is the identity") {
  GradedFibre V;
  V.dims[0] = 2;
  V.dims[1] = 1;
  FormsAlgebra M(2, V);
  SuperConnection sc{&M, PolyForm()};
  LoopFamily f = annulus_family();
  QuadratureSpec q;
  q.nodes = 8;
  q.k_max = 3;
  q.panels = 2;
  std::vector<double> u{0.2};
  std::vector<std::vector<double>> vecs{{1.0}};
  HolonomyValue H = holonomy(M, sc, f, u, vecs, q);
  DMat d0 = H.component(0);
  DMat id = DMat::identity(3);
  REQUIRE(dmat_diff(d0, id) == Approx(0.0).margin(1e-14));
  REQUIRE(H.component(1).max_abs() == Approx(0.0).margin(1e-14));
}

TEST_CASE("abelian nilpotent holonomy matches exp(2 pi A)") {
  GradedFibre V;
  V.dims[0] = 2;
  FormsAlgebra M = angular_context(V);
  // A = c N with N the corner: exp(2 pi A) = I + 2 pi c N
  rat c(2, 5);
  SuperConnection sc{&M, angular_block(M, {0, 0, 0, 1}, c)};
  for (auto& [p, res] : superconnection_flatness(sc)) REQUIRE(res.zero());
  LoopFamily circle = unit_circle();
  QuadratureSpec q;
  q.nodes = 16;
  q.k_max = 4;
  q.panels = 4;
  std::vector<double> u;
  HolonomyValue H = holonomy(M, sc, circle, u, {}, q);
  DMat d0 = H.component(0);
  REQUIRE(d0.at(0, 0) == Approx(1.0).margin(1e-9));
  REQUIRE(d0.at(1, 1) == Approx(1.0).margin(1e-9));
  REQUIRE(d0.at(1, 0) == Approx(0.0).margin(1e-9));
  REQUIRE(d0.at(0, 1) == Approx(2.0 * M_PI * to_double(c)).margin(1e-8));
}

TEST_CASE("ode oracle: identity, abelian closed form, agreement with the series") {
  SECTION("zero connection") {
    GradedFibre V;
    V.dims[0] = 2;
    FormsAlgebra M(2, V);
    DMat y = ode_holonomy_oracle(M, PolyForm(), unit_circle(), {});
    REQUIRE(dmat_diff(y, DMat::identity(2)) == Approx(0.0).margin(1e-12));
  }
  SECTION("abelian scalar: e^{2 pi c}") {
    FormsAlgebra M = angular_context(scalar_fibre());
    PolyForm w = angular_block(M, {0, 0, 0, 0}, rat(1, 3));
    DMat y = ode_holonomy_oracle(M, w, unit_circle(), {});
    REQUIRE(y.at(0, 0) == Approx(std::exp(2.0 * M_PI / 3.0)).epsilon(1e-9));
  }
  SECTION("random polynomial connections: series vs ODE") {
    Rng rng(31);
    GradedFibre V;
    V.dims[0] = 2;
    FormsAlgebra M(2, V);
    LoopFamily circle = unit_circle();
    QuadratureSpec q;
    q.nodes = 12;
    q.k_max = 6;
    q.panels = 16;
    for (int t = 0; t < 6; ++t) {
      PolyForm a;
      for (int term = 0; term < 4; ++term) {
        Monomial m = Monomial::one(2);
        m.e[0] = rng.range(0, 1);
        m.e[1] = rng.range(0, 1);
        a.add({m, 1u << rng.range(0, 1), {0, 0, rng.range(0, 1), rng.range(0, 1)}, 0},
              rng.small_rat(1, 3));
      }
      SuperConnection sc{&M, a};
      HolonomyValue H = holonomy(M, sc, circle, {}, {}, q);
      DMat oracle = ode_holonomy_oracle(M, a, circle, {});
      double diff = dmat_diff(H.component(0), oracle);
      REQUIRE(diff < 1e-7);
      // the certified bound is crude but must dominate the truncation error
      REQUIRE(H.tail_bound < 1e-3);
      REQUIRE(diff < H.tail_bound + 1e-7);
    }
  }
}

TEST_CASE("flatness identity: zero connection exactly, flat 2-block within budget") {
  GradedFibre V;
  V.dims[0] = 3;
  V.dims[1] = 1;
  FormsAlgebra M(2, V);
  QuadratureSpec q;
  q.nodes = 12;
  q.k_max = 5;
  q.panels = 6;
  LoopFamily f = annulus_family();
  std::vector<double> u{0.15};
  std::vector<std::vector<double>> vecs{{1.0}};
  SECTION("alpha = 0") {
    SuperConnection sc{&M, PolyForm()};
    DMat r = flatness_residual(M, sc, f, u, vecs, q, 1e-3);
    REQUIRE(r.max_abs() == Approx(0.0).margin(1e-12));
  }
  SECTION("nilpotent 2-block with a 2-form component") {
    // alpha = dF ox S + eta ox T, S strictly triangular on V_0 with S^2 != 0,
    // T : V_1 -> V_0; flat on R^2 since 3-forms vanish
    PolyForm F;
    {
      Monomial m = Monomial::one(2);
      m.e[0] = 2;
      m.e[1] = 1;
      F.add({m, 0, {0, 0, 0, 0}, 0}, rat(1));
      Monomial m2 = Monomial::one(2);
      m2.e[0] = 1;
      F.add({m2, 0, {0, 0, 0, 0}, 0}, rat(1, 2));
    }
    FormsAlgebra S0 = FormsAlgebra::scalar(2);
    PolyForm dF = S0.d(F);
    PolyForm alpha;
    for (auto& [k, c] : dF.terms) {
      alpha.add({k.mono, k.dxmask, {0, 0, 1, 0}, 0}, c);       // S: e0 -> e1
      alpha.add({k.mono, k.dxmask, {0, 0, 2, 1}, 0}, c * 2);   // S: e1 -> e2
    }
    {
      // eta = (1 + x) dx ^ dy ox T with T : V^1 -> V^0
      Monomial one = Monomial::one(2), mx = Monomial::one(2);
      mx.e[0] = 1;
      alpha.add({one, 3u, {0, 1, 0, 0}, 0}, rat(1));
      alpha.add({mx, 3u, {0, 1, 0, 0}, 0}, rat(1));
    }
    SuperConnection sc{&M, alpha};
    REQUIRE(sc.check_total_degree());
    for (auto& [p, res] : superconnection_flatness(sc)) REQUIRE(res.zero());
    DMat r1 = flatness_residual(M, sc, f, u, vecs, q, 1e-2);
    DMat r2 = flatness_residual(M, sc, f, u, vecs, q, 1e-3);
    REQUIRE(r2.max_abs() < 1e-5);
    // h^2 convergence: two decades of h gives ~1e2 resolution per decade
    if (r2.max_abs() > 1e-11) {
      double slope = std::log10(r1.max_abs() / r2.max_abs());
      REQUIRE(slope > 1.6);
      REQUIRE(slope < 2.4);
    }
  }
}

TEST_CASE("factorization and reversal identities") {
  QuadratureSpec q;
  q.nodes = 12;
  q.k_max = 6;
  q.panels = 32;
  SECTION("constant loops: both sides identity") {
    GradedFibre V;
    V.dims[0] = 2;
    FormsAlgebra M(2, V);
    PolyForm a;
    a.add({Monomial::one(2), 1u, {0, 0, 0, 1}, 0}, rat(1));
    SuperConnection sc{&M, a};
    LoopFamily c = constant_loop({0.5, -0.25});
    IdentityReport rep = holonomy_identity_checks(M, sc, c, c, {}, {}, q);
    REQUIRE(rep.factorization == Approx(0.0).margin(1e-13));
    REQUIRE(rep.reversal == Approx(0.0).margin(1e-13));
  }
  SECTION("abelian: line-integral additivity") {
    GradedFibre V;
    V.dims[0] = 2;
    FormsAlgebra M(2, V);
    PolyForm a;
    // closed polynomial form times a single nilpotent direction
    Monomial mx = Monomial::one(2);
    mx.e[0] = 1;
    a.add({mx, 2u, {0, 0, 0, 1}, 0}, rat(1));  // x dy
    a.add({Monomial::one(2), 1u, {0, 0, 0, 1}, 0}, rat(1));
    // not closed (d(x dy) != 0) is fine for the identity checks
    SuperConnection sc{&M, a};
    LoopFamily f = based_family(unit_circle(), 1.0 / 8);
    IdentityReport rep = holonomy_identity_checks(M, sc, f, f, {}, {}, q);
    REQUIRE(rep.factorization < 1e-6);
    REQUIRE(rep.reversal < 1e-6);
  }
  SECTION("nilpotent nonabelian") {
    GradedFibre V;
    V.dims[0] = 3;
    FormsAlgebra M(2, V);
    PolyForm a;
    Monomial mx = Monomial::one(2), my = Monomial::one(2);
    mx.e[0] = 1;
    my.e[1] = 1;
    a.add({mx, 2u, {0, 0, 1, 0}, 0}, rat(1));
    a.add({my, 1u, {0, 0, 2, 1}, 0}, rat(1, 2));
    a.add({Monomial::one(2), 1u, {0, 0, 1, 0}, 0}, rat(1, 3));
    SuperConnection sc{&M, a};
    LoopFamily f = based_family(unit_circle(), 1.0 / 8);
    LoopFamily g = based_family(loop_reverse(unit_circle()), 1.0 / 8);
    IdentityReport rep = holonomy_identity_checks(M, sc, f, g, {}, {}, q);
    REQUIRE(rep.factorization < 1e-6);
    REQUIRE(rep.reversal < 1e-6);
  }
}

TEST_CASE("sigma is a morphism of dg algebras at desk scale") {
  FormsAlgebra M = FormsAlgebra::scalar(2);
  FormsAlgebra* Mp = &M;
  Rng rng(45);
  QuadratureSpec q;
  q.nodes = 24;
  LoopFamily f = annulus_family();
  std::vector<double> u{0.3};
  std::vector<std::vector<double>> vecs{{1.0}};
  SuperContext ctx(M.fibre, 0, {});
  auto rand_word = [&](int k) {
    BarChain<FormsAlgebra> x;
    x.tag = BarModule::regular;
    std::vector<PolyForm> ls;
    for (int i = 0; i < k; ++i) {
      PolyForm w;
      Monomial m = Monomial::one(2);
      m.e[0] = rng.range(0, 1);
      m.e[1] = rng.range(0, 1);
      std::uint32_t mask = rng.range(1, 2);  // dx or dy
      w.add({m, mask, {0, 0, 0, 0}, 0}, rng.small_rat(2, 1));
      if (rng.range(0, 1)) {
        Monomial m2 = Monomial::one(2);
        m2.e[rng.range(0, 1)] = 1;
        w.add({m2, 3u, {0, 0, 0, 0}, 0}, rng.small_rat(1, 1));  // 2-form part
      }
      ls.push_back(w);
    }
    x.add_word(Mp->unit(), ls, *Mp);
    return x;
  };
  for (int t = 0; t < 4; ++t) {
    auto x = rand_word(rng.range(1, 2));
    auto y = rand_word(rng.range(1, 2));
    auto xy = shuffle_product(x, y, M);
    SuperElem lhs = sigma_eval(M, xy, false, f, u, vecs, q);
    SuperElem a = sigma_eval(M, x, false, f, u, vecs, q);
    SuperElem b = sigma_eval(M, y, false, f, u, vecs, q);
    SuperElem rhs = super_mul(ctx, a, b);
    rhs *= -1.0;
    lhs += rhs;
    double scale = std::max(1.0, std::max(a.max_abs(), b.max_abs()));
    REQUIRE(lhs.max_abs() / scale < 1e-6);
  }
}

TEST_CASE("hol_underline specializations") {
  QuadratureSpec q;
  q.nodes = 10;
  q.k_max = 4;
  q.panels = 4;
  SECTION("r = 0 reduces to the holonomy") {
    GradedFibre V;
    V.dims[0] = 2;
    FormsAlgebra M(2, V);
    PolyForm a;
    Monomial mx = Monomial::one(2);
    mx.e[0] = 1;
    a.add({mx, 2u, {0, 0, 0, 1}, 0}, rat(1));
    HolUnderlineData D;
    D.W = &M;
    D.gamma_alpha = a;
    LoopFamily f = based_family(unit_circle(), 1.0 / 8);
    SuperElem full = hol_underline_full(D, f, {}, {}, q);
    SuperConnection sc{&M, a};
    HolonomyValue H = holonomy(M, sc, f, {}, {}, q);
    SuperElem diff = full;
    SuperElem neg = H.full;
    neg *= -1.0;
    diff += neg;
    REQUIRE(diff.max_abs() < 1e-12);
  }
  SECTION("r = 1, 0-form morphism: strict fibre integration kills it") {
    /* the basepoint value of a 0-form morphism lives in the arity-0 slot of
     * the functor components, never inside the loop-space transport */
    GradedFibre W;
    W.dims[0] = 2;
    FormsAlgebra M(2, W);
    PolyForm beta;
    beta.add({Monomial::one(2), 0, {0, 0, 1, 0}, 0}, rat(3));
    HolUnderlineData D;
    D.W = &M;
    D.betas = {beta};
    D.beta_degree = {0};
    LoopFamily c = constant_loop({0.7, 0.1});
    SuperElem full = hol_underline_full(D, c, {}, {}, q);
    REQUIRE(full.zero(1e-14));
  }
  SECTION("r = 1, 1-form morphism over zero connections is its line integral") {
    GradedFibre W;
    W.dims[0] = 2;
    FormsAlgebra M(2, W);
    PolyForm beta;
    Monomial mx = Monomial::one(2);
    mx.e[0] = 1;
    beta.add({mx, 2u, {0, 0, 1, 0}, 0}, rat(1));  // x dy ox (V0 -> V1)
    HolUnderlineData D;
    D.W = &M;
    D.betas = {beta};
    D.beta_degree = {1};
    LoopFamily f = based_family([]{
      FourierSpec spec;
      FourierSpec::Coordinate cx, cy;
      cx.harmonics.push_back({1, {1.0, {}}, {0.0, {}}});
      cy.harmonics.push_back({1, {0.0, {}}, {1.0, {}}});
      spec.coords = {cx, cy};
      return fourier_family(spec);
    }(), 1.0 / 8);
    SuperElem full = hol_underline_full(D, f, {}, {}, q);
    double got = 0.0;
    for (auto& [k, m] : full.terms)
      if (k.hi == 1 && k.lo == 0) got += m.at(1, 0);
    // circ x dy over the unit circle = pi
    REQUIRE(got == Approx(M_PI).margin(1e-8));
  }
}
