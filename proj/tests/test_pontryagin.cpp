#include <catch2/catch_amalgamated.hpp>

#include "holobar/pontryagin.hpp"

using namespace holobar;
using Catch::Approx;

namespace {

/* based loops in R^2 around (1,0)-centered circles, with t-dependent radius */
MooreLoopSimplex simple_simplex(int k, double amp = 0.4, double length = 1.0) {
  FourierSpec spec;
  spec.m = k;
  FourierSpec::Coordinate cx, cy;
  FourierSpec::Coef cosc{1.0, std::vector<double>(k, amp)};
  FourierSpec::Coef sinc{1.0, std::vector<double>(k, -amp / 2)};
  cx.harmonics.push_back({1, cosc, {0.0, {}}});
  cy.harmonics.push_back({1, {0.0, {}}, sinc});
  spec.coords = {cx, cy};
  LoopFamily base = based_family(fourier_family(spec), 1.0 / 8);
  return moore_from_based(base, length);
}

MooreLoopSimplex point_loop() {
  LoopFamily c = constant_loop({1.0, 0.0});
  return moore_from_based(c, 0.25);
}

double sample_diff(const MooreLoopSimplex& a, const MooreLoopSimplex& b,
                   std::span<const double> t, double sv) {
  LoopJet ja = a.eval(t, sv), jb = b.eval(t, sv);
  double m = 0;
  for (int c = 0; c < a.n; ++c) m = std::max(m, std::abs(ja.x[c] - jb.x[c]));
  return m;
}

/* flat connection with a nonzero 0-form part: V = R^2[0] (+) R^2[1],
 * partial = identity corner, alpha_1 = dF ox (N (+) N) with [S, partial]=0 */
struct FlatScenario {
  GradedFibre V;
  FormsAlgebra M;
  SuperConnection sc;
  FlatScenario() : V(make()), M(2, V) {
    PolyForm alpha;
    // partial: E[(1,i),(0,i)] for i = 0,1
    alpha.add({Monomial::one(2), 0, {1, 0, 0, 0}, 0}, rat(1));
    alpha.add({Monomial::one(2), 0, {1, 0, 1, 1}, 0}, rat(1));
    // dF ox S, F = x^2 y + x/2, S = corner N on both degree blocks
    FormsAlgebra S0 = FormsAlgebra::scalar(2);
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
    PolyForm dF = S0.d(F);
    for (auto& [k, c] : dF.terms) {
      alpha.add({k.mono, k.dxmask, {0, 0, 0, 1}, 0}, c);
      alpha.add({k.mono, k.dxmask, {1, 1, 0, 1}, 0}, c);
    }
    sc.ctx = &M;
    sc.alpha = alpha;
  }
  static GradedFibre make() {
    GradedFibre V;
    V.dims[0] = 2;
    V.dims[1] = 2;
    return V;
  }
  DMat partial_matrix() const {
    DMat d(4, 4);
    d.at(M.fibre.offset(1) + 0, M.fibre.offset(0) + 0) = 1;
    d.at(M.fibre.offset(1) + 1, M.fibre.offset(0) + 1) = 1;
    return d;
  }
};

}  // namespace

TEST_CASE("EZ on 0-simplices is a single unsigned product") {
  MooreLoopSimplex p = point_loop();
  MooreLoopSimplex mu = simple_simplex(0);
  auto terms = ez_map(p, mu);
  REQUIRE(terms.size() == 1);
  REQUIRE(terms[0].sign == 1);
}

TEST_CASE("EZ on 1x1 simplices gives two terms with opposite parity") {
  MooreLoopSimplex mu = simple_simplex(1);
  MooreLoopSimplex nu = simple_simplex(1, 0.2);
  auto terms = ez_map(mu, nu);
  REQUIRE(terms.size() == 2);
  REQUIRE(terms[0].sign * terms[1].sign == -1);
}

TEST_CASE("EZ boundary compatibility on 1x1 data") {
  // d EZ(mu ox nu) = EZ(d mu ox nu) + (-1)^{1} EZ(mu ox d nu), compared as
  // evaluated pairs on sample points
  MooreLoopSimplex mu = simple_simplex(1, 0.3);
  MooreLoopSimplex nu = simple_simplex(1, 0.15);

  struct PairTerm {
    double coeff;
    MooreLoopSimplex a, b;
  };
  std::vector<PairTerm> lhs, rhs;
  for (EzTerm& t : ez_map(mu, nu)) {
    // boundary of the 2-simplex product term: faces applied to both factors
    for (int j = 0; j <= 2; ++j) {
      double sgn = (j % 2 == 0) ? 1.0 : -1.0;
      lhs.push_back({static_cast<double>(t.sign) * sgn, moore_face(t.a, j),
                     moore_face(t.b, j)});
    }
  }
  for (int j = 0; j <= 1; ++j) {
    double sgn = (j % 2 == 0) ? 1.0 : -1.0;
    for (EzTerm& t : ez_map(moore_face(mu, j), nu))
      rhs.push_back({sgn * t.sign, t.a, t.b});
    for (EzTerm& t : ez_map(mu, moore_face(nu, j)))
      rhs.push_back({-sgn * t.sign, t.a, t.b});
  }
  // compare sum of evaluations of a smooth functional over sample points
  auto functional = [](const std::vector<PairTerm>& terms) {
    double acc = 0;
    std::vector<double> samples{0.23, 0.71};
    for (auto& t : terms)
      for (double ts : samples) {
        std::vector<double> tv{ts};
        LoopJet a = t.a.eval(tv, 0.4), b = t.b.eval(tv, 0.6);
        acc += t.coeff * (a.x[0] * 2.0 + a.x[1] * a.x[1] + 0.7 * b.x[0] * a.x[0] +
                          b.x[1] * 3.0);
      }
    return acc;
  };
  REQUIRE(functional(lhs) == Approx(functional(rhs)).margin(1e-10));
}

TEST_CASE("pontryagin product: unit, degrees, associative lengths") {
  MooreLoopSimplex p = point_loop();
  MooreLoopSimplex mu = simple_simplex(1);
  SingularChain unit = SingularChain::of(p);
  SingularChain x = SingularChain::of(mu);
  SingularChain prod = pontryagin_product(unit, x);
  REQUIRE(prod.terms.size() == 1);
  REQUIRE(prod.terms[0].s.k == 1);
  std::vector<double> t{0.5};
  // unit * mu traverses the point then mu, total length adds
  REQUIRE(prod.terms[0].s.length(t) == Approx(0.25 + 1.0));
  // evaluation past the point-loop part matches mu shifted
  LoopJet a = prod.terms[0].s.eval(t, 0.25 + 0.3), b = mu.eval(t, 0.3);
  REQUIRE(a.x[0] == Approx(b.x[0]).margin(1e-12));
  // degree additivity through EZ output dimensions
  SingularChain two = pontryagin_product(x, x);
  for (auto& term : two.terms) REQUIRE(term.s.k == 2);
}

TEST_CASE("hol_hat: unitality needs the calibrated sign") {
  FlatScenario F;
  for (auto& [p, r] : superconnection_flatness(F.sc)) REQUIRE(r.zero());
  QuadratureSpec q;
  q.nodes = 10;
  q.k_max = 5;
  q.panels = 8;
  MooreLoopSimplex pt = point_loop();
  DMat cal = hol_hat_simplex(F.M, F.sc, pt, q, HolHatSign::calibrated);
  DMat pri = hol_hat_simplex(F.M, F.sc, pt, q, HolHatSign::as_printed);
  /* constant loops transport trivially (the 0-form component of alpha only
   * ever enters through commutators), so the point loop must go to the
   * identity; the printed sign sends it to -id instead */
  DMat expect = DMat::identity(4);
  REQUIRE(dmat_diff(cal, expect) < 1e-10);
  DMat neg = expect;
  neg *= -1.0;
  REQUIRE(dmat_diff(pri, neg) < 1e-10);
}

TEST_CASE("hol_hat multiplicativity on 1-simplices") {
  FlatScenario F;
  QuadratureSpec q;
  q.nodes = 10;
  q.k_max = 6;
  q.panels = 12;
  SingularChain mu = SingularChain::of(simple_simplex(1, 0.3));
  SingularChain nu = SingularChain::of(simple_simplex(1, 0.18, 1.5));
  DMat lhs = hol_hat(F.M, F.sc, pontryagin_product(mu, nu), q);
  DMat a = hol_hat(F.M, F.sc, mu, q);
  DMat b = hol_hat(F.M, F.sc, nu, q);
  DMat rhs = dmat_mul(a, b);
  REQUIRE(dmat_diff(lhs, rhs) < 1e-4);
}

TEST_CASE("hol_hat differential compatibility (Stokes)") {
  FlatScenario F;
  QuadratureSpec q;
  q.nodes = 10;
  q.k_max = 6;
  q.panels = 12;
  SingularChain mu = SingularChain::of(simple_simplex(1, 0.3));
  DMat lhs = hol_hat(F.M, F.sc, chain_boundary(mu), q);
  DMat h = hol_hat(F.M, F.sc, mu, q);
  DMat par = F.partial_matrix();
  /* [partial, hol_hat(mu)] with hol_hat(mu) of degree -1 */
  DMat rhs = dmat_mul(par, h);
  DMat hp = dmat_mul(h, par);
  for (std::size_t i = 0; i < rhs.a.size(); ++i) rhs.a[i] += hp.a[i];
  double direct = dmat_diff(lhs, rhs);
  DMat rhs2 = dmat_mul(par, h);
  for (std::size_t i = 0; i < rhs2.a.size(); ++i) rhs2.a[i] -= hp.a[i];
  double flipped = dmat_diff(lhs, rhs2);
  INFO("commutator " << flipped << " anticommutator " << direct);
  REQUIRE(std::min(direct, flipped) < 1e-4);
  /* record which convention holds: the graded commutator with |hol(mu)| = -1
   * is par.h + h.par */
  REQUIRE(direct < 1e-4);
}

TEST_CASE("I pairing: arity, sign at a 0-simplex, naturality") {
  FlatScenario F;
  QuadratureSpec q;
  q.nodes = 10;
  q.k_max = 4;
  q.panels = 6;
  LoopSpaceForm alpha;
  alpha.degree = 0;
  const FormsAlgebra* M = &F.M;
  SuperConnection sc = F.sc;
  alpha.integrate = [M, sc, q](const MooreLoopSimplex& nu) {
    /* alpha = degree-0 component of hol_* along nu's loops */
    LoopFamily plot = q_reparametrized(nu);
    std::vector<double> t(nu.k, 0.3);
    return holonomy(*M, sc, plot, t, {}, q).component(0);
  };
  SingularChain pt = SingularChain::of(point_loop());
  SingularChain mu1 = SingularChain::of(simple_simplex(1));
  SECTION("k=2 input vanishes") {
    DMat v = chain_pairing_I(alpha, {&pt, &mu1}, 4, 4);
    REQUIRE(v.max_abs() == 0.0);
  }
  SECTION("|alpha|=0 on a 0-simplex carries the sign (-1)^1") {
    DMat v = chain_pairing_I(alpha, {&pt}, 4, 4);
    DMat direct = alpha.integrate(pt.terms[0].s);
    direct *= -1.0;
    REQUIRE(dmat_diff(v, direct) == Approx(0.0).margin(1e-14));
  }
  SECTION("mismatched simplex dimension pairs to zero") {
    DMat v = chain_pairing_I(alpha, {&mu1}, 4, 4);
    REQUIRE(v.max_abs() == 0.0);
  }
}

TEST_CASE("fht phi: point branch, Stokes pairing, m=2 vanishing by arity") {
  FormsAlgebra M(2, []{ GradedFibre V; V.dims[0] = 2; return V; }());
  QuadratureSpec q;
  q.nodes = 12;
  q.k_max = 4;
  q.panels = 6;
  SECTION("m = 0 branch evaluates at the basepoint") {
    PolyForm beta;
    Monomial m = Monomial::one(2);
    m.e[0] = 1;
    beta.add({m, 0, {0, 0, 0, 1}, 0}, rat(2));
    FhtValue v = fht_phi(M, beta, {1.0, 0.0}, q);
    REQUIRE(v.at_point.at(0, 1) == Approx(2.0));
  }
  SECTION("exact beta pairs by Stokes: boundary terms of the theta-average") {
    /* beta = dg: the sigma component on a 1-simplex plot is F(t) dt with
     * F = d/dt G, G(t) the theta-average of g along the loop at t; the
     * pairing is then -(G(1) - G(0)) under the I sign at k = 1 */
    FormsAlgebra S0 = FormsAlgebra::scalar(2);
    PolyForm g;
    Monomial m = Monomial::one(2);
    m.e[0] = 1;
    m.e[1] = 1;
    g.add({m, 0, {0, 0, 0, 0}, 0}, rat(1));
    PolyForm dg = S0.d(g);
    PolyForm beta;
    for (auto& [k, c] : dg.terms) beta.add({k.mono, k.dxmask, {0, 0, 0, 0}, 0}, c);
    beta.add({dg.terms.begin()->first.mono, dg.terms.begin()->first.dxmask, {0, 0, 1, 1}, 0},
             dg.terms.begin()->second);
    FhtValue v = fht_phi(M, beta, {1.0, 0.0}, q);
    MooreLoopSimplex mu = simple_simplex(1, 0.3);
    DMat got = v.arity1(SingularChain::of(mu));
    LoopFamily plot = q_reparametrized(mu);
    auto G = [&](double t) {
      int N = 512;
      double acc = 0;
      for (int b = 0; b < N; ++b) {
        std::vector<double> tv{t};
        LoopJet jet = plot.eval(tv, (b + 0.5) / N);
        acc += jet.x[0] * jet.x[1] / N;  // g = x y
      }
      return acc;
    };
    double expect = -(G(1.0) - G(0.0)) * i_pairing_sign(1) * -1.0;
    // i_pairing_sign(1) = -1, so the pairing is -(G(1)-G(0))
    REQUIRE(got.at(0, 0) == Approx(-(G(1.0) - G(0.0))).margin(1e-6));
    (void)expect;
  }
}
