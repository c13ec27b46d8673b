#include <catch2/catch_amalgamated.hpp>

#include "holobar/backend.hpp"
#include "holobar/dga.hpp"
#include "holobar/rng.hpp"

using namespace holobar;

static Element random_element(const DgAlgebraSpec& A, Rng& rng, int nterms = 3) {
  Element e;
  for (int t = 0; t < nterms; ++t)
    e.add_term(rng.range(0, A.dim() - 1), rng.small_rat());
  return e;
}

TEST_CASE("ground field validates") {
  REQUIRE(dga_validate(ground_field()).empty());
}

TEST_CASE("triangular algebra with commutator differential validates") {
  DgAlgebraSpec A = triangular_with_commutator_d();
  REQUIRE(dga_validate(A).empty());
}

TEST_CASE("perturbing one structure constant is caught") {
  DgAlgebraSpec A = triangular_with_commutator_d();
  // break associativity/unit by adding junk to a product
  int i = A.space.find("E[1,0;0,0]");
  Element bad = Element::basis(i);
  A.set_mult(i, i, bad);
  auto rep = dga_validate(A);
  REQUIRE(!rep.empty());
  bool assoc_or_leibniz = false;
  for (auto& s : rep)
    if (s.find("assoc") != std::string::npos || s.find("Leibniz") != std::string::npos ||
        s.find("unit") != std::string::npos)
      assoc_or_leibniz = true;
  REQUIRE(assoc_or_leibniz);
}

TEST_CASE("exterior and polynomial models validate") {
  REQUIRE(dga_validate(exterior_algebra({"e1", "e2"}, {1, 1})).empty());
  REQUIRE(dga_validate(poly_line_model(4)).empty());
}

TEST_CASE("End(V) and tensor products validate") {
  GradedFibre V;
  V.dims[0] = 2;
  V.dims[1] = 1;
  DgAlgebraSpec K = end_algebra(V);
  REQUIRE(dga_validate(K).empty());

  DgAlgebraSpec A = exterior_algebra({"e1", "e2"}, {1, 1});
  TensorDga T = tensor_dga(A, K);
  REQUIRE(dga_validate(T.spec).empty());
}

TEST_CASE("element_apply: unit law, d^2, multiplicative augmentation") {
  DgAlgebraSpec A = poly_line_model(5);
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    Element x = random_element(A, rng), y = random_element(A, rng);
    REQUIRE(A.mul(A.unit, x) == x);
    REQUIRE(A.d(A.d(x)).zero());
    REQUIRE(A.augment(A.mul(x, y)) == A.augment(x) * A.augment(y));
  }
}

TEST_CASE("homogeneous decomposition partitions support") {
  DgAlgebraSpec A = poly_line_model(4);
  Rng rng(5);
  Element x = random_element(A, rng, 6);
  auto parts = A.homogeneous_parts(x);
  Element sum;
  for (auto& [d, p] : parts) {
    int dd = 0;
    REQUIRE(A.homogeneous(p, &dd));
    REQUIRE(dd == d);
    sum += p;
  }
  REQUIRE(sum == x);
}
