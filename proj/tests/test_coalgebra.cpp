#include "doctest.h"

#include "conical/coalgebra.hpp"
#include "test_helpers.hpp"

#include <set>

using namespace conical;
using namespace conical::testing;

namespace {

constexpr int kOrder = 8;

// product of open ray factors over the primary generators; normalized and
// germ-valued on the simplicial cones the catalog exercises
ConeFunctional ray_product_functional(int order = kOrder) {
  return ConeFunctional([order](const LatticeCone& lc) {
    Germ acc = Germ::unit(lc.ambient_dim());
    for (const auto& v : primary_generators(lc)) acc = germ_mul(acc, bernoulli_factor(v, order + static_cast<int>(lc.dim())));
    return acc;
  });
}

std::vector<LatticeCone> pointed_catalog() {
  return {
      std_cone(1, {{1}}),
      std_cone(2, {{1, 0}, {0, 1}}),
      std_cone(2, {{1, 0}, {1, 1}}),
      lat_cone(2, {{1, 0}, {0, 1}}, {{1, 1}, {1, -1}}),
      std_cone(3, {{1, 0, 0}, {1, 1, 0}, {1, 1, 1}}),
  };
}

std::string key_of(const LatticeCone& lc) { return canonical_key(lc); }

}  // namespace

TEST_CASE("coproduct structure") {
  SUBCASE("zero cone") {
    TensorSum d = coproduct(LatticeCone::zero(2));
    REQUIRE(d.size() == 1);
    CHECK(d.terms()[0].left.dim() == 0);
    CHECK(d.terms()[0].right.dim() == 0);
  }
  SUBCASE("ray") {
    LatticeCone ray = std_cone(1, {{1}});
    TensorSum d = coproduct(ray);
    REQUIRE(d.size() == 2);
    std::set<std::pair<std::string, std::string>> got;
    for (const auto& t : d.terms()) got.insert({key_of(t.left), key_of(t.right)});
    std::set<std::pair<std::string, std::string>> expect = {
        {key_of(ray), key_of(LatticeCone::zero(1))},
        {key_of(LatticeCone::zero(1)), key_of(ray)},
    };
    CHECK(got == expect);
  }
  SUBCASE("quadrant includes the two transverse middle terms") {
    LatticeCone quadrant = std_cone(2, {{1, 0}, {0, 1}});
    TensorSum d = coproduct(quadrant);
    REQUIRE(d.size() == 4);
    std::set<std::pair<std::string, std::string>> got;
    for (const auto& t : d.terms()) got.insert({key_of(t.left), key_of(t.right)});
    LatticeCone e1 = std_cone(2, {{1, 0}});
    LatticeCone e2 = std_cone(2, {{0, 1}});
    std::set<std::pair<std::string, std::string>> expect = {
        {key_of(quadrant), key_of(LatticeCone::zero(2))},
        {key_of(LatticeCone::zero(2)), key_of(quadrant)},
        {key_of(e2), key_of(e1)},
        {key_of(e1), key_of(e2)},
    };
    CHECK(got == expect);
  }
  SUBCASE("a line has only the zero ⊗ line term") {
    LatticeCone line = std_cone(1, {{1}, {-1}});
    TensorSum d = coproduct(line);
    REQUIRE(d.size() == 1);
    CHECK(d.terms()[0].left.dim() == 0);
    CHECK(key_of(d.terms()[0].right) == key_of(line));
  }
}

TEST_CASE("reduced coproduct") {
  CHECK(reduced_coproduct(std_cone(1, {{1}})).empty());
  CHECK(reduced_coproduct(std_cone(1, {{1}, {-1}})).empty());
  TensorSum d = reduced_coproduct(std_cone(2, {{1, 0}, {0, 1}}));
  CHECK(d.size() == 2);
  for (const auto& t : d.terms()) {
    CHECK(t.left.dim() == 1);
    CHECK(t.right.dim() == 1);
  }
  CHECK_THROWS_AS(reduced_coproduct(LatticeCone::zero(2)), std::invalid_argument);
}

TEST_CASE("coalgebra laws over the catalog") {
  std::vector<LatticeCone> catalog = pointed_catalog();
  catalog.push_back(std_cone(3, {{1, 0, 0}, {0, 1, 0}, {1, 0, 1}, {0, 1, 1}}));  // non-simplicial
  catalog.push_back(std_cone(1, {{1}, {-1}}));                                   // line
  catalog.push_back(std_cone(2, {{1, 0}, {-1, 0}, {0, 1}}));                     // half-plane
  for (const auto& lc : catalog) {
    CAPTURE(canonical_key(lc));
    CHECK(coproduct_coassociative(lc));
    CHECK(coproduct_respects_grading(lc));
    CHECK(counit_left_law(lc));
    if (is_strongly_convex(lc.cone())) {
      CHECK(counit_right_law(lc));
    } else {
      // the zero cone is not a face of a non-pointed cone, so the right-hand
      // counit law cannot pick up the identity term
      CHECK(!counit_right_law(lc));
    }
    CHECK(reduced_coproduct_nilpotent(lc, lc.dim() == 0 ? 1 : lc.dim()));
    if (lc.dim() >= 2 && is_strongly_convex(lc.cone())) CHECK(!reduced_coproduct_nilpotent(lc, lc.dim() - 1));
  }
}

TEST_CASE("convolution laws") {
  ConeFunctional f = ray_product_functional();
  ConeFunctional g = closure_map(f);
  ConeFunctional h = convolution_inverse(f);
  ConeFunctional e = unit_functional();

  for (const auto& lc : pointed_catalog()) {
    CAPTURE(canonical_key(lc));
    int check_order = 4;
    // unit laws
    CHECK(germ_eq(convolve(f, e)(lc), f(lc), check_order));
    CHECK(germ_eq(convolve(e, f)(lc), f(lc), check_order));
    // associativity
    CHECK(germ_eq(convolve(convolve(f, g), h)(lc), convolve(f, convolve(g, h))(lc), check_order));
    // two-sided inverse
    Germ left = convolve(h, f)(lc);
    Germ right = convolve(f, h)(lc);
    if (lc.dim() == 0) {
      CHECK(is_unit_germ(left));
      CHECK(is_unit_germ(right));
    } else {
      CHECK(germ_is_zero(left, check_order));
      CHECK(germ_is_zero(right, check_order));
    }
  }

  SUBCASE("inverse of the unit functional is itself") {
    ConeFunctional ei = convolution_inverse(e);
    CHECK(is_unit_germ(ei(LatticeCone::zero(2))));
    CHECK(ei(std_cone(2, {{1, 0}, {0, 1}})).has_no_terms());
  }
  SUBCASE("degree-one inverse is a sign flip") {
    LatticeCone ray = std_cone(1, {{1}});
    CHECK(germ_eq(h(ray), germ_scale(Rat(-1), f(ray)), 6));
  }
  SUBCASE("non-normalized input is rejected") {
    ConeFunctional bad([](const LatticeCone& lc) { return Germ::zero(lc.ambient_dim()); });
    ConeFunctional bad_inv = convolution_inverse(bad);
    CHECK_THROWS_AS(bad_inv(std_cone(1, {{1}})), std::invalid_argument);
  }
}

TEST_CASE("convolution on a ray matches the two-term coproduct") {
  ConeFunctional f = ray_product_functional();
  ConeFunctional g = closure_map(f);
  LatticeCone ray = std_cone(1, {{1}});
  Germ expected = germ_add(f(ray), g(ray));  // f(ray) g(0) + f(0) g(ray)
  CHECK(germ_eq(convolve(f, g)(ray), expected, 6));
}

TEST_CASE("birkhoff factorization") {
  InnerProduct q;
  auto projector = [q](const Germ& g) { return holomorphic_part(g, q); };
  ConeFunctional f = ray_product_functional();
  BirkhoffFactors factors = birkhoff_factorize(f, projector, q);

  SUBCASE("unit functional factors trivially") {
    BirkhoffFactors trivial = birkhoff_factorize(unit_functional(), projector, q);
    LatticeCone quadrant = std_cone(2, {{1, 0}, {0, 1}});
    CHECK(trivial.f1(quadrant).has_no_terms());
    CHECK(trivial.f2(quadrant).has_no_terms());
    CHECK(is_unit_germ(trivial.f1(LatticeCone::zero(2))));
  }

  SUBCASE("ray factors are the projections, with the printed sign") {
    LatticeCone ray = std_cone(1, {{1}});
    GermSplit split = polar_decompose(f(ray), q);
    CHECK(germ_eq(factors.f1(ray), germ_scale(Rat(-1), Germ::from_series(split.holomorphic)), 6));
    CHECK(germ_eq(factors.f2(ray), split.polar, 6));
    // convolving the first factor back against f leaves the polar part
    CHECK(germ_eq(convolve(factors.f1, f, q)(ray), split.polar, 6));
  }

  SUBCASE("factorization identity and range separation") {
    ConeFunctional reconstructed = convolve(convolution_inverse(factors.f1, q), factors.f2, q);
    for (const auto& lc : pointed_catalog()) {
      CAPTURE(canonical_key(lc));
      CHECK(germ_eq(reconstructed(lc), f(lc), 4));
      if (lc.dim() > 0) {
        GermSplit s1 = polar_decompose(factors.f1(lc), q);
        CHECK(s1.polar.has_no_terms());
        GermSplit s2 = polar_decompose(factors.f2(lc), q);
        CHECK(s2.holomorphic.is_zero());
      }
    }
  }

  SUBCASE("second factor equals f1 * f (uniqueness route)") {
    ConeFunctional via_convolution = convolve(factors.f1, f, q);
    for (const auto& lc : pointed_catalog()) CHECK(germ_eq(factors.f2(lc), via_convolution(lc), 4));
  }
}

TEST_CASE("closure map") {
  ConeFunctional f = ray_product_functional();
  ConeFunctional g = closure_map(f);
  SUBCASE("zero cone unchanged") { CHECK(is_unit_germ(g(LatticeCone::zero(1)))); }
  SUBCASE("line has no proper faces") {
    LatticeCone line = std_cone(1, {{1}, {-1}});
    CHECK(germ_eq(g(line), f(line), 6));
  }
  SUBCASE("closure over the quadrant is the product of closed ray factors") {
    LatticeCone quadrant = std_cone(2, {{1, 0}, {0, 1}});
    Germ closed_e1 = germ_add(bernoulli_factor(rv({1, 0}), kOrder), Germ::unit(2));
    Germ closed_e2 = germ_add(bernoulli_factor(rv({0, 1}), kOrder), Germ::unit(2));
    CHECK(germ_eq(g(quadrant), germ_mul(closed_e1, closed_e2), 6));
  }
}
