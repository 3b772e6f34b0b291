#include "doctest.h"

#include "conical/catalog.hpp"
#include "conical/euler_maclaurin.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace conical;
using namespace conical::testing;

namespace {

Mono mono(std::vector<int> e) { return e; }

Germ closed_ray_factor(const RatVec& v, int order) {
  return germ_add(bernoulli_factor(v, order), Germ::unit(v.size()));
}

}  // namespace

TEST_CASE("open exponential sum") {
  SUBCASE("ray expansion") {
    Germ g = exp_sum_open(std_cone(1, {{1}}), 4);
    GermSplit split = polar_decompose(g);
    CHECK(split.polar.terms.size() == 1);
    CHECK(split.holomorphic.coefficient(mono({0})) == make_rat(-1, 2));
    CHECK(split.holomorphic.coefficient(mono({1})) == make_rat(-1, 12));
    CHECK(split.holomorphic.coefficient(mono({3})) == make_rat(1, 720));
  }
  SUBCASE("zero cone counts its single lattice point") {
    CHECK(is_unit_germ(exp_sum_open(LatticeCone::zero(2), 4)));
  }
  SUBCASE("full line vanishes") {
    CHECK(germ_is_zero(exp_sum_open(std_cone(1, {{1}, {-1}}), 6), 6));
  }
  SUBCASE("non-smooth cone via its smooth subdivision") {
    // interior points of <e1, e1+2e2> against a hand-built equivalent form:
    // the two smooth pieces overlap along e1+e2, counted once
    LatticeCone lc = std_cone(2, {{1, 0}, {1, 2}});
    Germ direct = exp_sum_open(lc, 6);
    Germ p1 = germ_mul(bernoulli_factor(rv({1, 0}), 10), bernoulli_factor(rv({1, 1}), 10));
    Germ p2 = germ_mul(bernoulli_factor(rv({1, 1}), 10), bernoulli_factor(rv({1, 2}), 10));
    Germ shared_ray = bernoulli_factor(rv({1, 1}), 10);
    CHECK(germ_eq(direct, germ_add(germ_add(p1, p2), shared_ray), 6));
  }
}

TEST_CASE("closed exponential sum") {
  SUBCASE("ray equals 1/(1-e^x)") {
    Germ g = exp_sum_closed(std_cone(1, {{1}}), 6);
    CHECK(germ_eq(g, closed_ray_factor(rv({1}), 10), 6));
  }
  SUBCASE("quadrant equals the product of closed ray factors") {
    Germ g = exp_sum_closed(std_cone(2, {{1, 0}, {0, 1}}), 6);
    Germ expected = germ_mul(closed_ray_factor(rv({1, 0}), 10), closed_ray_factor(rv({0, 1}), 10));
    CHECK(germ_eq(g, expected, 6));
  }
  SUBCASE("line vanishes") {
    CHECK(germ_is_zero(exp_sum_closed(std_cone(1, {{1}, {-1}}), 6), 6));
  }
}

TEST_CASE("exponential integral") {
  SUBCASE("ray") {
    Germ g = exp_integral(std_cone(1, {{1}}));
    REQUIRE(g.terms.size() == 1);
    CHECK(g.terms[0].num.coefficient(mono({0})) == -1);
    CHECK(denominator_degree(g.terms[0].den) == 1);
  }
  SUBCASE("non-unimodular simplicial cone keeps its index") {
    // (+1) * 2 / (x1 (x1+2x2))
    Germ g = exp_integral(std_cone(2, {{1, 0}, {1, 2}}));
    REQUIRE(g.terms.size() == 1);
    CHECK(g.terms[0].num.coefficient(mono({0, 0})) == 2);
    CHECK(denominator_degree(g.terms[0].den) == 2);
  }
  SUBCASE("triangulation independence on the square cone") {
    LatticeCone lc = std_cone(3, {{1, 0, 0}, {0, 1, 0}, {1, 0, 1}, {0, 1, 1}});
    Germ direct = exp_integral(lc);
    std::vector<RatVec> other_order = {rv({0, 1, 0}), rv({1, 0, 0}), rv({1, 0, 1}), rv({0, 1, 1})};
    Subdivision other = triangulate_with_order(lc, other_order);
    REQUIRE(validate_subdivision(other).valid);
    REQUIRE(canonical_key(other.pieces[0]) != canonical_key(triangulate(lc).pieces[0]));
    Germ via_other = Germ::zero(3);
    for (const auto& p : other.pieces) via_other = germ_add(via_other, exp_integral(p));
    CHECK(germ_eq(direct, via_other, 6));
  }
  SUBCASE("integral of non-pointed cones cancels to zero") {
    CHECK(germ_is_zero(exp_integral(std_cone(1, {{1}, {-1}})), 6));
    CHECK(germ_is_zero(exp_integral(std_cone(2, {{1, 0}, {-1, 0}, {0, 1}, {0, -1}})), 6));
  }
}

TEST_CASE("interpolator of the ray carries the classical weights") {
  Germ mu = interpolator(std_cone(1, {{1}}), SumVariant::closed, 6);
  REQUIRE(mu.terms.size() == 1);
  const TruncatedSeries& s = mu.terms[0].num;
  CHECK(s.coefficient(mono({0})) == make_rat(1, 2));
  CHECK(s.coefficient(mono({1})) == make_rat(-1, 12));
  CHECK(s.coefficient(mono({2})) == 0);
  CHECK(s.coefficient(mono({3})) == make_rat(1, 720));
  CHECK(s.coefficient(mono({4})) == 0);
  CHECK(s.coefficient(mono({5})) == make_rat(-1, 30240));

  // against the independent Bernoulli-recurrence oracle: pi_+ of -T(-x)/x
  // ... 1/(1-e^x) = -1/x * T(x) with T = sum B_n x^n / n!; drop the pole
  auto b = bernoulli_numbers(7);
  Rat factorial = 1;
  for (int n = 1; n <= 6; ++n) {
    factorial *= n;
    CHECK(s.coefficient(mono({n - 1})) == -b[static_cast<size_t>(n)] / factorial);
  }

  CHECK(is_unit_germ(interpolator(LatticeCone::zero(1), SumVariant::closed, 6)));
  CHECK(interpolator(std_cone(1, {{1}, {-1}}), SumVariant::closed, 6).has_no_terms());
}

TEST_CASE("euler-maclaurin verification on the ray") {
  EmReport r = verify_euler_maclaurin(std_cone(1, {{1}}), 6);
  CHECK(r.all_pass());
  CHECK(!r.order_insufficient);
  REQUIRE(r.verdicts.size() == 10);
}

TEST_CASE("euler-maclaurin verification on the smallest non-smooth cone") {
  EmReport r = verify_euler_maclaurin(std_cone(2, {{1, 0}, {1, 2}}), 6);
  for (const auto& v : r.verdicts) {
    CAPTURE(v.name);
    CAPTURE(v.detail);
    CHECK(v.pass);
  }
}

TEST_CASE("euler-maclaurin verification under a non-identity inner product") {
  InnerProduct q(rm({{2, 1}, {1, 2}}));
  EmReport r = verify_euler_maclaurin(std_cone(2, {{1, 0}, {1, 1}}), 4, q);
  for (const auto& v : r.verdicts) {
    CAPTURE(v.name);
    CAPTURE(v.detail);
    CHECK(v.pass);
  }
}

TEST_CASE("euler-maclaurin identities degenerate to zero on a line") {
  EmReport r = verify_euler_maclaurin(std_cone(1, {{1}, {-1}}), 4);
  CHECK(!r.strongly_convex);
  CHECK(germ_is_zero(r.s_closed, 4));
  CHECK(germ_is_zero(r.integral, 4));
  CHECK(r.all_pass());  // both sides vanish
}

TEST_CASE("subdivision identities for the quadrant split") {
  LatticeCone quadrant = std_cone(2, {{1, 0}, {0, 1}});
  Subdivision s{quadrant,
                {LatticeCone(cone(2, {{1, 0}, {1, 1}}), quadrant.lattice_basis()),
                 LatticeCone(cone(2, {{1, 1}, {0, 1}}), quadrant.lattice_basis())}};
  SubdivisionIdentityReport r = verify_subdivision_identities(s, 6);
  for (const auto& v : r.verdicts) {
    CAPTURE(v.name);
    CAPTURE(v.detail);
    CHECK(v.pass);
  }
}

TEST_CASE("subdivision identities for the trivial subdivision are tautologies") {
  SubdivisionIdentityReport r = verify_subdivision_identities(trivial_subdivision(std_cone(2, {{1, 0}, {0, 1}})), 4);
  CHECK(r.all_pass());
}

TEST_CASE("partial fraction identity for the integral under the quadrant split") {
  // 1/(x1 x2) = 1/(x1(x1+x2)) + 1/((x1+x2)x2)
  LatticeCone quadrant = std_cone(2, {{1, 0}, {0, 1}});
  Germ lhs = exp_integral(quadrant);
  Germ rhs = germ_add(exp_integral(std_cone(2, {{1, 0}, {1, 1}})), exp_integral(std_cone(2, {{1, 1}, {0, 1}})));
  CHECK(germ_eq(lhs, rhs, 6));
}

TEST_CASE("numeric crosscheck") {
  SUBCASE("ray against the geometric series") {
    double err = numeric_crosscheck(std_cone(1, {{1}}), {-1.0}, 40);
    CHECK(err < 1e-12);
  }
  SUBCASE("non-smooth cone against the double sum") {
    double err = numeric_crosscheck(std_cone(2, {{1, 0}, {1, 2}}), {-1.0, -1.0}, 30);
    CHECK(err < 1e-9);
  }
  SUBCASE("zero cone is exact") {
    double err = numeric_crosscheck(LatticeCone::zero(1), {-1.0}, 10);
    CHECK(err == 0.0);
  }
  SUBCASE("invalid sample point rejected") {
    CHECK_THROWS_AS(numeric_crosscheck(std_cone(1, {{1}}), {1.0}, 10), std::invalid_argument);
    CHECK_THROWS_AS(numeric_crosscheck(std_cone(1, {{1}, {-1}}), {-1.0}, 10), std::invalid_argument);
  }
}

TEST_CASE("subdivision independence of the sums on the square cone") {
  LatticeCone lc = std_cone(3, {{1, 0, 0}, {0, 1, 0}, {1, 0, 1}, {0, 1, 1}});
  // cut along the other diagonal of the square
  std::vector<RatVec> other_order = {rv({0, 1, 0}), rv({1, 0, 0}), rv({1, 0, 1}), rv({0, 1, 1})};
  Subdivision a = triangulate(lc);
  Subdivision b = triangulate_with_order(lc, other_order);
  REQUIRE(validate_subdivision(a).valid);
  REQUIRE(validate_subdivision(b).valid);
  REQUIRE(canonical_key(a.pieces[0]) != canonical_key(b.pieces[0]));

  // open sums over the open faces of either triangulation agree
  int work = 10;
  for (auto* s : {&a, &b}) {
    Germ total = Germ::zero(3);
    for (const auto& f : open_faces(*s)) total = germ_add(total, exp_sum_open(face_as_lattice_cone(f), work));
    CHECK(germ_eq(total, exp_sum_open(lc, work), 6));
  }
}

TEST_CASE("negative truncation orders are rejected") {
  CHECK_THROWS_AS(exp_sum_open(std_cone(1, {{1}}), -1), std::invalid_argument);
  CHECK_THROWS_AS(bernoulli_numbers(-1), std::invalid_argument);
}

TEST_CASE("full verification on random two-dimensional lattice cones") {
  uint64_t state = 0x243f6a8885a308d3ull;
  auto next = [&]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  };
  auto small = [&](long lo, long hi) { return lo + static_cast<long>(next() % static_cast<uint64_t>(hi - lo + 1)); };

  int generated = 0;
  while (generated < 8) {
    std::vector<RatVec> gens;
    long count = small(2, 3);
    for (long i = 0; i < count; ++i) {
      RatVec g = {Rat(small(-3, 3)), Rat(small(-3, 3))};
      if (!is_zero(g)) gens.push_back(g);
    }
    if (gens.size() < 2) continue;
    Cone c(2, gens);
    if (c.dim() != 2) continue;
    RatMat basis = {{Rat(small(-2, 2)), Rat(small(-2, 2))}, {Rat(small(-2, 2)), Rat(small(-2, 2))}};
    if (mat_det(basis) == 0) continue;
    LatticeCone lc(c, basis);
    ++generated;
    CAPTURE(canonical_key(lc));
    EmReport r = verify_euler_maclaurin(lc, 4);
    for (const auto& v : r.verdicts) {
      CAPTURE(v.name);
      CAPTURE(v.detail);
      CHECK(v.pass);
    }
    CHECK(!r.order_insufficient);
  }
}

TEST_CASE("catalog sample points are valid") {
  for (const auto& entry : standard_catalog()) {
    if (entry.sample_point.empty()) {
      CHECK(!is_strongly_convex(entry.cone.cone()));
      continue;
    }
    for (const auto& g : entry.cone.cone().generators()) {
      double pairing = 0;
      for (size_t i = 0; i < entry.sample_point.size(); ++i) pairing += rat_to_double(g[i]) * entry.sample_point[i];
      CHECK(pairing < 0);
    }
  }
}
