#include "doctest.h"

#include "conical/subdivision.hpp"
#include "test_helpers.hpp"

#include <algorithm>
#include <map>
#include <set>

using namespace conical;
using namespace conical::testing;

namespace {

std::set<std::string> piece_keys(const Subdivision& s) {
  std::set<std::string> keys;
  for (const auto& p : s.pieces) keys.insert(canonical_key(p));
  return keys;
}

Subdivision example_3_6() {
  LatticeCone parent = std_cone(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  return Subdivision{parent,
                     {LatticeCone(cone(3, {{1, 0, 0}, {1, 1, 0}, {0, 0, 1}}), parent.lattice_basis()),
                      LatticeCone(cone(3, {{0, 1, 0}, {1, 1, 0}, {0, 0, 1}}), parent.lattice_basis())}};
}

}  // namespace

TEST_CASE("triangulate") {
  SUBCASE("simplicial cone is its own triangulation") {
    LatticeCone lc = std_cone(3, {{1, 0, 0}, {1, 1, 0}, {1, 1, 1}});
    Subdivision s = triangulate(lc);
    REQUIRE(s.pieces.size() == 1);
    CHECK(canonical_key(s.pieces[0]) == canonical_key(lc));
  }
  SUBCASE("square cone splits into two pieces sharing a 2-face") {
    LatticeCone lc = std_cone(3, {{1, 0, 0}, {0, 1, 0}, {1, 0, 1}, {0, 1, 1}});
    Subdivision s = triangulate(lc);
    REQUIRE(s.pieces.size() == 2);
    CHECK(validate_subdivision(s).valid);
    Cone common = intersect(s.pieces[0].cone(), s.pieces[1].cone());
    CHECK(common.dim() == 2);
    CHECK(is_face_of(common, s.pieces[0].cone()));
    CHECK(is_face_of(common, s.pieces[1].cone()));
  }
  SUBCASE("half-plane splits into the two expected quadrants") {
    LatticeCone lc = std_cone(2, {{1, 0}, {-1, 0}, {0, 1}});
    Subdivision s = triangulate(lc);
    REQUIRE(s.pieces.size() == 2);
    std::set<std::string> expect = {canonical_key(std_cone(2, {{1, 0}, {0, 1}})),
                                    canonical_key(std_cone(2, {{-1, 0}, {0, 1}}))};
    CHECK(piece_keys(s) == expect);
  }
  SUBCASE("line splits into two rays") {
    LatticeCone lc = std_cone(1, {{1}, {-1}});
    Subdivision s = triangulate(lc);
    REQUIRE(s.pieces.size() == 2);
    CHECK(validate_subdivision(s).valid);
  }
}

TEST_CASE("validate_subdivision") {
  LatticeCone quadrant = std_cone(2, {{1, 0}, {0, 1}});
  SUBCASE("textbook split is valid") {
    Subdivision s{quadrant,
                  {LatticeCone(cone(2, {{1, 0}, {1, 1}}), quadrant.lattice_basis()),
                   LatticeCone(cone(2, {{1, 1}, {0, 1}}), quadrant.lattice_basis())}};
    CHECK(validate_subdivision(s).valid);
  }
  SUBCASE("missing piece fails coverage") {
    Subdivision s{quadrant, {LatticeCone(cone(2, {{1, 0}, {1, 1}}), quadrant.lattice_basis())}};
    SubdivisionReport r = validate_subdivision(s);
    CHECK(!r.valid);
    CHECK(r.violation.find("coverage") != std::string::npos);
  }
  SUBCASE("overlap not along faces is rejected") {
    Subdivision s{quadrant,
                  {quadrant, LatticeCone(cone(2, {{1, 1}, {0, 1}}), quadrant.lattice_basis())}};
    SubdivisionReport r = validate_subdivision(s);
    CHECK(!r.valid);
    CHECK(r.violation.find("face") != std::string::npos);
  }
}

TEST_CASE("smooth_subdivide") {
  SUBCASE("index-2 cone splits at e1+e2") {
    LatticeCone lc = std_cone(2, {{1, 0}, {1, 2}});
    Subdivision s = smooth_subdivide(lc);
    REQUIRE(s.pieces.size() == 2);
    std::set<std::string> expect = {canonical_key(std_cone(2, {{1, 0}, {1, 1}})),
                                    canonical_key(std_cone(2, {{1, 1}, {1, 2}}))};
    CHECK(piece_keys(s) == expect);
    for (const auto& p : s.pieces) CHECK(index_w(p) == 1);
    CHECK(validate_subdivision(s).valid);
  }
  SUBCASE("smooth input is untouched") {
    LatticeCone lc = lat_cone(2, {{1, 0}, {1, 2}}, {{1, 0}, {0, 2}});
    Subdivision s = smooth_subdivide(lc);
    REQUIRE(s.pieces.size() == 1);
    CHECK(canonical_key(s.pieces[0]) == canonical_key(lc));
  }
  SUBCASE("index-3 cone ends with three unimodular pieces") {
    LatticeCone lc = std_cone(2, {{1, 0}, {1, 3}});
    Subdivision s = smooth_subdivide(lc);
    CHECK(s.pieces.size() == 3);
    for (const auto& p : s.pieces) CHECK(index_w(p) == 1);
    CHECK(validate_subdivision(s).valid);
  }
  SUBCASE("3-dim non-smooth simplicial cone") {
    LatticeCone lc = std_cone(3, {{1, 0, 0}, {0, 1, 0}, {1, 1, 2}});
    REQUIRE(index_w(lc) == 2);
    Subdivision s = smooth_subdivide(lc);
    CHECK(validate_subdivision(s).valid);
    for (const auto& p : s.pieces) CHECK(is_smooth(p));
  }
  SUBCASE("non-simplicial and non-pointed inputs smooth out") {
    for (const auto& lc : {std_cone(3, {{1, 0, 0}, {0, 1, 0}, {1, 0, 1}, {0, 1, 1}}),
                           std_cone(2, {{1, 0}, {-1, 0}, {0, 1}}),
                           std_cone(3, {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, 0, 1}})}) {
      Subdivision s = smooth_subdivide(lc);
      CHECK(validate_subdivision(s).valid);
      for (const auto& p : s.pieces) CHECK(is_smooth(p));
    }
  }
}

TEST_CASE("analyze reproduces the canonical 3-dim example") {
  SubdivisionAnalysis a = analyze(example_3_6());

  std::map<std::string, FaceClass> expected;
  expected[cone_geometry_key(cone(3, {{1, 0, 0}, {0, 1, 0}}))] = FaceClass::parent_j0;
  expected[cone_geometry_key(cone(3, {{1, 0, 0}}))] = FaceClass::parent_j1;
  expected[cone_geometry_key(cone(3, {{1, 0, 0}, {0, 0, 1}}))] = FaceClass::parent_j1;
  expected[cone_geometry_key(cone(3, {{0, 1, 0}}))] = FaceClass::parent_j1;
  expected[cone_geometry_key(cone(3, {{0, 1, 0}, {0, 0, 1}}))] = FaceClass::parent_j1;
  expected[cone_geometry_key(cone(3, {{0, 0, 1}}))] = FaceClass::parent_j2;
  expected[cone_geometry_key(cone(3, {{1, 0, 0}, {1, 1, 0}}))] = FaceClass::induced;
  expected[cone_geometry_key(cone(3, {{0, 1, 0}, {1, 1, 0}}))] = FaceClass::induced;
  expected[cone_geometry_key(cone(3, {{1, 1, 0}}))] = FaceClass::neither;
  expected[cone_geometry_key(cone(3, {{1, 1, 0}, {0, 0, 1}}))] = FaceClass::neither;

  REQUIRE(a.faces.size() == expected.size());
  std::string square_key = cone_geometry_key(cone(3, {{1, 0, 0}, {0, 1, 0}}));
  for (const auto& af : a.faces) {
    std::string key = cone_geometry_key(af.cone);
    REQUIRE(expected.count(key) == 1);
    CHECK(af.cls == expected[key]);
    if (af.cls == FaceClass::induced) {
      REQUIRE(af.alpha.has_value());
      CHECK(cone_geometry_key(a.faces[*af.alpha].cone) == square_key);
    }
  }
}

TEST_CASE("analyze of the trivial subdivision puts every face in class j1") {
  LatticeCone lc = std_cone(2, {{1, 0}, {0, 1}});
  SubdivisionAnalysis a = analyze(trivial_subdivision(lc));
  REQUIRE(a.faces.size() == 2);
  for (const auto& af : a.faces) CHECK(af.cls == FaceClass::parent_j1);
}

TEST_CASE("open faces and intersection multiplicities of the quadrant split") {
  LatticeCone quadrant = std_cone(2, {{1, 0}, {0, 1}});
  Subdivision s{quadrant,
                {LatticeCone(cone(2, {{1, 0}, {1, 1}}), quadrant.lattice_basis()),
                 LatticeCone(cone(2, {{1, 1}, {0, 1}}), quadrant.lattice_basis())}};
  SubdivisionAnalysis a = analyze(s);

  std::set<std::string> open_keys;
  for (const auto& f : a.open_faces) open_keys.insert(cone_geometry_key(f.face_cone));
  std::set<std::string> expect = {cone_geometry_key(cone(2, {{1, 1}})), cone_geometry_key(cone(2, {{1, 0}, {1, 1}})),
                                  cone_geometry_key(cone(2, {{1, 1}, {0, 1}}))};
  CHECK(open_keys == expect);

  // lambda multiplicities: both pieces with +1, their common ray with -1
  Rat total = 0;
  for (const auto& [h, l] : a.intersections) total += l;
  CHECK(total == 1);
  REQUIRE(a.intersections.size() == 3);
  for (const auto& [h, l] : a.intersections) {
    if (h.dim() == 2)
      CHECK(l == 1);
    else
      CHECK(l == -1);
  }
}

TEST_CASE("induced transverse subdivisions (pointed parents)") {
  std::vector<Subdivision> cases;
  cases.push_back(example_3_6());
  {
    LatticeCone quadrant = std_cone(2, {{1, 0}, {0, 1}});
    cases.push_back(Subdivision{quadrant,
                                {LatticeCone(cone(2, {{1, 0}, {1, 1}}), quadrant.lattice_basis()),
                                 LatticeCone(cone(2, {{1, 1}, {0, 1}}), quadrant.lattice_basis())}});
  }
  for (const auto& s : cases) {
    SubdivisionAnalysis a = analyze(s);
    for (const auto& af : a.faces) {
      if (af.piece_indices.empty()) continue;
      auto f_span = span_basis(af.cone.generators());
      LatticeCone t_parent = transverse_along_subspace(s.parent, f_span);

      // distinctness of the transverse pieces
      std::set<std::string> keys;
      std::vector<LatticeCone> t_pieces;
      for (size_t i : af.piece_indices) {
        LatticeCone t = transverse_along_subspace(s.pieces[i], f_span);
        keys.insert(canonical_key(t));
        t_pieces.push_back(t);
      }
      CHECK(keys.size() == af.piece_indices.size());

      // they subdivide the transverse cone of the parent
      if (t_parent.dim() > 0) {
        Subdivision ts{t_parent, t_pieces};
        CHECK(validate_subdivision(ts).valid);
      }

      // intersections of transverse pieces agree with transverse intersections
      if (af.piece_indices.size() >= 2) {
        for (size_t a_idx = 0; a_idx < af.piece_indices.size(); ++a_idx)
          for (size_t b_idx = a_idx + 1; b_idx < af.piece_indices.size(); ++b_idx) {
            size_t i = af.piece_indices[a_idx], j = af.piece_indices[b_idx];
            Cone lhs = intersect(t_pieces[a_idx].cone(), t_pieces[b_idx].cone());
            Cone cij = intersect(s.pieces[i].cone(), s.pieces[j].cone());
            LatticeCone cij_lat(cij, sublattice_in_subspace(s.parent.lattice_basis(), span_basis(cij.generators())));
            Cone rhs = transverse_along_subspace(cij_lat, f_span).cone();
            CHECK(cone_geometry_key(lhs) == cone_geometry_key(rhs));
          }
      }

      // class-neither faces project onto cones containing a line
      if (af.cls == FaceClass::neither) CHECK(!is_strongly_convex(t_parent.cone()));
    }
  }
}

TEST_CASE("alpha fibers subdivide their target faces") {
  SubdivisionAnalysis a = analyze(example_3_6());
  for (size_t g_idx = 0; g_idx < a.faces.size(); ++g_idx) {
    if (a.faces[g_idx].cls != FaceClass::parent_j0) continue;
    LatticeCone target(a.faces[g_idx].cone, a.faces[g_idx].lattice);
    std::vector<LatticeCone> fiber;
    for (const auto& af : a.faces)
      if (af.cls == FaceClass::induced && af.alpha == g_idx) fiber.emplace_back(af.cone, af.lattice);
    REQUIRE(!fiber.empty());
    CHECK(validate_subdivision(Subdivision{target, fiber}).valid);
  }
}
