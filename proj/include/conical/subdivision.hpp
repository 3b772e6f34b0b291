#pragma once

// Subdivisions of lattice cones: placing triangulation, refinement into
// smooth (unimodular) pieces, validation of the subdivision axioms, and the
// combinatorial analysis of the face poset of a subdivision (piece counts,
// induced faces, the five-class partition, the alpha map, open faces and
// intersection multiplicities).

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "conical/cone.hpp"

namespace conical {

struct Subdivision {
  LatticeCone parent;
  std::vector<LatticeCone> pieces;  // full-dimensional, all carrying the parent lattice
};

inline Subdivision trivial_subdivision(const LatticeCone& lc) { return Subdivision{lc, {lc}}; }

namespace detail {

// |det| of simplicial generators in lattice coordinates.
inline Rat piece_index(const std::vector<RatVec>& gens, const std::vector<RatVec>& lattice) {
  RatMat m;
  for (const auto& v : gens) {
    auto coords = coords_in_basis(v, lattice);
    if (!coords) throw std::invalid_argument("piece_index: generator outside lattice span");
    m.push_back(*coords);
  }
  if (m.size() != lattice.size()) throw std::invalid_argument("piece_index: not full-dimensional");
  return rat_abs(mat_det(m));
}

inline std::vector<RatVec> sorted_gens(std::vector<RatVec> gens) {
  std::sort(gens.begin(), gens.end(), lex_less);
  return gens;
}

}  // namespace detail

// Placing (incremental) triangulation over the given generator order. Every
// piece is simplicial and full-dimensional in lin(parent); pieces carry the
// parent lattice.
inline Subdivision triangulate_with_order(const LatticeCone& lc, const std::vector<RatVec>& order) {
  if (lc.dim() == 0) return trivial_subdivision(lc);
  std::vector<std::vector<RatVec>> pieces;  // generator lists, lex-sorted
  std::vector<RatVec> processed;
  for (const auto& g : order) {
    if (pieces.empty()) {
      pieces.push_back({g});
      processed.push_back(g);
      continue;
    }
    Cone current(lc.ambient_dim(), processed);
    if (contains(current, g)) continue;  // cannot happen for primary generators; guard
    if (!in_span(g, span_basis(processed))) {
      // dimension grows: cone over the whole triangulation
      for (auto& p : pieces) p = detail::sorted_gens([&] {
        auto q = p;
        q.push_back(g);
        return q;
      }());
    } else {
      // same span: attach g to every boundary facet visible from it
      std::vector<RatVec> visible;
      for (const auto& u : facet_normals(current))
        if (dot(u, g) < 0) visible.push_back(u);
      std::set<std::vector<RatVec>> fresh;
      for (const auto& p : pieces) {
        for (size_t drop = 0; drop < p.size(); ++drop) {
          std::vector<RatVec> facet;
          for (size_t i = 0; i < p.size(); ++i)
            if (i != drop) facet.push_back(p[i]);
          for (const auto& u : visible) {
            bool on_hyperplane = true;
            for (const auto& v : facet)
              if (dot(u, v) != 0) {
                on_hyperplane = false;
                break;
              }
            if (!on_hyperplane) continue;
            auto fresh_piece = facet;
            fresh_piece.push_back(g);
            fresh.insert(detail::sorted_gens(fresh_piece));
            break;
          }
        }
      }
      for (const auto& p : fresh) pieces.push_back(p);
    }
    processed.push_back(g);
  }
  Subdivision s{lc, {}};
  for (const auto& p : pieces) s.pieces.emplace_back(Cone(lc.ambient_dim(), p), lc.lattice_basis());
  return s;
}

inline Subdivision triangulate(const LatticeCone& lc) {
  return triangulate_with_order(lc, primary_generators(lc));
}

// Refine until every piece is smooth, replacing a piece of maximal index by
// the star subdivision at a primitive parallelepiped lattice point. The pair
// (max index, count at max) strictly decreases, so the loop terminates.
inline Subdivision smooth_subdivide(const LatticeCone& lc) {
  if (lc.dim() == 0) return trivial_subdivision(lc);
  Subdivision tri = triangulate(lc);
  const auto& lattice = lc.lattice_basis();
  std::vector<std::vector<RatVec>> pieces;
  for (const auto& p : tri.pieces) pieces.push_back(detail::sorted_gens(primary_generators(p)));

  while (true) {
    // locate a piece of maximal index
    Rat w_max = 1;
    size_t target = pieces.size();
    std::string target_key;
    for (size_t i = 0; i < pieces.size(); ++i) {
      Rat w = detail::piece_index(pieces[i], lattice);
      std::string key;
      if (w > w_max || (w == w_max && w > 1)) {
        for (const auto& v : pieces[i]) key += vec_to_string(v);
        if (w > w_max || key < target_key) {
          w_max = w;
          target = i;
          target_key = key;
        }
      }
    }
    if (target == pieces.size()) break;  // all unimodular

    const std::vector<RatVec>& d_gens = pieces[target];
    size_t n = d_gens.size();
    // coordinates of the generators in the lattice basis (integer matrix)
    RatMat a;
    for (const auto& v : d_gens) a.push_back(*coords_in_basis(v, lattice));
    auto h = hnf_rat(a).first;
    // coset representatives y with 0 <= y_i < H_ii enumerate the lattice
    // points of the half-open parallelepiped; keep the one with the
    // lexicographically smallest coefficient vector
    std::optional<RatVec> best_coeffs;
    std::vector<long> y(n, 0);
    std::vector<long> bounds(n);
    for (size_t i = 0; i < n; ++i) {
      if (h[i][i].get_den() != 1) throw std::logic_error("smooth_subdivide: HNF pivot not integral");
      bounds[i] = static_cast<long>(h[i][i].get_num().get_si());
    }
    auto advance = [&]() {
      for (size_t i = 0; i < n; ++i) {
        if (++y[i] < bounds[i]) return true;
        y[i] = 0;
      }
      return false;
    };
    while (advance()) {
      RatVec rhs(n);
      for (size_t i = 0; i < n; ++i) rhs[i] = Rat(y[i]);
      // c solves c A = y; reduce into [0,1)
      auto c = solve_rational(mat_transpose(a), rhs);
      if (!c) throw std::logic_error("smooth_subdivide: singular piece");
      RatVec coeffs(n);
      bool all_zero = true;
      for (size_t i = 0; i < n; ++i) {
        Rat frac = (*c)[i];
        Int fl;
        mpz_fdiv_q(fl.get_mpz_t(), frac.get_num().get_mpz_t(), frac.get_den().get_mpz_t());
        coeffs[i] = frac - Rat(fl);
        if (coeffs[i] != 0) all_zero = false;
      }
      if (all_zero) continue;
      if (!best_coeffs || lex_less(coeffs, *best_coeffs)) best_coeffs = coeffs;
    }
    if (!best_coeffs) throw std::logic_error("smooth_subdivide: no parallelepiped point despite index > 1");

    RatVec v_new(lc.ambient_dim(), Rat(0));
    std::vector<RatVec> minimal_face;
    for (size_t i = 0; i < n; ++i) {
      if ((*best_coeffs)[i] == 0) continue;
      v_new = vec_add(v_new, vec_scale((*best_coeffs)[i], d_gens[i]));
      minimal_face.push_back(d_gens[i]);
    }
    // star-subdivide every piece containing the minimal face
    std::vector<std::vector<RatVec>> next;
    for (const auto& p : pieces) {
      bool contains_face = true;
      for (const auto& v : minimal_face)
        if (std::find(p.begin(), p.end(), v) == p.end()) {
          contains_face = false;
          break;
        }
      if (!contains_face) {
        next.push_back(p);
        continue;
      }
      for (const auto& v : minimal_face) {
        std::vector<RatVec> swapped;
        for (const auto& w : p)
          if (w != v) swapped.push_back(w);
        swapped.push_back(v_new);
        next.push_back(detail::sorted_gens(swapped));
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    pieces = next;
  }

  Subdivision s{lc, {}};
  for (const auto& p : pieces) s.pieces.emplace_back(Cone(lc.ambient_dim(), p), lattice);
  return s;
}

// ---------------------------------------------------------------------------
// validation

struct SubdivisionReport {
  bool valid = true;
  std::string violation;  // first failed condition, with a witness
};

inline SubdivisionReport validate_subdivision(const Subdivision& s) {
  auto fail = [](std::string msg) { return SubdivisionReport{false, std::move(msg)}; };
  if (s.pieces.empty()) return fail("no pieces");
  for (size_t i = 0; i < s.pieces.size(); ++i) {
    const auto& p = s.pieces[i];
    if (p.lattice_basis() != s.parent.lattice_basis())
      return fail("piece " + std::to_string(i) + " does not carry the parent lattice");
    if (p.dim() != s.parent.dim()) return fail("piece " + std::to_string(i) + " has wrong dimension");
    if (!cone_subset(p.cone(), s.parent.cone()))
      return fail("piece " + std::to_string(i) + " is not contained in the parent");
  }
  for (size_t i = 0; i < s.pieces.size(); ++i)
    for (size_t j = i + 1; j < s.pieces.size(); ++j) {
      Cone common = intersect(s.pieces[i].cone(), s.pieces[j].cone());
      if (!is_face_of(common, s.pieces[i].cone()) || !is_face_of(common, s.pieces[j].cone()))
        return fail("pieces " + std::to_string(i) + " and " + std::to_string(j) +
                    " do not intersect along a common face");
    }
  // coverage: every piece facet lies on a parent facet or is shared by
  // exactly two pieces
  auto parent_normals = facet_normals(s.parent.cone());
  std::map<std::string, int> internal_count;
  for (const auto& p : s.pieces) {
    for (const auto& f : faces(p.cone())) {
      if (f.dim() + 1 != p.dim()) continue;
      bool on_boundary = false;
      for (const auto& u : parent_normals) {
        bool vanishes = true;
        for (const auto& g : f.generators())
          if (dot(u, g) != 0) {
            vanishes = false;
            break;
          }
        if (vanishes) {
          on_boundary = true;
          break;
        }
      }
      if (!on_boundary) internal_count[cone_geometry_key(f)]++;
    }
  }
  for (const auto& [key, count] : internal_count)
    if (count != 2) return fail("coverage gap: internal facet " + key + " belongs to " + std::to_string(count) +
                                " pieces instead of 2");
  return SubdivisionReport{};
}

// ---------------------------------------------------------------------------
// analysis of the face poset

enum class FaceClass {
  parent_j0,   // proper face of the parent, face of no piece
  parent_j1,   // proper face of the parent, face of exactly one piece
  parent_j2,   // proper face of the parent, face of at least two pieces
  induced,     // piece face arising from a nontrivial subdivision of a parent face
  neither,     // piece face neither over the parent boundary nor induced
};

struct AnalyzedFace {
  Cone cone;
  std::vector<RatVec> lattice;        // parent lattice ∩ lin(face)
  std::vector<size_t> piece_indices;  // pieces having this cone as a face
  FaceClass cls;
  std::optional<size_t> alpha;  // for induced faces: index (into faces) of the parent face subdivided
};

struct SubdivisionAnalysis {
  Subdivision subdivision;
  std::vector<AnalyzedFace> faces;                         // nonzero proper faces of parent or pieces
  std::vector<FaceRef> open_faces;                         // piece faces meeting the relative interior
  std::vector<std::pair<LatticeCone, Rat>> intersections;  // (C_I as lattice cone, lambda multiplicity)
};

// Faces of the pieces not contained in any proper face of the parent; their
// relative interiors partition the parent. Deduplicated, deterministic order.
inline std::vector<FaceRef> open_faces(const Subdivision& s) {
  std::vector<Cone> proper;
  for (const auto& f : faces(s.parent.cone()))
    if (f.dim() != s.parent.dim()) proper.push_back(f);
  std::map<std::string, Cone> chosen;
  for (const auto& p : s.pieces)
    for (const auto& f : faces(p.cone())) {
      bool buried = false;
      for (const auto& g : proper)
        if (cone_subset(f, g)) {
          buried = true;
          break;
        }
      if (buried) continue;
      chosen.emplace(cone_geometry_key(f), f);
    }
  std::vector<FaceRef> out;
  for (const auto& [key, f] : chosen)
    out.push_back(FaceRef{s.parent, f, sublattice_in_subspace(s.parent.lattice_basis(), span_basis(f.generators()))});
  std::stable_sort(out.begin(), out.end(), [](const FaceRef& a, const FaceRef& b) {
    if (a.face_cone.dim() != b.face_cone.dim()) return a.face_cone.dim() < b.face_cone.dim();
    return cone_geometry_key(a.face_cone) < cone_geometry_key(b.face_cone);
  });
  return out;
}

inline SubdivisionAnalysis analyze(const Subdivision& s) {
  SubdivisionReport report = validate_subdivision(s);
  if (!report.valid) throw std::invalid_argument("analyze: invalid subdivision: " + report.violation);

  SubdivisionAnalysis out{s, {}, open_faces(s), {}};
  size_t n = s.pieces.size();

  std::vector<std::set<std::string>> piece_face_keys(n);
  for (size_t i = 0; i < n; ++i)
    for (const auto& f : faces(s.pieces[i].cone())) piece_face_keys[i].insert(cone_geometry_key(f));
  std::set<std::string> parent_face_keys;
  std::vector<Cone> parent_proper_faces;
  for (const auto& f : faces(s.parent.cone())) {
    parent_face_keys.insert(cone_geometry_key(f));
    if (f.dim() != s.parent.dim()) parent_proper_faces.push_back(f);
  }

  // collect P: nonzero proper faces of the parent or of some piece
  std::map<std::string, Cone> pool;
  for (const auto& f : faces(s.parent.cone()))
    if (f.dim() > 0 && f.dim() != s.parent.dim()) pool.emplace(cone_geometry_key(f), f);
  for (const auto& p : s.pieces)
    for (const auto& f : faces(p.cone()))
      if (f.dim() > 0 && f.dim() != p.dim()) pool.emplace(cone_geometry_key(f), f);

  std::vector<std::pair<std::string, Cone>> ordered(pool.begin(), pool.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.second.dim() != b.second.dim()) return a.second.dim() < b.second.dim();
    return a.first < b.first;
  });

  for (const auto& [key, f] : ordered) {
    AnalyzedFace af{f, sublattice_in_subspace(s.parent.lattice_basis(), span_basis(f.generators())), {}, FaceClass::neither,
                    std::nullopt};
    for (size_t i = 0; i < n; ++i)
      if (piece_face_keys[i].count(key)) af.piece_indices.push_back(i);
    if (parent_face_keys.count(key)) {
      af.cls = af.piece_indices.empty() ? FaceClass::parent_j0
                                        : (af.piece_indices.size() == 1 ? FaceClass::parent_j1 : FaceClass::parent_j2);
    } else {
      // induced face: equal-dimensional subcone of a (necessarily unique)
      // proper face of the parent
      for (const auto& g : parent_proper_faces) {
        if (g.dim() == f.dim() && cone_subset(f, g)) {
          af.cls = FaceClass::induced;
          break;
        }
      }
    }
    out.faces.push_back(std::move(af));
  }

  // alpha targets resolved as indices into out.faces
  for (auto& af : out.faces) {
    if (af.cls != FaceClass::induced) continue;
    for (size_t i = 0; i < out.faces.size(); ++i) {
      const auto& g = out.faces[i];
      bool parent_face = g.cls == FaceClass::parent_j0 || g.cls == FaceClass::parent_j1 || g.cls == FaceClass::parent_j2;
      if (parent_face && g.cone.dim() == af.cone.dim() && cone_subset(af.cone, g.cone)) {
        af.alpha = i;
        break;
      }
    }
    if (!af.alpha) throw std::logic_error("analyze: induced face without target parent face");
  }

  // intersection cones C_I with multiplicities lambda_H
  std::map<std::string, std::pair<LatticeCone, Rat>> lambda;
  std::vector<std::optional<Cone>> memo(size_t(1) << n);
  std::function<const Cone&(size_t)> intersection_of = [&](size_t mask) -> const Cone& {
    if (!memo[mask]) {
      size_t low = mask & (mask - 1);
      size_t bit = mask ^ low;
      size_t idx = 0;
      while (!((bit >> idx) & 1)) ++idx;
      if (low == 0)
        memo[mask] = s.pieces[idx].cone();
      else
        memo[mask] = intersect(intersection_of(low), s.pieces[idx].cone());
    }
    return *memo[mask];
  };
  for (size_t mask = 1; mask < (size_t(1) << n); ++mask) {
    const Cone& c = intersection_of(mask);
    Rat sign = (__builtin_popcountll(mask) % 2 == 1) ? Rat(1) : Rat(-1);
    std::string key = cone_geometry_key(c);
    auto it = lambda.find(key);
    if (it == lambda.end()) {
      LatticeCone hc(c, sublattice_in_subspace(s.parent.lattice_basis(), span_basis(c.generators())));
      lambda.emplace(key, std::make_pair(hc, sign));
    } else {
      it->second.second += sign;
    }
  }
  for (auto& [key, entry] : lambda) out.intersections.push_back(entry);
  return out;
}

}  // namespace conical
