#pragma once

// Polyhedral cones over the rationals and lattice cones: faces, face
// lattices, transverse cones, smoothness and canonical forms. Facet
// enumeration is exact brute force over generator subsets, adequate for the
// desk-scale dimensions this library targets.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "conical/linalg.hpp"

namespace conical {

class Cone;
namespace detail {
std::vector<RatVec> facet_normals_of(const std::vector<RatVec>& gens, size_t ambient_dim);
bool gens_contain_point(const std::vector<RatVec>& gens, size_t ambient_dim, const RatVec& x);
}  // namespace detail

// A closed convex polyhedral cone, stored through a canonical generating set:
// primitive directions, no generator a nonnegative combination of the others,
// lexicographically sorted.
class Cone {
 public:
  Cone(size_t ambient_dim, std::vector<RatVec> generators) : ambient_dim_(ambient_dim) {
    for (auto& g : generators) {
      if (g.size() != ambient_dim_) throw std::invalid_argument("Cone: generator dimension mismatch");
      if (is_zero(g)) throw std::invalid_argument("Cone: zero generator");
      g = primitive_direction(g);
    }
    std::sort(generators.begin(), generators.end(), lex_less);
    generators.erase(std::unique(generators.begin(), generators.end()), generators.end());
    // drop generators that are nonnegative combinations of the rest
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < generators.size(); ++i) {
        std::vector<RatVec> rest;
        for (size_t j = 0; j < generators.size(); ++j)
          if (j != i) rest.push_back(generators[j]);
        if (detail::gens_contain_point(rest, ambient_dim_, generators[i])) {
          generators.erase(generators.begin() + static_cast<long>(i));
          changed = true;
          break;
        }
      }
    }
    gens_ = std::move(generators);
    dim_ = span_basis(gens_).size();
  }

  static Cone zero(size_t ambient_dim) { return Cone(ambient_dim, {}); }

  size_t ambient_dim() const { return ambient_dim_; }
  size_t dim() const { return dim_; }
  bool is_zero_cone() const { return gens_.empty(); }
  const std::vector<RatVec>& generators() const { return gens_; }

 private:
  size_t ambient_dim_;
  size_t dim_ = 0;
  std::vector<RatVec> gens_;
};

namespace detail {

// Basis (from the generators) of lin(C), deterministic.
inline std::vector<RatVec> gens_span_basis(const std::vector<RatVec>& gens) { return span_basis(gens); }

// Conditions x in lin(span of gens): rows spanning the standard-orthogonal
// complement of the span.
inline RatMat span_membership_conditions(const std::vector<RatVec>& gens, size_t ambient_dim) {
  auto basis = gens_span_basis(gens);
  RatMat rows;
  for (const auto& b : basis) rows.push_back(b);
  if (rows.empty()) rows.push_back(RatVec(ambient_dim, Rat(0)));
  auto complement = rational_kernel(rows);
  RatMat conditions;
  for (auto& c : complement) conditions.push_back(c);
  return conditions;
}

// All facet supporting forms of cone(gens), as primitive vectors u in lin(C)
// (standard pairing) with u >= 0 on every generator; lex sorted, deduped.
// Every facet contains dim-1 independent generators, so scanning generator
// subsets of size dim-1 is exhaustive.
inline std::vector<RatVec> facet_normals_of(const std::vector<RatVec>& gens, size_t ambient_dim) {
  size_t d = gens_span_basis(gens).size();
  std::vector<RatVec> normals;
  if (d == 0) return normals;
  auto consider = [&](const std::vector<size_t>& chosen) {
    RatMat rows;
    for (size_t i : chosen) rows.push_back(gens[i]);
    if (span_basis(rows).size() != d - 1) return;
    // u orthogonal to the subset and inside lin(C): kernel of subset rows
    // plus the lin(C) membership conditions
    RatMat conditions = rows;
    RatMat lin_conditions = span_membership_conditions(gens, ambient_dim);
    for (auto& r : lin_conditions) conditions.push_back(r);
    if (conditions.empty()) conditions.push_back(RatVec(ambient_dim, Rat(0)));
    auto kernel = rational_kernel(conditions);
    if (kernel.size() != 1) return;
    RatVec u = primitive_direction(kernel[0]);
    bool nonneg = true, nonpos = true;
    for (const auto& g : gens) {
      Rat v = dot(u, g);
      if (v < 0) nonneg = false;
      if (v > 0) nonpos = false;
    }
    if (!nonneg && !nonpos) return;
    if (nonneg && nonpos) return;  // u vanishes on all of C: not a facet
    if (nonpos) u = vec_scale(Rat(-1), u);
    normals.push_back(u);
  };

  if (d == 1) {
    consider({});
  } else {
    std::vector<size_t> stack;
    // enumerate all (d-1)-subsets of generators
    std::function<void(size_t, size_t)> rec = [&](size_t start, size_t depth) {
      if (depth == d - 1) {
        consider(stack);
        return;
      }
      for (size_t i = start; i < gens.size(); ++i) {
        stack.push_back(i);
        rec(i + 1, depth + 1);
        stack.pop_back();
      }
    };
    rec(0, 0);
  }
  std::sort(normals.begin(), normals.end(), lex_less);
  normals.erase(std::unique(normals.begin(), normals.end()), normals.end());
  return normals;
}

inline bool gens_contain_point(const std::vector<RatVec>& gens, size_t ambient_dim, const RatVec& x) {
  if (is_zero(x)) return true;
  if (!in_span(x, gens_span_basis(gens))) return false;
  for (const auto& u : facet_normals_of(gens, ambient_dim))
    if (dot(u, x) < 0) return false;
  return true;
}

}  // namespace detail

inline std::vector<RatVec> facet_normals(const Cone& c) {
  return detail::facet_normals_of(c.generators(), c.ambient_dim());
}

inline bool contains(const Cone& c, const RatVec& x) {
  return detail::gens_contain_point(c.generators(), c.ambient_dim(), x);
}

inline bool cone_subset(const Cone& inner, const Cone& outer) {
  if (inner.is_zero_cone()) return true;
  for (const auto& g : inner.generators())
    if (!contains(outer, g)) return false;
  return true;
}

// Basis of the lineality space {x : x in C and -x in C}; empty iff strongly
// convex. Canonicalized for determinism.
inline std::vector<RatVec> lineality_basis(const Cone& c) {
  if (c.is_zero_cone()) return {};
  RatMat conditions;
  for (const auto& u : facet_normals(c)) conditions.push_back(u);
  RatMat lin_conditions = detail::span_membership_conditions(c.generators(), c.ambient_dim());
  for (auto& r : lin_conditions) conditions.push_back(r);
  if (conditions.empty()) conditions.push_back(RatVec(c.ambient_dim(), Rat(0)));
  return lattice_canonical_basis(rational_kernel(conditions));
}

inline bool is_strongly_convex(const Cone& c) { return lineality_basis(c).empty(); }

// All faces of c, including {0} (pointed cones only) and c itself; sorted by
// (dimension, geometry). Faces are intersections of subsets of facets; the
// face cone is generated by the generators of c lying on it.
std::string cone_geometry_key(const Cone& c);

inline std::vector<Cone> faces(const Cone& c) {
  auto normals = facet_normals(c);
  std::set<std::vector<size_t>> seen;
  std::vector<Cone> result;
  size_t subsets = size_t(1) << normals.size();
  for (size_t mask = 0; mask < subsets; ++mask) {
    // generators annihilated by every chosen facet normal
    std::vector<size_t> on_face;
    for (size_t i = 0; i < c.generators().size(); ++i) {
      bool ok = true;
      for (size_t f = 0; f < normals.size(); ++f)
        if ((mask >> f) & 1)
          if (dot(normals[f], c.generators()[i]) != 0) {
            ok = false;
            break;
          }
      if (ok) on_face.push_back(i);
    }
    if (!seen.insert(on_face).second) continue;
    std::vector<RatVec> gens;
    for (size_t i : on_face) gens.push_back(c.generators()[i]);
    result.emplace_back(c.ambient_dim(), gens);
  }
  std::stable_sort(result.begin(), result.end(), [](const Cone& a, const Cone& b) {
    if (a.dim() != b.dim()) return a.dim() < b.dim();
    return cone_geometry_key(a) < cone_geometry_key(b);
  });
  return result;
}

inline bool is_face_of(const Cone& f, const Cone& c) {
  std::string key = cone_geometry_key(f);
  for (const auto& g : faces(c))
    if (cone_geometry_key(g) == key) return true;
  return false;
}

// Intersection of two cones: clip the generator description of a against the
// H-description (span equations plus facet inequalities) of b.
inline Cone intersect(const Cone& a, const Cone& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("intersect: ambient dimension mismatch");
  std::vector<RatVec> gens = a.generators();
  auto clip = [&](const RatVec& u) {
    std::vector<RatVec> keep, pos, neg;
    for (const auto& g : gens) {
      Rat v = dot(u, g);
      if (v == 0)
        keep.push_back(g);
      else if (v > 0)
        pos.push_back(g);
      else
        neg.push_back(g);
    }
    for (const auto& p : pos) keep.push_back(p);
    for (const auto& p : pos)
      for (const auto& n : neg) {
        RatVec combo = vec_sub(vec_scale(dot(u, p), n), vec_scale(dot(u, n), p));
        if (!is_zero(combo)) keep.push_back(primitive_direction(combo));
      }
    std::sort(keep.begin(), keep.end(), lex_less);
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    gens = keep;
  };
  RatMat eqs = detail::span_membership_conditions(b.generators(), b.ambient_dim());
  for (const auto& u : eqs) {
    clip(u);
    clip(vec_scale(Rat(-1), u));
  }
  for (const auto& u : detail::facet_normals_of(b.generators(), b.ambient_dim())) clip(u);
  return Cone(a.ambient_dim(), gens);
}

// Canonical geometry key: ambient dimension, lineality space, and the extreme
// rays of the pointed part (projection along the lineality space onto its
// standard-orthogonal complement). Equal cones yield equal keys.
inline std::string cone_geometry_key(const Cone& c) {
  std::string key = "k" + std::to_string(c.ambient_dim()) + ";d" + std::to_string(c.dim());
  auto lin = lineality_basis(c);
  key += ";L[";
  for (const auto& v : lin) key += vec_to_string(v);
  key += "];R[";
  std::vector<RatVec> rays;
  if (lin.empty()) {
    rays = c.generators();
  } else {
    for (const auto& g : c.generators()) {
      RatVec p = orthogonal_project(g, lin);  // standard inner product
      if (!is_zero(p)) rays.push_back(primitive_direction(p));
    }
    std::sort(rays.begin(), rays.end(), lex_less);
    rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
    if (!rays.empty()) rays = Cone(c.ambient_dim(), rays).generators();
  }
  for (const auto& v : rays) key += vec_to_string(v);
  return key + "]";
}

// ---------------------------------------------------------------------------
// lattice cones

// Intersection lattice (lattice spanned by basis) ∩ subspace, via the integer
// kernel of the transverse coordinates of the basis vectors.
inline std::vector<RatVec> sublattice_in_subspace(const std::vector<RatVec>& lattice_basis,
                                                  const std::vector<RatVec>& subspace_basis) {
  if (lattice_basis.empty() || subspace_basis.empty()) return {};
  // extend the subspace basis by lattice vectors until it covers the lattice
  // span; the coordinates beyond the subspace block are the transverse ones
  std::vector<RatVec> mixed = subspace_basis;
  size_t ext = 0;
  for (const auto& u : lattice_basis) {
    if (in_span(u, mixed)) continue;
    mixed.push_back(u);
    ++ext;
  }
  if (ext == 0) return lattice_canonical_basis(lattice_basis);  // lattice span inside subspace
  RatMat t(ext, RatVec(lattice_basis.size()));
  for (size_t i = 0; i < lattice_basis.size(); ++i) {
    auto coords = coords_in_basis(lattice_basis[i], mixed);
    if (!coords) throw std::logic_error("sublattice_in_subspace: basis coordinates failed");
    for (size_t j = 0; j < ext; ++j) t[j][i] = (*coords)[subspace_basis.size() + j];
  }
  std::vector<RatVec> combos = integer_kernel(t);
  std::vector<RatVec> vectors;
  for (const auto& n : combos) {
    RatVec v(lattice_basis[0].size(), Rat(0));
    for (size_t i = 0; i < lattice_basis.size(); ++i) v = vec_add(v, vec_scale(n[i], lattice_basis[i]));
    vectors.push_back(v);
  }
  return lattice_canonical_basis(vectors);
}

// A cone together with a lattice of its linear span, stored as a canonical
// HNF basis.
class LatticeCone {
 public:
  LatticeCone(Cone cone, std::vector<RatVec> lattice_basis) : cone_(std::move(cone)) {
    lattice_ = lattice_canonical_basis(lattice_basis);
    if (lattice_.size() != cone_.dim())
      throw std::invalid_argument("LatticeCone: lattice rank does not match cone dimension");
    auto span = span_basis(cone_.generators());
    for (const auto& u : lattice_)
      if (!in_span(u, span)) throw std::invalid_argument("LatticeCone: lattice basis outside lin(cone)");
  }

  static LatticeCone zero(size_t ambient_dim) { return LatticeCone(Cone::zero(ambient_dim), {}); }

  // default lattice lin(C) ∩ Z^k
  static LatticeCone with_induced_lattice(const Cone& cone) {
    RatMat conditions = detail::span_membership_conditions(cone.generators(), cone.ambient_dim());
    if (conditions.empty()) conditions.push_back(RatVec(cone.ambient_dim(), Rat(0)));
    return LatticeCone(cone, integer_kernel(conditions));
  }

  const Cone& cone() const { return cone_; }
  const std::vector<RatVec>& lattice_basis() const { return lattice_; }
  size_t ambient_dim() const { return cone_.ambient_dim(); }
  size_t dim() const { return cone_.dim(); }
  bool is_zero_cone() const { return cone_.is_zero_cone(); }

 private:
  Cone cone_;
  std::vector<RatVec> lattice_;
};

// Shortest positive rational multiple of v inside the lattice. Throws if v is
// outside the rational span of the lattice.
inline RatVec shortest_lattice_multiple(const RatVec& v, const std::vector<RatVec>& lattice_basis) {
  if (is_zero(v)) return v;
  auto coords = coords_in_basis(v, lattice_basis);
  if (!coords) throw std::invalid_argument("shortest_lattice_multiple: vector outside lattice span");
  Int den = 1, num_gcd = 0;
  for (const auto& q : *coords) {
    Int d = q.get_den();
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
  }
  for (const auto& q : *coords) {
    Int n = q.get_num() * (den / q.get_den());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), n.get_mpz_t());
  }
  Rat t(den, num_gcd);
  t.canonicalize();
  return vec_scale(t, v);
}

// Generators rescaled to the shortest lattice multiple in their ray,
// deduplicated and minimal (the Cone is stored minimal), lex sorted.
inline std::vector<RatVec> primary_generators(const Cone& c, const std::vector<RatVec>& lattice_basis) {
  std::vector<RatVec> out;
  for (const auto& g : c.generators()) out.push_back(shortest_lattice_multiple(g, lattice_basis));
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

inline std::vector<RatVec> primary_generators(const LatticeCone& lc) {
  return primary_generators(lc.cone(), lc.lattice_basis());
}

inline bool is_simplicial(const Cone& c) { return c.generators().size() == c.dim(); }

// |det| of the primary generators written in the lattice basis; 1 for the
// zero cone. Requires a simplicial cone.
inline Rat index_w(const LatticeCone& lc) {
  if (lc.is_zero_cone()) return Rat(1);
  if (!is_simplicial(lc.cone())) throw std::invalid_argument("index_w: cone not simplicial");
  auto prim = primary_generators(lc);
  RatMat m;
  for (const auto& v : prim) {
    auto coords = coords_in_basis(v, lc.lattice_basis());
    if (!coords) throw std::invalid_argument("index_w: generator outside lattice span");
    m.push_back(*coords);
  }
  return rat_abs(mat_det(m));
}

inline bool is_smooth(const LatticeCone& lc) {
  if (lc.is_zero_cone()) return true;
  if (!is_simplicial(lc.cone())) return false;
  return index_w(lc) == 1;
}

// Lattice of a face: Λ_C ∩ lin(F). The face is validated against the parent.
inline std::vector<RatVec> face_lattice(const LatticeCone& parent, const Cone& f) {
  if (!is_face_of(f, parent.cone())) throw std::invalid_argument("face_lattice: not a face of the parent");
  if (f.is_zero_cone()) return {};
  return sublattice_in_subspace(parent.lattice_basis(), span_basis(f.generators()));
}

// Face of a lattice cone: carries parent, the face cone and its lattice.
struct FaceRef {
  LatticeCone parent;
  Cone face_cone;
  std::vector<RatVec> face_lattice_basis;
};

inline FaceRef make_face(const LatticeCone& parent, const Cone& f) {
  return FaceRef{parent, f, face_lattice(parent, f)};
}

inline LatticeCone face_as_lattice_cone(const FaceRef& f) {
  return LatticeCone(f.face_cone, f.face_lattice_basis);
}

inline std::vector<FaceRef> lattice_faces(const LatticeCone& lc) {
  std::vector<FaceRef> out;
  for (const auto& f : faces(lc.cone())) out.push_back(make_face(lc, f));
  return out;
}

// Transverse lattice cone along an arbitrary rational subspace: project the
// generators and the lattice q-orthogonally along the subspace. The image
// group of the lattice is recovered by an HNF basis of the projected basis
// vectors (they generate the image group over Z).
inline LatticeCone transverse_along_subspace(const LatticeCone& parent, const std::vector<RatVec>& subspace_basis,
                                             const InnerProduct& q = InnerProduct()) {
  std::vector<RatVec> proj_gens;
  for (const auto& g : parent.cone().generators()) {
    RatVec p = orthogonal_project(g, subspace_basis, q);
    if (!is_zero(p)) proj_gens.push_back(p);
  }
  std::vector<RatVec> proj_lattice;
  for (const auto& u : parent.lattice_basis()) {
    RatVec p = orthogonal_project(u, subspace_basis, q);
    if (!is_zero(p)) proj_lattice.push_back(p);
  }
  return LatticeCone(Cone(parent.ambient_dim(), proj_gens), lattice_canonical_basis(proj_lattice));
}

// Transverse lattice cone t(C, F) along a face.
inline LatticeCone transverse(const LatticeCone& parent, const Cone& f, const InnerProduct& q = InnerProduct()) {
  if (!is_face_of(f, parent.cone())) throw std::invalid_argument("transverse: not a face of the parent");
  if (f.is_zero_cone()) return parent;
  return transverse_along_subspace(parent, span_basis(f.generators()), q);
}

inline LatticeCone transverse(const LatticeCone& parent, const FaceRef& f, const InnerProduct& q = InnerProduct()) {
  return transverse(parent, f.face_cone, q);
}

// Canonical byte key of a lattice cone: geometry (lineality space plus
// primary extreme rays, rescaled into the lattice) and HNF lattice basis.
// Equal lattice cones produce equal keys.
inline std::string canonical_key(const LatticeCone& lc) {
  std::string key = "k" + std::to_string(lc.ambient_dim()) + ";d" + std::to_string(lc.dim());
  auto lin = lineality_basis(lc.cone());
  key += ";L[";
  for (const auto& v : sublattice_in_subspace(lc.lattice_basis(), lin)) key += vec_to_string(v);
  key += "];R[";
  std::vector<RatVec> rays;
  if (lin.empty()) {
    rays = primary_generators(lc);
  } else {
    std::vector<RatVec> proj;
    for (const auto& g : lc.cone().generators()) {
      RatVec p = orthogonal_project(g, lin);
      if (!is_zero(p)) proj.push_back(primitive_direction(p));
    }
    std::sort(proj.begin(), proj.end(), lex_less);
    proj.erase(std::unique(proj.begin(), proj.end()), proj.end());
    if (!proj.empty()) {
      Cone pointed_part(lc.ambient_dim(), proj);
      for (const auto& r : pointed_part.generators())
        rays.push_back(shortest_lattice_multiple(r, lc.lattice_basis()));
    }
    std::sort(rays.begin(), rays.end(), lex_less);
  }
  for (const auto& v : rays) key += vec_to_string(v);
  key += "];G[";
  for (const auto& v : lc.lattice_basis()) key += vec_to_string(v);
  return key + "]";
}

}  // namespace conical
