#pragma once

// The coalgebra of lattice cones: formal rational sums of cones, the
// face/transverse coproduct, germ-valued functionals on cones with the
// convolution product, convolution inverses and the recursive Birkhoff
// factorization against a projector on germs.
//
// Functional values are memoized by canonical key. Memo tables are confined
// to the functional object; share functionals across threads only with
// external coordination.

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "conical/cone.hpp"
#include "conical/germ.hpp"

namespace conical {

// ---------------------------------------------------------------------------
// formal sums

class ConeSum {
 public:
  void add(const LatticeCone& lc, const Rat& coeff) {
    if (coeff == 0) return;
    std::string key = canonical_key(lc);
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(key, std::make_pair(lc, coeff));
    } else {
      it->second.second += coeff;
      if (it->second.second == 0) terms_.erase(it);
    }
  }

  const std::map<std::string, std::pair<LatticeCone, Rat>>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

 private:
  std::map<std::string, std::pair<LatticeCone, Rat>> terms_;
};

struct TensorTerm {
  LatticeCone left;
  LatticeCone right;
  Rat coeff;
};

class TensorSum {
 public:
  void add(const LatticeCone& left, const LatticeCone& right, const Rat& coeff) {
    if (coeff == 0) return;
    auto key = std::make_pair(canonical_key(left), canonical_key(right));
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(key, TensorTerm{left, right, coeff});
    } else {
      it->second.coeff += coeff;
      if (it->second.coeff == 0) terms_.erase(it);
    }
  }

  std::vector<TensorTerm> terms() const {
    std::vector<TensorTerm> out;
    for (const auto& [k, t] : terms_) out.push_back(t);
    return out;
  }
  bool empty() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, TensorTerm> terms_;
};

// ---------------------------------------------------------------------------
// coproduct: sum over faces F of t(C, F) ⊗ F

inline TensorSum coproduct(const LatticeCone& lc, const InnerProduct& q = InnerProduct()) {
  TensorSum out;
  for (const auto& f : faces(lc.cone())) {
    LatticeCone face_lc(f, face_lattice(lc, f));
    LatticeCone t = f.is_zero_cone() ? lc : transverse_along_subspace(lc, span_basis(f.generators()), q);
    out.add(t, face_lc, Rat(1));
  }
  return out;
}

// Coproduct minus the primitive terms that are actually present (cone ⊗ zero
// appears only when the zero cone is a face, i.e. for pointed cones).
inline TensorSum reduced_coproduct(const LatticeCone& lc, const InnerProduct& q = InnerProduct()) {
  if (lc.dim() == 0) throw std::invalid_argument("reduced_coproduct: zero cone");
  TensorSum out;
  for (const auto& t : coproduct(lc, q).terms()) {
    if (t.left.dim() == 0 || t.right.dim() == 0) continue;
    out.add(t.left, t.right, t.coeff);
  }
  return out;
}

// ---------------------------------------------------------------------------
// germ-valued functionals

inline bool is_unit_germ(const Germ& g) { return germ_eq(g, Germ::unit(g.nvars), 0); }

class ConeFunctional {
 public:
  using Rule = std::function<Germ(const LatticeCone&)>;

  explicit ConeFunctional(Rule rule)
      : rule_(std::move(rule)), memo_(std::make_shared<std::map<std::string, Germ>>()) {}

  Germ operator()(const LatticeCone& lc) const {
    std::string key = canonical_key(lc);
    auto it = memo_->find(key);
    if (it != memo_->end()) return it->second;
    Germ g = rule_(lc);
    memo_->emplace(std::move(key), g);
    return g;
  }

  Germ eval(const ConeSum& sum, size_t nvars) const {
    Germ acc = Germ::zero(nvars);
    for (const auto& [key, term] : sum.terms()) acc = germ_add(acc, germ_scale(term.second, (*this)(term.first)));
    return acc;
  }

 private:
  Rule rule_;
  std::shared_ptr<std::map<std::string, Germ>> memo_;
};

// 1 on the zero cone, 0 elsewhere (the convolution unit u ∘ ε).
inline ConeFunctional unit_functional() {
  return ConeFunctional([](const LatticeCone& lc) {
    return lc.dim() == 0 ? Germ::unit(lc.ambient_dim()) : Germ::zero(lc.ambient_dim());
  });
}

// (f * g)(C) = sum over faces F of f(t(C, F)) g(F).
inline ConeFunctional convolve(const ConeFunctional& f, const ConeFunctional& g,
                               const InnerProduct& q = InnerProduct()) {
  return ConeFunctional([f, g, q](const LatticeCone& lc) {
    Germ acc = Germ::zero(lc.ambient_dim());
    for (const auto& t : coproduct(lc, q).terms())
      acc = germ_add(acc, germ_scale(t.coeff, germ_mul(f(t.left), g(t.right))));
    return acc;
  });
}

// Convolution inverse by recursion along the dimension grading:
// f^{-1}(C) = -f(C) - sum over the reduced coproduct of f^{-1}(t) f(F).
inline ConeFunctional convolution_inverse(const ConeFunctional& f, const InnerProduct& q = InnerProduct()) {
  // the recursion goes through a copy of the result so it shares its memo
  auto self = std::make_shared<std::unique_ptr<ConeFunctional>>();
  ConeFunctional result([f, q, self](const LatticeCone& lc) -> Germ {
    if (!is_unit_germ(f(LatticeCone::zero(lc.ambient_dim()))))
      throw std::invalid_argument("convolution_inverse: functional not normalized at the zero cone");
    if (lc.dim() == 0) return Germ::unit(lc.ambient_dim());
    Germ acc = germ_scale(Rat(-1), f(lc));
    for (const auto& t : reduced_coproduct(lc, q).terms())
      acc = germ_add(acc, germ_scale(-t.coeff, germ_mul((**self)(t.left), f(t.right))));
    return acc;
  });
  *self = std::make_unique<ConeFunctional>(result);
  return result;
}

// Birkhoff factorization: f1(x) = -P(f(x) + sum f1(x') f(x'')), f2 the
// complementary part, so that f = f1^{*(-1)} * f2. The projector P must fix
// constants inside its range component-wise (here: the holomorphic
// projection).
struct BirkhoffFactors {
  ConeFunctional f1;
  ConeFunctional f2;
};

inline BirkhoffFactors birkhoff_factorize(const ConeFunctional& f, const std::function<Germ(const Germ&)>& projector,
                                          const InnerProduct& q = InnerProduct()) {
  // bar(C) = f(C) + sum over reduced coproduct of f1(t) f(F); f1 = -P(bar),
  // f2 = (id - P)(bar). Both factors share one cached (bar, P(bar)) pair per
  // cone so the projector runs once.
  auto f1_holder = std::make_shared<std::unique_ptr<ConeFunctional>>();
  auto cache = std::make_shared<std::map<std::string, std::pair<Germ, Germ>>>();
  auto barp = [f, q, f1_holder, projector, cache](const LatticeCone& lc) -> const std::pair<Germ, Germ>& {
    std::string key = canonical_key(lc);
    auto it = cache->find(key);
    if (it != cache->end()) return it->second;
    if (!is_unit_germ(f(LatticeCone::zero(lc.ambient_dim()))))
      throw std::invalid_argument("birkhoff_factorize: functional not normalized at the zero cone");
    Germ acc = f(lc);
    for (const auto& t : reduced_coproduct(lc, q).terms())
      acc = germ_add(acc, germ_scale(t.coeff, germ_mul((**f1_holder)(t.left), f(t.right))));
    Germ projected = projector(acc);
    return cache->emplace(std::move(key), std::make_pair(std::move(acc), std::move(projected))).first->second;
  };
  ConeFunctional f1([barp](const LatticeCone& lc) {
    if (lc.dim() == 0) return Germ::unit(lc.ambient_dim());
    return germ_scale(Rat(-1), barp(lc).second);
  });
  *f1_holder = std::make_unique<ConeFunctional>(f1);
  ConeFunctional f2([barp](const LatticeCone& lc) {
    if (lc.dim() == 0) return Germ::unit(lc.ambient_dim());
    const auto& pair = barp(lc);
    return germ_add(pair.first, germ_scale(Rat(-1), pair.second));
  });
  return BirkhoffFactors{f1, f2};
}

// closure: g(C) = sum over faces F of f(F).
inline ConeFunctional closure_map(const ConeFunctional& f) {
  return ConeFunctional([f](const LatticeCone& lc) {
    Germ acc = Germ::zero(lc.ambient_dim());
    for (const auto& face : lattice_faces(lc)) acc = germ_add(acc, f(face_as_lattice_cone(face)));
    return acc;
  });
}

// ---------------------------------------------------------------------------
// structural checks used by the test and acceptance suites

// dim(left) + dim(right) == dim(C) for every coproduct term
inline bool coproduct_respects_grading(const LatticeCone& lc, const InnerProduct& q = InnerProduct()) {
  for (const auto& t : coproduct(lc, q).terms())
    if (t.left.dim() + t.right.dim() != lc.dim()) return false;
  return true;
}

// (id ⊗ Δ)Δ == (Δ ⊗ id)Δ, flattened to keyed triples
inline bool coproduct_coassociative(const LatticeCone& lc, const InnerProduct& q = InnerProduct()) {
  std::map<std::vector<std::string>, Rat> lhs, rhs;
  for (const auto& t : coproduct(lc, q).terms())
    for (const auto& u : coproduct(t.right, q).terms()) {
      std::vector<std::string> key = {canonical_key(t.left), canonical_key(u.left), canonical_key(u.right)};
      lhs[key] += t.coeff * u.coeff;
    }
  for (const auto& t : coproduct(lc, q).terms())
    for (const auto& u : coproduct(t.left, q).terms()) {
      std::vector<std::string> key = {canonical_key(u.left), canonical_key(u.right), canonical_key(t.right)};
      rhs[key] += t.coeff * u.coeff;
    }
  auto prune = [](std::map<std::vector<std::string>, Rat>& m) {
    for (auto it = m.begin(); it != m.end();)
      it = it->second == 0 ? m.erase(it) : std::next(it);
  };
  prune(lhs);
  prune(rhs);
  return lhs == rhs;
}

// counit laws; the right-hand law (id ⊗ ε)Δ = id requires the zero cone to be
// a face, which holds precisely for pointed cones
inline bool counit_left_law(const LatticeCone& lc, const InnerProduct& q = InnerProduct()) {
  ConeSum picked;
  for (const auto& t : coproduct(lc, q).terms())
    if (t.left.dim() == 0) picked.add(t.right, t.coeff);
  if (picked.terms().size() != 1) return false;
  const auto& [key, term] = *picked.terms().begin();
  return key == canonical_key(lc) && term.second == 1;
}

inline bool counit_right_law(const LatticeCone& lc, const InnerProduct& q = InnerProduct()) {
  ConeSum picked;
  for (const auto& t : coproduct(lc, q).terms())
    if (t.right.dim() == 0) picked.add(t.left, t.coeff);
  if (picked.terms().size() != 1) return false;
  const auto& [key, term] = *picked.terms().begin();
  return key == canonical_key(lc) && term.second == 1;
}

// iterated reduced coproduct vanishes after dim(C) steps (conilpotency)
inline bool reduced_coproduct_nilpotent(const LatticeCone& lc, size_t iterations,
                                        const InnerProduct& q = InnerProduct()) {
  // expand the leftmost slot repeatedly; a sum survives iff some chain of
  // nonzero reduced factors has the requested length
  std::function<bool(const LatticeCone&, size_t)> survives = [&](const LatticeCone& cone, size_t depth) -> bool {
    if (depth == 0) return true;
    if (cone.dim() == 0) return false;
    for (const auto& t : reduced_coproduct(cone, q).terms())
      if (survives(t.right, depth - 1)) return true;
    return false;
  };
  return !survives(lc, iterations);
}

}  // namespace conical
