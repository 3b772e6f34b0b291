#pragma once

// Exponential sums and integrals on lattice cones as truncated germs, the
// interpolating factor through the holomorphic projection and through the
// Birkhoff factorization, and the verification suites for the
// Euler-Maclaurin identities and the subdivision identities.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "conical/coalgebra.hpp"
#include "conical/cone.hpp"
#include "conical/germ.hpp"
#include "conical/subdivision.hpp"

namespace conical {

enum class SumVariant { open, closed };

// ---------------------------------------------------------------------------
// exponential sums and integrals

namespace detail {

// product over the monoid basis of e^L/(1-e^L); valid for smooth cones
inline Germ smooth_open_product(const LatticeCone& lc, int order) {
  Germ acc = Germ::unit(lc.ambient_dim());
  int factor_order = order + static_cast<int>(lc.dim());
  for (const auto& v : primary_generators(lc)) acc = germ_mul(acc, bernoulli_factor(v, factor_order));
  return acc;
}

}  // namespace detail

// Sum of e^<n, .> over the interior lattice points, as a germ reliable to the
// requested order: the ray-factor product on smooth cones, extended through a
// smooth subdivision by summing over the faces meeting the interior.
inline Germ exp_sum_open(const LatticeCone& lc, int order) {
  if (order < 0) throw std::invalid_argument("exp_sum_open: negative truncation order");
  if (lc.dim() == 0) return Germ::unit(lc.ambient_dim());
  if (is_smooth(lc)) return germ_truncate(detail::smooth_open_product(lc, order), order);
  Subdivision s = smooth_subdivide(lc);
  Germ acc = Germ::zero(lc.ambient_dim());
  for (const auto& f : open_faces(s)) {
    LatticeCone face = face_as_lattice_cone(f);
    if (!is_smooth(face)) throw std::logic_error("exp_sum_open: smooth subdivision produced a non-smooth face");
    acc = germ_add(acc, detail::smooth_open_product(face, order));
  }
  return germ_truncate(acc, order);
}

// Sum over all lattice points of the closed cone: the open sums of all faces.
inline Germ exp_sum_closed(const LatticeCone& lc, int order) {
  Germ acc = Germ::zero(lc.ambient_dim());
  for (const auto& f : lattice_faces(lc)) acc = germ_add(acc, exp_sum_open(face_as_lattice_cone(f), order));
  return acc;
}

// Exponential integral: (-1)^k w / (L_1 ... L_k) on simplicial cones,
// extended additively over a triangulation. Exact.
inline Germ exp_integral(const LatticeCone& lc) {
  if (lc.dim() == 0) return Germ::unit(lc.ambient_dim());
  if (is_simplicial(lc.cone())) {
    auto prim = primary_generators(lc);
    Rat coeff = index_w(lc);
    if (lc.dim() % 2 == 1) coeff = -coeff;
    Denominator den;
    for (const auto& v : prim) {
      auto [form, scale] = LinearForm::normalize(v);
      coeff /= scale;
      den[form] += 1;
    }
    return Germ{lc.ambient_dim(), {GermTerm{TruncatedSeries::constant(lc.ambient_dim(), coeff), den, {}}}};
  }
  Subdivision s = triangulate(lc);
  Germ acc = Germ::zero(lc.ambient_dim());
  for (const auto& p : s.pieces) acc = germ_add(acc, exp_integral(p));
  return acc;
}

inline ConeFunctional exp_sum_functional(SumVariant variant, int order) {
  return ConeFunctional([variant, order](const LatticeCone& lc) {
    return variant == SumVariant::open ? exp_sum_open(lc, order) : exp_sum_closed(lc, order);
  });
}

inline ConeFunctional exp_integral_functional() {
  return ConeFunctional([](const LatticeCone& lc) { return exp_integral(lc); });
}

// Interpolating factor as the holomorphic projection of the exponential sum.
inline Germ interpolator(const LatticeCone& lc, SumVariant variant, int order, const InnerProduct& q = InnerProduct()) {
  Germ s = variant == SumVariant::open ? exp_sum_open(lc, order) : exp_sum_closed(lc, order);
  return holomorphic_part(s, q);
}

// ---------------------------------------------------------------------------
// verification: Euler-Maclaurin identities per cone

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;  // witness rendering on failure, empty on success
};

struct EmReport {
  LatticeCone cone;
  int order;
  bool strongly_convex;
  bool order_insufficient = false;  // a germ comparison could not be certified
  Germ s_open, s_closed, integral;
  Germ mu_open, mu_closed;  // holomorphic projections
  Germ s1_open, s1_closed, s2_open, s2_closed;
  std::vector<Verdict> verdicts;

  EmReport(LatticeCone c, int d, size_t nvars)
      : cone(std::move(c)),
        order(d),
        strongly_convex(false),
        s_open(Germ::zero(nvars)),
        s_closed(Germ::zero(nvars)),
        integral(Germ::zero(nvars)),
        mu_open(Germ::zero(nvars)),
        mu_closed(Germ::zero(nvars)),
        s1_open(Germ::zero(nvars)),
        s1_closed(Germ::zero(nvars)),
        s2_open(Germ::zero(nvars)),
        s2_closed(Germ::zero(nvars)) {}

  bool all_pass() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }
};

namespace detail {

inline void check_eq(EmReport& report, const std::string& name, const Germ& lhs, const Germ& rhs, int order) {
  Verdict v{name, false, ""};
  try {
    v.pass = germ_eq(lhs, rhs, order);
    if (!v.pass) v.detail = germ_to_string(lhs) + "  !=  " + germ_to_string(rhs);
  } catch (const InsufficientOrderError& e) {
    report.order_insufficient = true;
    v.detail = e.what();
  }
  report.verdicts.push_back(std::move(v));
}

}  // namespace detail

// working order: enough slack for the convolution and factorization losses
inline int em_work_order(int order, const LatticeCone& lc) { return order + 2 * static_cast<int>(lc.dim()) + 2; }

inline EmReport verify_euler_maclaurin(const LatticeCone& lc, int order, const InnerProduct& q = InnerProduct()) {
  int work = em_work_order(order, lc);
  EmReport report(lc, order, lc.ambient_dim());
  report.strongly_convex = is_strongly_convex(lc.cone());

  ConeFunctional s_open_f = exp_sum_functional(SumVariant::open, work);
  ConeFunctional s_closed_f = exp_sum_functional(SumVariant::closed, work);
  ConeFunctional integral_f = exp_integral_functional();
  auto projector = [q](const Germ& g) { return holomorphic_part(g, q); };
  ConeFunctional mu_open_f([s_open_f, q](const LatticeCone& c) { return holomorphic_part(s_open_f(c), q); });
  ConeFunctional mu_closed_f([s_closed_f, q](const LatticeCone& c) { return holomorphic_part(s_closed_f(c), q); });

  BirkhoffFactors open_factors = birkhoff_factorize(s_open_f, projector, q);
  BirkhoffFactors closed_factors = birkhoff_factorize(s_closed_f, projector, q);
  ConeFunctional inv_f1_open = convolution_inverse(open_factors.f1, q);
  ConeFunctional inv_f1_closed = convolution_inverse(closed_factors.f1, q);

  report.s_open = s_open_f(lc);
  report.s_closed = s_closed_f(lc);
  report.integral = integral_f(lc);
  report.mu_open = mu_open_f(lc);
  report.mu_closed = mu_closed_f(lc);
  report.s1_open = open_factors.f1(lc);
  report.s1_closed = closed_factors.f1(lc);
  report.s2_open = open_factors.f2(lc);
  report.s2_closed = closed_factors.f2(lc);

  // Euler-Maclaurin face sums: S = sum over faces of mu(t(C,F)) I(F)
  detail::check_eq(report, "euler-maclaurin-closed", report.s_closed, convolve(mu_closed_f, integral_f, q)(lc), order);
  detail::check_eq(report, "euler-maclaurin-open", report.s_open, convolve(mu_open_f, integral_f, q)(lc), order);

  // second factor of the factorization is the exponential integral
  detail::check_eq(report, "second-factor-closed-is-integral", report.s2_closed, report.integral, order);
  detail::check_eq(report, "second-factor-open-is-integral", report.s2_open, report.integral, order);

  // factorization reconstructs the sum
  detail::check_eq(report, "birkhoff-reconstruction-closed", convolve(inv_f1_closed, closed_factors.f2, q)(lc),
                   report.s_closed, order);
  detail::check_eq(report, "birkhoff-reconstruction-open", convolve(inv_f1_open, open_factors.f2, q)(lc),
                   report.s_open, order);

  // projection formulae: the convolution inverse of the first factor is the
  // holomorphic projection of the sum
  detail::check_eq(report, "projection-formula-closed", inv_f1_closed(lc), report.mu_closed, order);
  detail::check_eq(report, "projection-formula-open", inv_f1_open(lc), report.mu_open, order);

  // open/closed bridge: equal second factors; interpolators related by the
  // face sum
  detail::check_eq(report, "second-factors-agree", report.s2_open, report.s2_closed, order);
  Germ face_sum_mu = Germ::zero(lc.ambient_dim());
  for (const auto& f : lattice_faces(lc)) face_sum_mu = germ_add(face_sum_mu, mu_open_f(face_as_lattice_cone(f)));
  detail::check_eq(report, "interpolator-face-sum", report.mu_closed, face_sum_mu, order);

  return report;
}

// ---------------------------------------------------------------------------
// verification: subdivision identities

struct SubdivisionIdentityReport {
  int order;
  bool order_insufficient = false;
  std::vector<Verdict> verdicts;

  bool all_pass() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }
};

inline SubdivisionIdentityReport verify_subdivision_identities(const Subdivision& s, int order,
                                                               const InnerProduct& q = InnerProduct()) {
  SubdivisionAnalysis analysis = analyze(s);  // validates
  const LatticeCone& parent = s.parent;
  int work = em_work_order(order, parent);
  size_t n = s.pieces.size();

  SubdivisionIdentityReport report{order, false, {}};
  EmReport scratch(parent, order, parent.ambient_dim());  // carrier for check_eq
  auto push = [&](const std::string& name, const Germ& lhs, const Germ& rhs) {
    detail::check_eq(scratch, name, lhs, rhs, order);
  };

  ConeFunctional s_open_f = exp_sum_functional(SumVariant::open, work);
  ConeFunctional s_closed_f = exp_sum_functional(SumVariant::closed, work);
  ConeFunctional integral_f = exp_integral_functional();
  auto projector = [q](const Germ& g) { return holomorphic_part(g, q); };
  BirkhoffFactors open_factors = birkhoff_factorize(s_open_f, projector, q);
  BirkhoffFactors closed_factors = birkhoff_factorize(s_closed_f, projector, q);

  // intersection lattice cones C_I, by piece subset
  std::vector<LatticeCone> by_mask;
  by_mask.reserve(size_t(1) << n);
  std::vector<Cone> mask_cone;
  for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
    if (mask == 0) {
      mask_cone.push_back(parent.cone());
      by_mask.push_back(parent);
      continue;
    }
    size_t low = mask & (mask - 1);
    size_t idx = 0;
    while (!(((mask ^ low) >> idx) & 1)) ++idx;
    Cone c = low == 0 ? s.pieces[idx].cone() : intersect(mask_cone[low], s.pieces[idx].cone());
    mask_cone.push_back(c);
    by_mask.emplace_back(c, sublattice_in_subspace(parent.lattice_basis(), span_basis(c.generators())));
  }

  // discrete closed identity, inclusion-exclusion over the piece subsets
  Germ ie_closed = Germ::zero(parent.ambient_dim());
  for (size_t mask = 1; mask < (size_t(1) << n); ++mask) {
    Rat sign = (__builtin_popcountll(mask) % 2 == 1) ? Rat(1) : Rat(-1);
    ie_closed = germ_add(ie_closed, germ_scale(sign, s_closed_f(by_mask[mask])));
  }
  Germ s_closed_parent = s_closed_f(parent);
  push("discrete-closed-sum", s_closed_parent, ie_closed);
  bool closed_holds = scratch.verdicts.back().pass;

  // collapsed multiplicity form over the distinct intersection cones
  Germ lambda_sum = Germ::zero(parent.ambient_dim());
  for (const auto& [h, l] : analysis.intersections) lambda_sum = germ_add(lambda_sum, germ_scale(l, s_closed_f(h)));
  push("multiplicity-collapsed-sum", ie_closed, lambda_sum);

  // discrete open identity over the faces meeting the interior
  Germ open_sum = Germ::zero(parent.ambient_dim());
  for (const auto& f : analysis.open_faces) open_sum = germ_add(open_sum, s_open_f(face_as_lattice_cone(f)));
  push("discrete-open-sum", s_open_f(parent), open_sum);
  bool open_holds = scratch.verdicts.back().pass;

  // continuous identity for the integral and the polar factors
  Germ integral_sum = Germ::zero(parent.ambient_dim());
  Germ s2_closed_sum = Germ::zero(parent.ambient_dim());
  Germ s2_open_sum = Germ::zero(parent.ambient_dim());
  for (const auto& p : s.pieces) {
    integral_sum = germ_add(integral_sum, integral_f(p));
    s2_closed_sum = germ_add(s2_closed_sum, closed_factors.f2(p));
    s2_open_sum = germ_add(s2_open_sum, open_factors.f2(p));
  }
  push("continuous-integral", integral_f(parent), integral_sum);
  push("continuous-second-factor-closed", closed_factors.f2(parent), s2_closed_sum);
  push("continuous-second-factor-open", open_factors.f2(parent), s2_open_sum);

  // closure bridge: the closed identity for the closure of the open sum holds
  // exactly when the open identity holds (both are expected true)
  scratch.verdicts.push_back(
      Verdict{"closure-bridge", closed_holds == open_holds && closed_holds, closed_holds == open_holds ? "" : "mismatch"});

  report.verdicts = std::move(scratch.verdicts);
  report.order_insufficient = scratch.order_insufficient;
  return report;
}

// ---------------------------------------------------------------------------
// numeric oracle

// Closed-form description of the closed lattice-point sum: for every face,
// the ray-factor products over the open faces of its smooth subdivision.
inline ExpClosedForm closed_lattice_sum_form(const LatticeCone& lc) {
  ExpClosedForm form;
  for (const auto& face : lattice_faces(lc)) {
    LatticeCone face_lc = face_as_lattice_cone(face);
    if (face_lc.dim() == 0) {
      form.push_back(ExpProductTerm{Rat(1), {}});
      continue;
    }
    Subdivision s = smooth_subdivide(face_lc);
    for (const auto& g : open_faces(s)) form.push_back(ExpProductTerm{Rat(1), primary_generators(face_as_lattice_cone(g))});
  }
  return form;
}

// Relative error between the truncated direct lattice sum (coefficient box
// 1..cutoff in the smooth monoid bases) and the closed-form evaluation at the
// sample point. The point must be strictly negative on the generators.
inline double numeric_crosscheck(const LatticeCone& lc, const std::vector<double>& point, int cutoff) {
  if (!is_strongly_convex(lc.cone())) throw std::invalid_argument("numeric_crosscheck: cone must be pointed");
  if (point.size() != lc.ambient_dim()) throw std::invalid_argument("numeric_crosscheck: dimension mismatch");
  for (const auto& g : lc.cone().generators()) {
    double pairing = 0;
    for (size_t i = 0; i < point.size(); ++i) pairing += rat_to_double(g[i]) * point[i];
    if (!(pairing < 0)) throw std::invalid_argument("numeric_crosscheck: sample point not in the negative dual chamber");
  }
  ExpClosedForm closed_form = closed_lattice_sum_form(lc);
  double closed_value = eval_numeric(closed_form, point);

  double direct = 0;
  for (const auto& term : closed_form) {
    size_t m = term.exponents.size();
    if (m == 0) {
      direct += rat_to_double(term.coeff);
      continue;
    }
    std::vector<double> pairings(m, 0.0);
    for (size_t j = 0; j < m; ++j)
      for (size_t i = 0; i < point.size(); ++i) pairings[j] += rat_to_double(term.exponents[j][i]) * point[i];
    std::vector<int> idx(m, 1);
    while (true) {
      double expo = 0;
      for (size_t j = 0; j < m; ++j) expo += idx[j] * pairings[j];
      direct += rat_to_double(term.coeff) * std::exp(expo);
      size_t j = 0;
      for (; j < m; ++j) {
        if (++idx[j] <= cutoff) break;
        idx[j] = 1;
      }
      if (j == m) break;
    }
  }
  double denom = std::abs(closed_value);
  if (denom < 1e-300) denom = 1e-300;
  return std::abs(direct - closed_value) / denom;
}

}  // namespace conical
