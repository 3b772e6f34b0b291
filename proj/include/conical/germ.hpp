#pragma once

// Truncated multivariate meromorphic germs with linear poles: exact truncated
// power series, germs as sums of series/linear-form-product fractions, the
// Bernoulli building block e^L/(1-e^L), multiplication, equality through a
// common denominator, and the inner-product-dependent split into holomorphic
// and polar parts.
//
// Every series carries the total degree up to which its coefficients are
// reliable; operations propagate the tightest sound order and equality checks
// refuse to certify beyond it.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "conical/linalg.hpp"

namespace conical {

constexpr int kExactOrder = 1 << 24;  // sentinel for exact polynomials

inline int clamp_order(long v) {
  if (v >= kExactOrder) return kExactOrder;
  if (v < 0) return 0;
  return static_cast<int>(v);
}

class InsufficientOrderError : public std::runtime_error {
 public:
  explicit InsufficientOrderError(const std::string& what) : std::runtime_error(what) {}
};

using Mono = std::vector<int>;

inline int mono_degree(const Mono& m) { return std::accumulate(m.begin(), m.end(), 0); }

struct GrlexLess {
  bool operator()(const Mono& a, const Mono& b) const {
    int da = mono_degree(a), db = mono_degree(b);
    if (da != db) return da < db;
    return a < b;
  }
};

// ---------------------------------------------------------------------------
// TruncatedSeries. Exponent vectors are packed into one word (total degree in
// the top byte, one byte per variable after it), so the graded-lex order is
// plain integer comparison and monomial products are integer sums. This caps
// the arity at 7 variables and all degrees at 255, ample at desk scale.

using PackedMono = uint64_t;
constexpr size_t kMaxSeriesVars = 7;

class TruncatedSeries {
 public:
  TruncatedSeries(size_t nvars, int order) : nvars_(nvars), order_(order) {
    if (nvars > kMaxSeriesVars) throw std::invalid_argument("TruncatedSeries: more than 7 variables");
  }

  static TruncatedSeries zero(size_t nvars, int order = kExactOrder) { return TruncatedSeries(nvars, order); }

  static TruncatedSeries constant(size_t nvars, const Rat& c, int order = kExactOrder) {
    TruncatedSeries s(nvars, order);
    if (c != 0) s.coeffs_.emplace(0, c);
    return s;
  }

  static TruncatedSeries linear_form(const RatVec& v, int order = kExactOrder) {
    TruncatedSeries s(v.size(), order);
    for (size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) s.coeffs_.emplace(unit_key(i), v[i]);
    return s;
  }

  static PackedMono pack(const Mono& m) {
    PackedMono key = 0;
    int degree = 0;
    for (size_t i = 0; i < m.size(); ++i) {
      if (m[i] < 0 || m[i] > 255) throw std::invalid_argument("TruncatedSeries: exponent out of byte range");
      degree += m[i];
      key |= static_cast<PackedMono>(m[i]) << (8 * (kMaxSeriesVars - 1 - i));
    }
    if (degree > 255) throw std::invalid_argument("TruncatedSeries: total degree out of byte range");
    return key | (static_cast<PackedMono>(degree) << 56);
  }

  Mono unpack(PackedMono key) const {
    Mono m(nvars_);
    for (size_t i = 0; i < nvars_; ++i) m[i] = static_cast<int>((key >> (8 * (kMaxSeriesVars - 1 - i))) & 0xff);
    return m;
  }

  static int key_degree(PackedMono key) { return static_cast<int>(key >> 56); }
  static int key_exponent(PackedMono key, size_t var) {
    return static_cast<int>((key >> (8 * (kMaxSeriesVars - 1 - var))) & 0xff);
  }
  static PackedMono unit_key(size_t var) {
    return (PackedMono(1) << 56) | (PackedMono(1) << (8 * (kMaxSeriesVars - 1 - var)));
  }

  size_t nvars() const { return nvars_; }
  int order() const { return order_; }
  const std::map<PackedMono, Rat>& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  template <typename F>
  void for_each(F&& f) const {
    for (const auto& [k, c] : coeffs_) f(unpack(k), c);
  }

  Rat coefficient(const Mono& m) const {
    auto it = coeffs_.find(pack(m));
    return it == coeffs_.end() ? Rat(0) : it->second;
  }

  int valuation() const { return coeffs_.empty() ? kExactOrder : key_degree(coeffs_.begin()->first); }

  void add_coefficient(const Mono& m, const Rat& c) { add_packed(pack(m), c); }

  void add_packed(PackedMono key, const Rat& c) {
    if (key_degree(key) > order_) return;
    auto it = coeffs_.find(key);
    if (it == coeffs_.end()) {
      if (c != 0) coeffs_.emplace(key, c);
    } else {
      it->second += c;
      if (it->second == 0) coeffs_.erase(it);
    }
  }

  TruncatedSeries truncated(int order) const {
    TruncatedSeries s(nvars_, std::min(order_, order));
    if (s.order_ >= 255) {
      s.coeffs_ = coeffs_;
      return s;
    }
    PackedMono limit = (static_cast<PackedMono>(s.order_) + 1) << 56;
    s.coeffs_.insert(coeffs_.begin(), coeffs_.lower_bound(limit));
    return s;
  }

 private:
  size_t nvars_;
  int order_;
  std::map<PackedMono, Rat> coeffs_;
};

inline TruncatedSeries series_add(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.nvars() != b.nvars()) throw std::invalid_argument("series_add: arity mismatch");
  TruncatedSeries s(a.nvars(), std::min(a.order(), b.order()));
  for (const auto& [k, c] : a.coefficients()) s.add_packed(k, c);
  for (const auto& [k, c] : b.coefficients()) s.add_packed(k, c);
  return s;
}

inline TruncatedSeries series_scale(const Rat& c, const TruncatedSeries& a) {
  TruncatedSeries s(a.nvars(), a.order());
  if (c == 0) return s;
  for (const auto& [k, v] : a.coefficients()) s.add_packed(k, c * v);
  return s;
}

inline TruncatedSeries series_sub(const TruncatedSeries& a, const TruncatedSeries& b) {
  return series_add(a, series_scale(Rat(-1), b));
}

// Product; the result order is min(order_a + val_b, order_b + val_a), the
// tightest degree through which all contributing pairs are stored.
inline TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.nvars() != b.nvars()) throw std::invalid_argument("series_mul: arity mismatch");
  int order = std::min(clamp_order(static_cast<long>(a.order()) + b.valuation()),
                       clamp_order(static_cast<long>(b.order()) + a.valuation()));
  TruncatedSeries s(a.nvars(), order);
  for (const auto& [ka, ca] : a.coefficients()) {
    int da = TruncatedSeries::key_degree(ka);
    if (da > order) break;
    for (const auto& [kb, cb] : b.coefficients()) {
      if (da + TruncatedSeries::key_degree(kb) > order) break;
      s.add_packed(ka + kb, ca * cb);
    }
  }
  return s;
}

inline TruncatedSeries series_pow(const TruncatedSeries& a, int e) {
  TruncatedSeries acc = TruncatedSeries::constant(a.nvars(), 1);
  TruncatedSeries base = a;
  while (e > 0) {
    if (e & 1) acc = series_mul(acc, base);
    base = series_mul(base, base);
    e >>= 1;
  }
  return acc;
}

// Substitute variable i by subs[i] (typically linear forms); exactness
// follows the input order. Horner evaluation variable by variable keeps every
// multiplication against a bare substitution polynomial.
namespace substitute_detail {

inline TruncatedSeries run(const std::map<PackedMono, Rat>& coeffs, size_t var,
                           const std::vector<TruncatedSeries>& subs, size_t out_vars, int order) {
  if (coeffs.empty()) return TruncatedSeries::zero(out_vars, order);
  if (var == subs.size()) {
    // every variable processed: only the constant key remains
    TruncatedSeries s = TruncatedSeries::zero(out_vars, order);
    for (const auto& [k, c] : coeffs) s.add_packed(0, c);
    return s;
  }
  // group by the exponent of this variable
  std::map<int, std::map<PackedMono, Rat>> layers;
  for (const auto& [k, c] : coeffs) {
    int d = TruncatedSeries::key_exponent(k, var);
    PackedMono rest = k - (static_cast<PackedMono>(d) << (8 * (kMaxSeriesVars - 1 - var))) -
                      (static_cast<PackedMono>(d) << 56);
    layers[d].emplace(rest, c);
  }
  int top = layers.rbegin()->first;
  TruncatedSeries acc = TruncatedSeries::zero(out_vars, order);
  for (int d = top; d >= 0; --d) {
    if (d != top) acc = series_mul(acc, subs[var]).truncated(order);
    auto it = layers.find(d);
    if (it != layers.end()) acc = series_add(acc, run(it->second, var + 1, subs, out_vars, order));
  }
  return acc;
}

}  // namespace substitute_detail

inline TruncatedSeries series_substitute(const TruncatedSeries& a, const std::vector<TruncatedSeries>& subs) {
  if (subs.size() != a.nvars()) throw std::invalid_argument("series_substitute: arity mismatch");
  size_t out_vars = subs.empty() ? 0 : subs[0].nvars();
  return substitute_detail::run(a.coefficients(), 0, subs, out_vars, a.order());
}

// Compose a one-variable series sum c_n t^n with a linear form.
inline TruncatedSeries compose_with_form(const std::vector<Rat>& coeffs_1d, const RatVec& form, int order) {
  TruncatedSeries out = TruncatedSeries::zero(form.size(), order);
  TruncatedSeries ell = TruncatedSeries::linear_form(form).truncated(order);
  TruncatedSeries p = TruncatedSeries::constant(form.size(), 1, order);
  for (size_t n = 0; n < coeffs_1d.size() && static_cast<int>(n) <= order; ++n) {
    if (coeffs_1d[n] != 0) out = series_add(out, series_scale(coeffs_1d[n], p));
    p = series_mul(p, ell).truncated(order);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bernoulli numbers, from sum_{j<=m} C(m+1,j) B_j = 0 with B_0 = 1.

inline std::vector<Rat> bernoulli_numbers(int upto) {
  if (upto < 0) throw std::invalid_argument("bernoulli_numbers: negative order");
  std::vector<Rat> b(static_cast<size_t>(upto) + 1);
  b[0] = 1;
  std::vector<std::vector<Rat>> choose(static_cast<size_t>(upto) + 2);
  for (size_t n = 0; n < choose.size(); ++n) {
    choose[n].resize(n + 1);
    choose[n][0] = 1;
    for (size_t k = 1; k <= n; ++k) choose[n][k] = (k == n ? Rat(1) : choose[n - 1][k - 1] + choose[n - 1][k]);
  }
  for (int m = 1; m <= upto; ++m) {
    Rat acc = 0;
    for (int j = 0; j < m; ++j) acc += choose[static_cast<size_t>(m) + 1][static_cast<size_t>(j)] * b[static_cast<size_t>(j)];
    b[static_cast<size_t>(m)] = -acc / choose[static_cast<size_t>(m) + 1][static_cast<size_t>(m)];
  }
  return b;
}

// Taylor coefficients of t/(e^t - 1): B_n / n!.
inline std::vector<Rat> todd_series_coefficients(int upto) {
  std::vector<Rat> b = bernoulli_numbers(upto);
  Rat factorial = 1;
  for (int n = 0; n <= upto; ++n) {
    if (n > 0) factorial *= n;
    b[static_cast<size_t>(n)] /= factorial;
  }
  return b;
}

// ---------------------------------------------------------------------------
// LinearForm: primitive normalization of a rational covector.

class LinearForm {
 public:
  // v = scale * primitive with integer coprime entries, first nonzero positive
  static std::pair<LinearForm, Rat> normalize(const RatVec& v) {
    if (is_zero(v)) throw std::invalid_argument("LinearForm: zero vector");
    RatVec prim = primitive_direction(v);
    Rat scale = 1;
    for (size_t i = 0; i < v.size(); ++i)
      if (prim[i] != 0) {
        scale = v[i] / prim[i];
        break;
      }
    size_t first = 0;
    while (prim[first] == 0) ++first;
    if (prim[first] < 0) {
      prim = vec_scale(Rat(-1), prim);
      scale = -scale;
    }
    LinearForm f;
    f.v_ = std::move(prim);
    return {f, scale};
  }

  const RatVec& vector() const { return v_; }
  size_t nvars() const { return v_.size(); }

  bool operator<(const LinearForm& o) const { return lex_less(v_, o.v_); }
  bool operator==(const LinearForm& o) const { return v_ == o.v_; }

 private:
  LinearForm() = default;
  RatVec v_;
};

using Denominator = std::map<LinearForm, int>;  // primitive form -> power

inline int denominator_degree(const Denominator& d) {
  int s = 0;
  for (const auto& [f, p] : d) s += p;
  return s;
}

// ---------------------------------------------------------------------------
// Germ

struct GermTerm {
  TruncatedSeries num;
  Denominator den;
  std::vector<RatVec> polar_support;  // certificate: numerator built from these forms (polar terms)

  int reliable_order() const { return clamp_order(static_cast<long>(num.order()) - denominator_degree(den)); }
};

struct Germ {
  size_t nvars = 0;
  std::vector<GermTerm> terms;

  static Germ zero(size_t nvars) { return Germ{nvars, {}}; }
  static Germ unit(size_t nvars) {
    return Germ{nvars, {GermTerm{TruncatedSeries::constant(nvars, 1), {}, {}}}};
  }
  static Germ from_series(TruncatedSeries s) {
    size_t n = s.nvars();
    if (s.is_zero()) return zero(n);
    return Germ{n, {GermTerm{std::move(s), {}, {}}}};
  }

  int reliable_order() const {
    int r = kExactOrder;
    for (const auto& t : terms) r = std::min(r, t.reliable_order());
    return r;
  }
  bool has_no_terms() const { return terms.empty(); }
};

inline bool denominator_forms_independent(const GermTerm& t) {
  std::vector<RatVec> forms;
  for (const auto& [f, p] : t.den) forms.push_back(f.vector());
  return span_basis(forms).size() == forms.size();
}

// Merge terms with identical denominators; drop terms with zero numerators.
inline Germ germ_normalize(Germ g) {
  std::map<Denominator, GermTerm> merged;
  for (auto& t : g.terms) {
    auto it = merged.find(t.den);
    if (it == merged.end()) {
      merged.emplace(t.den, std::move(t));
    } else {
      it->second.num = series_add(it->second.num, t.num);
      for (const auto& v : t.polar_support) it->second.polar_support.push_back(v);
    }
  }
  Germ out = Germ::zero(g.nvars);
  for (auto& [d, t] : merged) {
    if (t.num.is_zero()) continue;
    std::sort(t.polar_support.begin(), t.polar_support.end(), lex_less);
    t.polar_support.erase(std::unique(t.polar_support.begin(), t.polar_support.end()), t.polar_support.end());
    out.terms.push_back(std::move(t));
  }
  return out;
}

inline Germ germ_add(const Germ& a, const Germ& b) {
  if (a.nvars != b.nvars) throw std::invalid_argument("germ_add: arity mismatch");
  Germ g = a;
  for (const auto& t : b.terms) g.terms.push_back(t);
  return germ_normalize(std::move(g));
}

inline Germ germ_scale(const Rat& c, const Germ& a) {
  Germ g = Germ::zero(a.nvars);
  if (c == 0) return g;
  for (const auto& t : a.terms) g.terms.push_back(GermTerm{series_scale(c, t.num), t.den, t.polar_support});
  return g;
}

// Truncate so the germ is reliable to exactly the given order.
inline Germ germ_truncate(const Germ& g, int order) {
  Germ out = Germ::zero(g.nvars);
  for (const auto& t : g.terms) {
    GermTerm nt{t.num.truncated(clamp_order(static_cast<long>(order) + denominator_degree(t.den))), t.den,
                t.polar_support};
    if (!nt.num.is_zero()) out.terms.push_back(std::move(nt));
  }
  return out;
}

inline Germ germ_mul(const Germ& a, const Germ& b) {
  if (a.nvars != b.nvars) throw std::invalid_argument("germ_mul: arity mismatch");
  Germ g = Germ::zero(a.nvars);
  for (const auto& s : a.terms)
    for (const auto& t : b.terms) {
      Denominator den = s.den;
      for (const auto& [f, p] : t.den) den[f] += p;
      g.terms.push_back(GermTerm{series_mul(s.num, t.num), std::move(den), {}});
    }
  return germ_normalize(std::move(g));
}

// The germ of e^L / (1 - e^L) for the linear form L = <v, .>, one term with
// denominator L: (-T(L) - L) / L with T the Bernoulli generating series
// t/(e^t-1). Reliable to the requested order.
inline Germ bernoulli_factor(const RatVec& v, int order) {
  auto [form, scale] = LinearForm::normalize(v);
  std::vector<Rat> todd = todd_series_coefficients(order + 1);
  std::vector<Rat> coeffs(todd.size());
  for (size_t i = 0; i < todd.size(); ++i) coeffs[i] = -todd[i];
  if (coeffs.size() > 1) coeffs[1] -= 1;  // subtract the bare L
  TruncatedSeries num = compose_with_form(coeffs, v, order + 1);
  num = series_scale(1 / scale, num);
  GermTerm term{std::move(num), Denominator{{form, 1}}, {}};
  return germ_normalize(Germ{v.size(), {std::move(term)}});
}

// ---------------------------------------------------------------------------
// Equality through a common denominator. Requires both sides reliable to the
// requested order and refuses otherwise.

inline bool germ_eq(const Germ& a, const Germ& b, int order) {
  if (a.nvars != b.nvars) throw std::invalid_argument("germ_eq: arity mismatch");
  Germ diff = germ_add(a, germ_scale(Rat(-1), b));
  if (diff.has_no_terms()) return true;
  if (diff.reliable_order() < order)
    throw InsufficientOrderError("germ_eq: reliable order " + std::to_string(diff.reliable_order()) +
                                 " below requested order " + std::to_string(order));
  std::map<LinearForm, int> max_pow;
  for (const auto& t : diff.terms)
    for (const auto& [f, p] : t.den) max_pow[f] = std::max(max_pow[f], p);
  int lcm_degree = 0;
  for (const auto& [f, p] : max_pow) lcm_degree += p;
  TruncatedSeries acc = TruncatedSeries::zero(diff.nvars, order + lcm_degree);
  for (const auto& t : diff.terms) {
    TruncatedSeries mult = TruncatedSeries::constant(diff.nvars, 1);
    for (const auto& [f, p] : max_pow) {
      int have = 0;
      auto it = t.den.find(f);
      if (it != t.den.end()) have = it->second;
      if (p - have > 0) mult = series_mul(mult, series_pow(TruncatedSeries::linear_form(f.vector()), p - have));
    }
    acc = series_add(acc, series_mul(t.num, mult).truncated(order + lcm_degree));
  }
  return acc.is_zero();
}

inline bool germ_is_zero(const Germ& g, int order) { return germ_eq(g, Germ::zero(g.nvars), order); }

// ---------------------------------------------------------------------------
// Polar decomposition along an inner product (the holomorphic / polar split).

struct GermSplit {
  TruncatedSeries holomorphic;
  Germ polar;
};

namespace detail {

struct SplitAccum {
  TruncatedSeries holo;
  std::map<Denominator, GermTerm> polar;
  size_t nvars;
  int num_order;
  std::map<RatVec, std::vector<TruncatedSeries>> pow_cache;  // powers of linear forms

  SplitAccum(size_t nvars_, int holo_order, int num_order_)
      : holo(TruncatedSeries::zero(nvars_, holo_order)), nvars(nvars_), num_order(num_order_) {}

  const TruncatedSeries& power_of(const RatVec& v, int p) {
    auto& powers = pow_cache[v];
    if (powers.empty()) powers.push_back(TruncatedSeries::constant(nvars, 1));
    while (static_cast<int>(powers.size()) <= p)
      powers.push_back(series_mul(powers.back(), TruncatedSeries::linear_form(v)).truncated(num_order));
    return powers[static_cast<size_t>(p)];
  }

  void add_holo(const TruncatedSeries& s) { holo = series_add(holo, s.truncated(holo.order())); }

  void add_polar_series(const Denominator& den, const TruncatedSeries& num, const std::vector<RatVec>& supports) {
    if (num.is_zero()) return;
    auto it = polar.find(den);
    if (it == polar.end()) {
      GermTerm t{num, den, supports};
      polar.emplace(den, std::move(t));
    } else {
      it->second.num = series_add(it->second.num, num);
      for (const auto& v : supports) it->second.polar_support.push_back(v);
    }
  }

};

}  // namespace detail

// Splits a germ into a holomorphic series and a sum of canonical polar terms
// (numerators generated by forms q-orthogonal to their denominator forms).
// Terms with dependent denominator forms are rejected.
//
// Each work item rewrites its numerator in coordinates adapted to its
// denominator span, cancels, and buckets the monomials by residual
// denominator. Buckets that still carry uncancelled denominator-form factors
// against a smaller residual are re-queued as derived terms; their
// denominators strictly shrink, so the loop terminates.
inline GermSplit polar_decompose(const Germ& g, const InnerProduct& q = InnerProduct()) {
  int reliable = g.reliable_order();
  detail::SplitAccum acc(g.nvars, reliable, reliable);
  std::vector<GermTerm> queue = g.terms;
  for (const auto& term : queue)
    if (!denominator_forms_independent(term))
      throw std::invalid_argument("polar_decompose: dependent denominator forms in a term");

  while (!queue.empty()) {
    GermTerm term = std::move(queue.back());
    queue.pop_back();
    if (term.den.empty()) {
      acc.add_holo(term.num);
      continue;
    }
    std::vector<RatVec> den_forms;
    std::vector<LinearForm> den_order;
    for (const auto& [f, p] : term.den) {
      den_forms.push_back(f.vector());
      den_order.push_back(f);
    }
    std::vector<RatVec> orth_basis = orthogonal_complement_basis(den_forms, g.nvars, q);
    std::vector<RatVec> full = den_forms;
    for (const auto& m : orth_basis) full.push_back(m);
    if (full.size() != g.nvars || span_basis(full).size() != g.nvars)
      throw std::logic_error("polar_decompose: adapted basis construction failed");
    // substitution: coordinate form e_i written in the adapted basis
    RatMat cols(g.nvars, RatVec(g.nvars));
    for (size_t j = 0; j < g.nvars; ++j)
      for (size_t i = 0; i < g.nvars; ++i) cols[i][j] = full[j][i];
    std::vector<TruncatedSeries> subs;
    for (size_t i = 0; i < g.nvars; ++i) {
      RatVec e(g.nvars, Rat(0));
      e[i] = 1;
      auto coords = solve_rational(cols, e);
      if (!coords) throw std::logic_error("polar_decompose: adapted basis not invertible");
      subs.push_back(TruncatedSeries::linear_form(*coords));
    }
    // work at the order needed for this term's own reliability
    acc.num_order = clamp_order(static_cast<long>(reliable) + denominator_degree(term.den));
    TruncatedSeries adapted = series_substitute(term.num.truncated(acc.num_order), subs);

    std::map<PackedMono, Rat> holo_bucket;
    std::map<Denominator, std::map<PackedMono, Rat>> polar_buckets;   // fully orthogonal numerators
    std::map<Denominator, std::map<PackedMono, Rat>> derived_buckets;  // leftover denominator factors
    for (const auto& [key, c] : adapted.coefficients()) {
      Mono m = adapted.unpack(key);
      Denominator residual = term.den;
      Mono stripped = m;
      bool leftover_l = false;
      for (size_t i = 0; i < den_forms.size(); ++i) {
        if (m[i] == 0) continue;
        auto it = residual.find(den_order[i]);
        int have = it->second;
        if (m[i] >= have) {
          residual.erase(it);
          stripped[i] = m[i] - have;
          if (stripped[i] > 0) leftover_l = true;
        } else {
          it->second = have - m[i];
          stripped[i] = 0;
        }
      }
      if (residual.empty())
        holo_bucket[TruncatedSeries::pack(stripped)] += c;
      else if (!leftover_l)
        polar_buckets[residual][TruncatedSeries::pack(stripped)] += c;
      else
        derived_buckets[residual][TruncatedSeries::pack(stripped)] += c;
    }
    std::vector<TruncatedSeries> back_subs;
    for (size_t j = 0; j < g.nvars; ++j) back_subs.push_back(TruncatedSeries::linear_form(full[j]));
    auto bucket_series = [&](const std::map<PackedMono, Rat>& bucket) {
      TruncatedSeries ts = TruncatedSeries::zero(g.nvars, acc.num_order);
      for (const auto& [k, c] : bucket) ts.add_packed(k, c);
      return series_substitute(ts, back_subs);
    };
    if (!holo_bucket.empty()) acc.add_holo(bucket_series(holo_bucket));
    for (const auto& [den, bucket] : polar_buckets) {
      std::vector<RatVec> supports;
      std::set<size_t> used;
      for (const auto& [k, c] : bucket)
        for (size_t j = den_forms.size(); j < g.nvars; ++j)
          if (TruncatedSeries::key_exponent(k, j) > 0) used.insert(j);
      for (size_t j : used) supports.push_back(primitive_direction(full[j]));
      acc.add_polar_series(den, bucket_series(bucket), supports);
    }
    for (const auto& [den, bucket] : derived_buckets) {
      TruncatedSeries num = bucket_series(bucket);
      if (!num.is_zero()) queue.push_back(GermTerm{std::move(num), den, {}});
    }
  }
  GermSplit out{acc.holo.truncated(reliable), Germ::zero(g.nvars)};
  for (auto& [d, t] : acc.polar) {
    if (t.num.is_zero()) continue;
    std::sort(t.polar_support.begin(), t.polar_support.end(), lex_less);
    t.polar_support.erase(std::unique(t.polar_support.begin(), t.polar_support.end()), t.polar_support.end());
    t.num = t.num.truncated(clamp_order(static_cast<long>(reliable) + denominator_degree(d)));
    out.polar.terms.push_back(std::move(t));
  }
  return out;
}

// pi_+ : holomorphic projection, as a germ
inline Germ holomorphic_part(const Germ& g, const InnerProduct& q = InnerProduct()) {
  return Germ::from_series(polar_decompose(g, q).holomorphic);
}

// pi_- : projection onto the span of polar germs
inline Germ polar_part(const Germ& g, const InnerProduct& q = InnerProduct()) {
  return polar_decompose(g, q).polar;
}

// ---------------------------------------------------------------------------
// Numeric oracle: closed forms as rational combinations of products of
// exponential ray factors e^<v,x> / (1 - e^<v,x>).

struct ExpProductTerm {
  Rat coeff;
  std::vector<RatVec> exponents;
};

using ExpClosedForm = std::vector<ExpProductTerm>;

inline double eval_numeric(const ExpClosedForm& f, const std::vector<double>& point) {
  double total = 0;
  for (const auto& term : f) {
    double prod = rat_to_double(term.coeff);
    for (const auto& v : term.exponents) {
      if (v.size() != point.size()) throw std::invalid_argument("eval_numeric: dimension mismatch");
      double pairing = 0;
      for (size_t i = 0; i < v.size(); ++i) pairing += rat_to_double(v[i]) * point[i];
      double denom = 1.0 - std::exp(pairing);
      if (std::abs(denom) < 1e-12) throw std::domain_error("eval_numeric: evaluation at a pole");
      prod *= std::exp(pairing) / denom;
    }
    total += prod;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Rendering: terms sorted by descending denominator degree, then denominator;
// series monomials by total degree then lexicographic exponent; rationals as
// p/q; variables x1..xk.

inline std::string mono_to_string(const Mono& m) {
  std::string s;
  for (size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (m[i] > 1) s += "^" + std::to_string(m[i]);
  }
  return s;
}

inline std::string series_to_string(const TruncatedSeries& s) {
  if (s.is_zero()) return "0";
  std::string out;
  bool first = true;
  s.for_each([&](const Mono& m, const Rat& c) {
    Rat a = rat_abs(c);
    std::string mono = mono_to_string(m);
    std::string piece = rat_to_string(a);
    if (!mono.empty()) piece = (a == 1 ? "" : piece + "*") + mono;
    if (first) {
      out += (c < 0 ? "-" : "") + piece;
      first = false;
    } else {
      out += (c < 0 ? " - " : " + ") + piece;
    }
  });
  return out;
}

inline std::string form_to_string(const RatVec& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    Rat a = rat_abs(v[i]);
    std::string piece = (a == 1 ? "" : rat_to_string(a) + "*") + "x" + std::to_string(i + 1);
    if (s.empty())
      s += (v[i] < 0 ? "-" : "") + piece;
    else
      s += (v[i] < 0 ? "-" : "+") + piece;
  }
  return s.empty() ? "0" : s;
}

inline std::string denominator_to_string(const Denominator& d) {
  std::string s;
  size_t factors = 0;
  for (const auto& [f, p] : d) {
    if (!s.empty()) s += "*";
    s += "(" + form_to_string(f.vector()) + ")";
    if (p > 1) s += "^" + std::to_string(p);
    factors += static_cast<size_t>(p);
  }
  return factors > 1 ? "(" + s + ")" : s;
}

inline std::string germ_to_string(const Germ& g) {
  if (g.terms.empty()) return "0";
  std::vector<const GermTerm*> order;
  for (const auto& t : g.terms) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const GermTerm* a, const GermTerm* b) {
    int da = denominator_degree(a->den), db = denominator_degree(b->den);
    if (da != db) return da > db;
    return a->den < b->den;
  });
  std::string out;
  for (const GermTerm* t : order) {
    std::string num = series_to_string(t->num);
    std::string piece;
    if (t->den.empty()) {
      piece = num;
    } else if (t->num.coefficients().size() == 1 && num.find(' ') == std::string::npos) {
      piece = num + "/" + denominator_to_string(t->den);
    } else {
      piece = "(" + num + ")/" + denominator_to_string(t->den);
    }
    if (out.empty()) {
      out = piece;
    } else if (!piece.empty() && piece[0] == '-') {
      out += " - " + piece.substr(1);
    } else {
      out += " + " + piece;
    }
  }
  return out;
}

}  // namespace conical
