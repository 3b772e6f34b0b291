#pragma once

// Exact rational vectors and matrices, integer normal forms (HNF), lattice
// kernels and inner-product-orthogonal projections. All operations are pure;
// values are immutable once built.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "conical/rational.hpp"

namespace conical {

using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;  // row-major, rectangular
using IntVec = std::vector<Int>;
using IntMat = std::vector<IntVec>;

// ---------------------------------------------------------------------------
// vector ops

inline bool is_zero(const RatVec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

inline RatVec vec_add(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec_add: dimension mismatch");
  RatVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline RatVec vec_sub(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec_sub: dimension mismatch");
  RatVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline RatVec vec_scale(const Rat& c, const RatVec& v) {
  RatVec r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = c * v[i];
  return r;
}

// standard dot product
inline Rat dot(const RatVec& a, const RatVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  Rat s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline bool lex_less(const RatVec& a, const RatVec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline std::string vec_to_string(const RatVec& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += rat_to_string(v[i]);
  }
  return s + ")";
}

// Shortest positive rescaling with coprime integer entries; direction kept.
// Zero vector maps to itself.
inline RatVec primitive_direction(const RatVec& v) {
  Int den_lcm = 1;
  for (const auto& x : v) {
    Int d = x.get_den();
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), d.get_mpz_t());
  }
  Int num_gcd = 0;
  for (const auto& x : v) {
    Int n = x.get_num() * (den_lcm / x.get_den());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), n.get_mpz_t());
  }
  if (num_gcd == 0) return v;  // zero vector
  Rat scale(den_lcm, num_gcd);
  scale.canonicalize();
  return vec_scale(scale, v);
}

// ---------------------------------------------------------------------------
// matrix ops

inline size_t mat_rows(const RatMat& m) { return m.size(); }
inline size_t mat_cols(const RatMat& m) { return m.empty() ? 0 : m[0].size(); }

inline void check_rectangular(const RatMat& m) {
  for (const auto& row : m)
    if (row.size() != mat_cols(m)) throw std::invalid_argument("matrix not rectangular");
}

inline RatMat mat_identity(size_t n) {
  RatMat m(n, RatVec(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline RatMat mat_transpose(const RatMat& m) {
  RatMat t(mat_cols(m), RatVec(mat_rows(m)));
  for (size_t i = 0; i < mat_rows(m); ++i)
    for (size_t j = 0; j < mat_cols(m); ++j) t[j][i] = m[i][j];
  return t;
}

inline RatVec mat_apply(const RatMat& m, const RatVec& v) {
  if (mat_cols(m) != v.size()) throw std::invalid_argument("mat_apply: dimension mismatch");
  RatVec r(mat_rows(m), Rat(0));
  for (size_t i = 0; i < mat_rows(m); ++i) r[i] = dot(m[i], v);
  return r;
}

inline RatMat mat_mul(const RatMat& a, const RatMat& b) {
  if (mat_cols(a) != mat_rows(b)) throw std::invalid_argument("mat_mul: dimension mismatch");
  RatMat r(mat_rows(a), RatVec(mat_cols(b), Rat(0)));
  for (size_t i = 0; i < mat_rows(a); ++i)
    for (size_t k = 0; k < mat_cols(a); ++k) {
      if (a[i][k] == 0) continue;
      for (size_t j = 0; j < mat_cols(b); ++j) r[i][j] += a[i][k] * b[k][j];
    }
  return r;
}

// Row echelon reduction in place; returns pivot columns. Full reduction
// (entries above pivots cleared, pivots normalized to 1).
inline std::vector<size_t> rref(RatMat& m) {
  std::vector<size_t> pivots;
  size_t r = 0;
  for (size_t c = 0; c < mat_cols(m) && r < mat_rows(m); ++c) {
    size_t p = r;
    while (p < mat_rows(m) && m[p][c] == 0) ++p;
    if (p == mat_rows(m)) continue;
    std::swap(m[p], m[r]);
    Rat inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (size_t i = 0; i < mat_rows(m); ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rat f = m[i][c];
      for (size_t j = 0; j < mat_cols(m); ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline size_t mat_rank(RatMat m) { return rref(m).size(); }

inline Rat mat_det(RatMat m) {
  size_t n = mat_rows(m);
  if (n != mat_cols(m)) throw std::invalid_argument("mat_det: not square");
  Rat det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return Rat(0);
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    Rat inv = 1 / m[c][c];
    for (size_t i = c + 1; i < n; ++i) {
      if (m[i][c] == 0) continue;
      Rat f = m[i][c] * inv;
      for (size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

// Basis of {x : m x = 0} over the rationals, from the free columns of the
// reduced echelon form. Deterministic.
inline std::vector<RatVec> rational_kernel(const RatMat& m_in) {
  size_t n = mat_cols(m_in);
  RatMat m = m_in;
  std::vector<size_t> pivots = rref(m);
  std::vector<bool> is_pivot(n, false);
  for (size_t c : pivots) is_pivot[c] = true;
  std::vector<RatVec> basis;
  for (size_t c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    RatVec v(n, Rat(0));
    v[c] = 1;
    for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][c];
    basis.push_back(v);
  }
  return basis;
}

// ---------------------------------------------------------------------------
// solve_rational: exact solution of m x = b, or nullopt when inconsistent.
// Underdetermined systems yield the particular solution with free variables
// set to zero.

inline std::optional<RatVec> solve_rational(const RatMat& m, const RatVec& b) {
  if (mat_rows(m) != b.size()) throw std::invalid_argument("solve_rational: dimension mismatch");
  size_t n = mat_cols(m);
  RatMat aug = m;
  for (size_t i = 0; i < mat_rows(m); ++i) aug[i].push_back(b[i]);
  std::vector<size_t> pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == n) return std::nullopt;  // 0 = 1 row
  RatVec x(n, Rat(0));
  for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug[r][n];
  return x;
}

// Express v in the given (independent) basis; nullopt if v is outside the span.
inline std::optional<RatVec> coords_in_basis(const RatVec& v, const std::vector<RatVec>& basis) {
  if (basis.empty()) return is_zero(v) ? std::optional<RatVec>(RatVec{}) : std::nullopt;
  RatMat cols(v.size(), RatVec(basis.size()));
  for (size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].size() != v.size()) throw std::invalid_argument("coords_in_basis: dimension mismatch");
    for (size_t i = 0; i < v.size(); ++i) cols[i][j] = basis[j][i];
  }
  auto sol = solve_rational(cols, v);
  if (!sol) return std::nullopt;
  // solve_rational zero-fills free variables, which for an independent basis
  // cannot occur; guard anyway by substituting back.
  RatVec check(v.size(), Rat(0));
  for (size_t j = 0; j < basis.size(); ++j) check = vec_add(check, vec_scale((*sol)[j], basis[j]));
  if (check != v) return std::nullopt;
  return sol;
}

inline bool in_span(const RatVec& v, const std::vector<RatVec>& basis) {
  return coords_in_basis(v, basis).has_value();
}

// Deterministic spanning subset of the input vectors (greedy by rank).
inline std::vector<RatVec> span_basis(const std::vector<RatVec>& vecs) {
  std::vector<RatVec> basis;
  RatMat m;
  for (const auto& v : vecs) {
    m.push_back(v);
    if (mat_rank(m) == m.size())
      basis.push_back(v);
    else
      m.pop_back();
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Hermite normal form, row style. Pivots positive, entries above a pivot
// reduced into [0, pivot). Returns (H, U) with U unimodular, U m = H.

struct HnfResult {
  IntMat h;
  IntMat u;
};

inline HnfResult hnf(const IntMat& m_in) {
  size_t rows = m_in.size();
  size_t cols = rows ? m_in[0].size() : 0;
  for (const auto& r : m_in)
    if (r.size() != cols) throw std::invalid_argument("hnf: matrix not rectangular");
  IntMat h = m_in;
  IntMat u(rows, IntVec(rows, 0));
  for (size_t i = 0; i < rows; ++i) u[i][i] = 1;

  auto row_sub = [&](size_t dst, size_t src, const Int& q) {
    for (size_t j = 0; j < cols; ++j) h[dst][j] -= q * h[src][j];
    for (size_t j = 0; j < rows; ++j) u[dst][j] -= q * u[src][j];
  };

  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    // reduce rows r.. against each other in column c until one nonzero remains
    while (true) {
      size_t best = rows;
      for (size_t i = r; i < rows; ++i) {
        if (h[i][c] == 0) continue;
        if (best == rows || cmp(abs(h[i][c]), abs(h[best][c])) < 0) best = i;
      }
      if (best == rows) break;  // column all zero below r
      std::swap(h[best], h[r]);
      std::swap(u[best], u[r]);
      bool cleared = true;
      for (size_t i = r + 1; i < rows; ++i) {
        if (h[i][c] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), h[i][c].get_mpz_t(), h[r][c].get_mpz_t());
        row_sub(i, r, q);
        if (h[i][c] != 0) cleared = false;
      }
      if (cleared) break;
    }
    if (h[r][c] == 0) continue;
    if (h[r][c] < 0) {
      for (auto& x : h[r]) x = -x;
      for (auto& x : u[r]) x = -x;
    }
    for (size_t i = 0; i < r; ++i) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), h[i][c].get_mpz_t(), h[r][c].get_mpz_t());
      if (q != 0) row_sub(i, r, q);
    }
    ++r;
  }
  return {h, u};
}

inline IntMat rat_mat_to_int(const RatMat& m) {
  IntMat r(mat_rows(m), IntVec(mat_cols(m)));
  for (size_t i = 0; i < mat_rows(m); ++i)
    for (size_t j = 0; j < mat_cols(m); ++j) {
      if (m[i][j].get_den() != 1) throw std::invalid_argument("expected integer matrix entry");
      r[i][j] = m[i][j].get_num();
    }
  return r;
}

inline RatMat int_mat_to_rat(const IntMat& m) {
  RatMat r(m.size(), RatVec(m.empty() ? 0 : m[0].size()));
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m[i].size(); ++j) r[i][j] = Rat(m[i][j]);
  return r;
}

// HNF entry point on rational matrices with integer entries, per the exact
// arithmetic contract used by the lattice code.
inline std::pair<RatMat, RatMat> hnf_rat(const RatMat& m) {
  HnfResult res = hnf(rat_mat_to_int(m));
  return {int_mat_to_rat(res.h), int_mat_to_rat(res.u)};
}

// Canonical basis of the group generated over Z by the given rational rows:
// clear denominators, HNF, scale back, drop zero rows.
inline std::vector<RatVec> lattice_canonical_basis(const std::vector<RatVec>& gens) {
  if (gens.empty()) return {};
  size_t n = gens[0].size();
  Int den = 1;
  for (const auto& g : gens) {
    if (g.size() != n) throw std::invalid_argument("lattice_canonical_basis: dimension mismatch");
    for (const auto& x : g) {
      Int d = x.get_den();
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
    }
  }
  IntMat m(gens.size(), IntVec(n));
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = 0; j < n; ++j) {
      Rat scaled = gens[i][j] * Rat(den);
      m[i][j] = scaled.get_num();
    }
  IntMat h = hnf(m).h;
  std::vector<RatVec> basis;
  for (const auto& row : h) {
    RatVec v(n);
    bool zero = true;
    for (size_t j = 0; j < n; ++j) {
      v[j] = Rat(row[j], den);
      v[j].canonicalize();
      if (v[j] != 0) zero = false;
    }
    if (!zero) basis.push_back(v);
  }
  return basis;
}

// Lattice basis of {x integral : m x = 0}. Rows of the unimodular transform
// of hnf(m^T) that map to zero rows of H form the saturated kernel lattice.
inline std::vector<RatVec> integer_kernel(const RatMat& m_in) {
  size_t n = mat_cols(m_in);
  if (mat_rows(m_in) == 0 || n == 0) {
    // no constraints: kernel is all of Z^n
    std::vector<RatVec> basis;
    for (size_t i = 0; i < n; ++i) {
      RatVec v(n, Rat(0));
      v[i] = 1;
      basis.push_back(v);
    }
    return basis;
  }
  // clear denominators row-wise (does not change the kernel)
  RatMat cleared = m_in;
  for (auto& row : cleared) {
    Int den = 1;
    for (const auto& x : row) {
      Int d = x.get_den();
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
    }
    for (auto& x : row) {
      x *= Rat(den);
      x.canonicalize();
    }
  }
  IntMat mt(n, IntVec(mat_rows(cleared)));
  for (size_t i = 0; i < mat_rows(cleared); ++i)
    for (size_t j = 0; j < n; ++j) mt[j][i] = cleared[i][j].get_num();
  HnfResult res = hnf(mt);
  std::vector<RatVec> kernel_rows;
  for (size_t i = 0; i < n; ++i) {
    bool zero_row = true;
    for (const auto& x : res.h[i])
      if (x != 0) {
        zero_row = false;
        break;
      }
    if (!zero_row) continue;
    RatVec v(n);
    for (size_t j = 0; j < n; ++j) v[j] = Rat(res.u[i][j]);
    kernel_rows.push_back(v);
  }
  return lattice_canonical_basis(kernel_rows);
}

// ---------------------------------------------------------------------------
// InnerProduct: symmetric positive-definite rational Gram matrix, extended by
// identity blocks beyond its stored size so one inner product serves every
// ambient dimension in a session.

class InnerProduct {
 public:
  InnerProduct() = default;  // identity

  explicit InnerProduct(RatMat gram) : gram_(std::move(gram)) {
    check_rectangular(gram_);
    size_t n = mat_rows(gram_);
    if (n != mat_cols(gram_)) throw std::invalid_argument("InnerProduct: Gram matrix not square");
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < i; ++j)
        if (gram_[i][j] != gram_[j][i]) throw std::invalid_argument("InnerProduct: Gram matrix not symmetric");
    // positive definiteness via leading principal minors
    for (size_t k = 1; k <= n; ++k) {
      RatMat lead(k, RatVec(k));
      for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) lead[i][j] = gram_[i][j];
      if (mat_det(lead) <= 0) throw std::invalid_argument("InnerProduct: Gram matrix not positive definite");
    }
  }

  bool is_identity() const { return gram_.empty(); }

  Rat apply(const RatVec& a, const RatVec& b) const {
    if (a.size() != b.size()) throw std::invalid_argument("InnerProduct: dimension mismatch");
    Rat s = 0;
    size_t n = mat_rows(gram_);
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0) continue;
      if (i < n) {
        for (size_t j = 0; j < a.size(); ++j) {
          if (b[j] == 0) continue;
          s += a[i] * gram_entry(i, j) * b[j];
        }
      } else {
        s += a[i] * b[i];
      }
    }
    // rows beyond the Gram block already handled by the i-loop's identity
    // branch; columns beyond handled by gram_entry.
    return s;
  }

  const RatMat& gram() const { return gram_; }

 private:
  Rat gram_entry(size_t i, size_t j) const {
    size_t n = mat_rows(gram_);
    if (i < n && j < n) return gram_[i][j];
    return i == j ? Rat(1) : Rat(0);
  }

  RatMat gram_;  // empty means identity
};

// Component of v orthogonal (w.r.t. q) to span(subspace_basis). Rejects a
// dependent basis.
inline RatVec orthogonal_project(const RatVec& v, const std::vector<RatVec>& subspace_basis,
                                 const InnerProduct& q = InnerProduct()) {
  if (subspace_basis.empty()) return v;
  size_t n = subspace_basis.size();
  RatMat gram(n, RatVec(n));
  RatVec rhs(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) gram[i][j] = q.apply(subspace_basis[i], subspace_basis[j]);
    rhs[i] = q.apply(subspace_basis[i], v);
  }
  if (mat_det(gram) == 0) throw std::invalid_argument("orthogonal_project: dependent subspace basis");
  auto c = solve_rational(gram, rhs);
  RatVec result = v;
  for (size_t i = 0; i < n; ++i) result = vec_sub(result, vec_scale((*c)[i], subspace_basis[i]));
  return result;
}

// Basis of the q-orthogonal complement of span(vecs) inside the ambient
// space, taken as the canonical lattice basis of the integral kernel of the
// pairing conditions (deterministic).
inline std::vector<RatVec> orthogonal_complement_basis(const std::vector<RatVec>& vecs, size_t ambient_dim,
                                                       const InnerProduct& q = InnerProduct()) {
  RatMat conditions;
  for (const auto& v : vecs) {
    RatVec row(ambient_dim);
    RatVec unit(ambient_dim, Rat(0));
    for (size_t j = 0; j < ambient_dim; ++j) {
      unit[j] = 1;
      row[j] = q.apply(v, unit);
      unit[j] = 0;
    }
    conditions.push_back(row);
  }
  if (conditions.empty()) {
    std::vector<RatVec> basis;
    for (size_t i = 0; i < ambient_dim; ++i) {
      RatVec v(ambient_dim, Rat(0));
      v[i] = 1;
      basis.push_back(v);
    }
    return basis;
  }
  return integer_kernel(conditions);
}

}  // namespace conical
