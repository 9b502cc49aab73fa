#pragma once

// Exact affine maps x -> Ax + t between rational coordinate spaces.

#include <utility>
#include <vector>

#include "eulerkin/error.hpp"
#include "eulerkin/linalg.hpp"
#include "eulerkin/polytope.hpp"

namespace eulerkin {

struct AffineMap {
  RMat a;  // target_dim rows, source_dim columns
  RVec t;  // size target_dim

  int source_dim() const { return a.empty() ? 0 : int(a[0].size()); }
  int target_dim() const { return int(a.size()); }
};

inline AffineMap identity_map(int n) {
  AffineMap m;
  m.a.assign(n, RVec(n, Rational(0)));
  for (int i = 0; i < n; ++i) m.a[i][i] = 1;
  m.t.assign(n, Rational(0));
  return m;
}

inline void validate_map(const AffineMap& m) {
  require(!m.a.empty() && !m.a[0].empty(), ErrorCode::ValidationError,
          "affine map needs positive dimensions");
  for (const auto& row : m.a)
    require(row.size() == m.a[0].size(), ErrorCode::ValidationError,
            "ragged affine map matrix");
  require(m.t.size() == m.a.size(), ErrorCode::ValidationError,
          "affine map translation size mismatch");
}

inline RVec apply_map(const AffineMap& m, const RVec& x) {
  require(int(x.size()) == m.source_dim(), ErrorCode::ValidationError,
          "affine map applied to wrong dimension");
  RVec y = m.t;
  for (size_t i = 0; i < m.a.size(); ++i) y[i] += dot(m.a[i], x);
  return y;
}

// (f o g)(x) = f(g(x)).
inline AffineMap compose(const AffineMap& f, const AffineMap& g) {
  require(f.source_dim() == g.target_dim(), ErrorCode::ValidationError,
          "affine map composition dimension mismatch");
  AffineMap h;
  h.a = mat_mul(f.a, g.a);
  h.t = vec_add(mat_apply(f.a, g.t), f.t);
  return h;
}

// Exact orthogonality of the linear part: A^T A = I (square only).
inline bool is_orthogonal(const AffineMap& m) {
  if (m.source_dim() != m.target_dim()) return false;
  RMat gram = mat_mul(transpose(m.a), m.a);
  for (size_t i = 0; i < gram.size(); ++i)
    for (size_t j = 0; j < gram.size(); ++j)
      if (gram[i][j] != Rational(i == j ? 1 : 0)) return false;
  return true;
}

// Inverse of a small nonsingular rational matrix via row reduction.
inline RMat mat_inverse(const RMat& a) {
  size_t n = a.size();
  RMat aug = a;
  for (size_t i = 0; i < n; ++i) {
    require(aug[i].size() == n, ErrorCode::ValidationError, "inverse of non-square matrix");
    for (size_t j = 0; j < n; ++j) aug[i].push_back(Rational(i == j ? 1 : 0));
  }
  Rref r = rref(aug);
  for (size_t i = 0; i < n; ++i)
    require(i < r.pivot_cols.size() && r.pivot_cols[i] == int(i),
            ErrorCode::RankDeficientSystem, "singular matrix has no inverse");
  RMat inv(n, RVec(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) inv[i][j] = r.m[i][n + j];
  return inv;
}

// Image of the map as an affine subspace of the target (canonical basis).
inline AffineSubspace map_image(const AffineMap& m) {
  RMat cols = transpose(m.a);
  Rref r = rref(cols);
  AffineSubspace s;
  s.point = m.t;
  for (size_t i = 0; i < r.pivot_cols.size(); ++i) s.basis.push_back(r.m[i]);
  return s;
}

}  // namespace eulerkin
