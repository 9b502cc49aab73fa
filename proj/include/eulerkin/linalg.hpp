#pragma once

// Dense exact linear algebra over Rational. Every matrix here is tiny
// (ambient dimension at most 4), so plain Gauss-Jordan elimination with
// exact pivots is the right tool.

#include <optional>
#include <vector>

#include "eulerkin/rational.hpp"

namespace eulerkin {

using RVec = std::vector<Rational>;
using RMat = std::vector<RVec>;  // row-major

inline RVec vec_add(const RVec& a, const RVec& b) {
  RVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline RVec vec_sub(const RVec& a, const RVec& b) {
  RVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline RVec vec_scale(const Rational& c, const RVec& a) {
  RVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline Rational dot(const RVec& a, const RVec& b) {
  Rational s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline bool is_zero(const RVec& a) {
  for (const auto& x : a)
    if (x != 0) return false;
  return true;
}

inline RVec cross3(const RVec& a, const RVec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

// Strict lexicographic order on coordinate tuples; the total order used for
// canonical vertex sorting and triangulation apex choice.
inline bool lex_less(const RVec& a, const RVec& b) {
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return a.size() < b.size();
}

struct Rref {
  RMat m;
  std::vector<int> pivot_cols;  // one per nonzero row, increasing
};

// Gauss-Jordan to reduced row echelon form.
inline Rref rref(RMat a) {
  Rref out;
  size_t rows = a.size();
  size_t cols = rows ? a[0].size() : 0;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[r], a[piv]);
    Rational inv = 1 / a[r][c];
    for (size_t j = c; j < cols; ++j) a[r][j] *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    out.pivot_cols.push_back(int(c));
    ++r;
  }
  out.m = std::move(a);
  return out;
}

inline int rank(const RMat& a) { return int(rref(a).pivot_cols.size()); }

inline Rational det(const RMat& a) {
  RMat m = a;
  size_t n = m.size();
  Rational d = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(m[c], m[piv]);
      d = -d;
    }
    d *= m[c][c];
    Rational inv = 1 / m[c][c];
    for (size_t i = c + 1; i < n; ++i) {
      if (m[i][c] == 0) continue;
      Rational f = m[i][c] * inv;
      for (size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return d;
}

// Any particular solution of A x = b, or nullopt when inconsistent.
inline std::optional<RVec> solve(const RMat& a, const RVec& b) {
  size_t rows = a.size();
  size_t cols = rows ? a[0].size() : 0;
  RMat aug = a;
  for (size_t i = 0; i < rows; ++i) aug[i].push_back(b[i]);
  Rref rr = rref(std::move(aug));
  RVec x(cols, Rational(0));
  for (size_t k = 0; k < rr.pivot_cols.size(); ++k) {
    if (rr.pivot_cols[k] == int(cols)) return std::nullopt;  // row 0 = 1
    x[rr.pivot_cols[k]] = rr.m[k][cols];
  }
  return x;
}

// Basis of the null space of A.
inline std::vector<RVec> kernel_basis(const RMat& a) {
  size_t cols = a.empty() ? 0 : a[0].size();
  Rref rr = rref(a);
  std::vector<bool> is_pivot(cols, false);
  for (int c : rr.pivot_cols) is_pivot[c] = true;
  std::vector<RVec> basis;
  for (size_t free_c = 0; free_c < cols; ++free_c) {
    if (is_pivot[free_c]) continue;
    RVec v(cols, Rational(0));
    v[free_c] = 1;
    for (size_t k = 0; k < rr.pivot_cols.size(); ++k)
      v[rr.pivot_cols[k]] = -rr.m[k][free_c];
    basis.push_back(std::move(v));
  }
  return basis;
}

inline RVec mat_apply(const RMat& a, const RVec& x) {
  RVec y(a.size(), Rational(0));
  for (size_t i = 0; i < a.size(); ++i) y[i] = dot(a[i], x);
  return y;
}

inline RMat mat_mul(const RMat& a, const RMat& b) {
  size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
  RMat c(n, RVec(m, Rational(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < m; ++j)
      for (size_t t = 0; t < k; ++t) c[i][j] += a[i][t] * b[t][j];
  return c;
}

inline RMat transpose(const RMat& a) {
  size_t n = a.size(), m = a.empty() ? 0 : a[0].size();
  RMat t(m, RVec(n, Rational(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < m; ++j) t[j][i] = a[i][j];
  return t;
}

}  // namespace eulerkin
