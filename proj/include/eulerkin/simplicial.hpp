#pragma once

// Simplicial complexes with exact rational vertices and integer-weighted
// open cells. A StratifiedCF represents the constructible function
// sum_i w_i 1_{relint(cell_i)}; the complex is closed under faces and its
// closed cells intersect pairwise in common faces, so every point of the
// support lies in exactly one open cell.

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "eulerkin/error.hpp"
#include "eulerkin/polytope.hpp"

namespace eulerkin {

struct SimplicialComplex {
  int ambient = 0;
  std::vector<RVec> verts;              // lex-sorted, unique
  std::vector<std::vector<int>> cells;  // sorted index tuples, ordered by (size, tuple)
};

struct StratifiedCF {
  SimplicialComplex complex;
  std::vector<long long> weights;  // aligned with complex.cells
};

inline ConvexPolytope cell_polytope(const SimplicialComplex& k, const std::vector<int>& cell) {
  ConvexPolytope p;
  p.ambient = k.ambient;
  for (int i : cell) p.verts.push_back(k.verts[i]);
  std::sort(p.verts.begin(), p.verts.end(), lex_less);
  return p;
}

inline bool cell_order(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

namespace detail {

// Barycentric relative-interior test: x lies in relint(conv{v_i}) iff the
// affine combination hitting x exists and has all coefficients positive.
inline bool simplex_relint_contains(const std::vector<RVec>& sv, const RVec& x) {
  size_t n = x.size(), m = sv.size();
  if (m == 1) return sv[0] == x;
  RMat a(n + 1, RVec(m, Rational(0)));
  RVec b(n + 1, Rational(1));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) a[i][j] = sv[j][i];
    b[i] = x[i];
  }
  for (size_t j = 0; j < m; ++j) a[n][j] = 1;
  auto lam = solve(a, b);
  if (!lam) return false;
  for (const auto& l : *lam)
    if (l <= 0) return false;
  return true;
}

inline void bbox_of(const std::vector<RVec>& pts, RVec* lo, RVec* hi) {
  *lo = pts[0];
  *hi = pts[0];
  for (const auto& p : pts)
    for (size_t i = 0; i < p.size(); ++i) {
      if (p[i] < (*lo)[i]) (*lo)[i] = p[i];
      if (p[i] > (*hi)[i]) (*hi)[i] = p[i];
    }
}

}  // namespace detail

// Canonical form: vertices lex-sorted and distinct, cells remapped and sorted,
// duplicate cells merged additively, zero-weight cells kept only as faces of
// weighted cells, unused vertices dropped. Idempotent, and a pure function of
// the constructible function the input presents.
inline StratifiedCF canonicalize(const StratifiedCF& in) {
  const auto& k = in.complex;

  // Sort and geometrically dedupe vertices.
  std::vector<size_t> order(k.verts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return lex_less(k.verts[a], k.verts[b]); });
  std::vector<RVec> verts;
  std::vector<int> remap(k.verts.size());
  for (size_t i : order) {
    if (verts.empty() || verts.back() != k.verts[i]) verts.push_back(k.verts[i]);
    remap[i] = int(verts.size()) - 1;
  }

  // Merge duplicate cells additively.
  std::map<std::vector<int>, long long> acc;
  for (size_t c = 0; c < k.cells.size(); ++c) {
    std::vector<int> cell;
    for (int i : k.cells[c]) cell.push_back(remap[i]);
    std::sort(cell.begin(), cell.end());
    cell.erase(std::unique(cell.begin(), cell.end()), cell.end());
    acc[cell] += c < in.weights.size() ? in.weights[c] : 0;
  }

  // Keep weighted cells plus every face needed to close them.
  std::set<std::vector<int>> keep;
  for (const auto& [cell, w] : acc) {
    if (w == 0) continue;
    size_t subsets = size_t(1) << cell.size();
    for (size_t mask = 1; mask < subsets; ++mask) {
      std::vector<int> face;
      for (size_t b = 0; b < cell.size(); ++b)
        if (mask & (size_t(1) << b)) face.push_back(cell[b]);
      keep.insert(std::move(face));
    }
  }

  std::vector<std::vector<int>> cells(keep.begin(), keep.end());
  std::sort(cells.begin(), cells.end(), cell_order);
  std::vector<long long> weights;
  weights.reserve(cells.size());
  for (const auto& cell : cells) {
    auto it = acc.find(cell);
    weights.push_back(it == acc.end() ? 0 : it->second);
  }

  // Drop vertices no kept cell references, then pack indices.
  std::vector<int> pack(verts.size(), -1);
  for (const auto& cell : cells)
    for (int i : cell)
      if (pack[i] < 0) pack[i] = 0;
  StratifiedCF out;
  out.complex.ambient = k.ambient;
  for (size_t i = 0, j = 0; i < verts.size(); ++i)
    if (pack[i] == 0) {
      out.complex.verts.push_back(verts[i]);
      pack[i] = int(j++);
    }
  for (auto& cell : cells)
    for (int& i : cell) i = pack[i];
  out.complex.cells = std::move(cells);
  out.weights = std::move(weights);
  return out;
}

// Validation for externally supplied complexes.
inline void validate_complex(const SimplicialComplex& k) {
  require(k.ambient >= 1 && k.ambient <= 3, ErrorCode::ValidationError,
          "ambient dimension out of range");
  std::set<std::vector<int>> present(k.cells.begin(), k.cells.end());
  for (const auto& cell : k.cells) {
    require(!cell.empty(), ErrorCode::ValidationError, "empty simplex");
    for (int i : cell)
      require(i >= 0 && i < int(k.verts.size()), ErrorCode::ValidationError,
              "vertex index out of range");
    require(std::is_sorted(cell.begin(), cell.end()) &&
                std::adjacent_find(cell.begin(), cell.end()) == cell.end(),
            ErrorCode::DegenerateSimplex, "repeated vertex in simplex");
    require(int(cell.size()) <= k.ambient + 1, ErrorCode::DegenerateSimplex,
            "simplex dimension exceeds ambient dimension");
    RMat diffs;
    for (size_t i = 1; i < cell.size(); ++i)
      diffs.push_back(vec_sub(k.verts[cell[i]], k.verts[cell[0]]));
    if (!diffs.empty())
      require(rank(diffs) == int(diffs.size()), ErrorCode::DegenerateSimplex,
              "affinely dependent simplex vertices");
    // Face closure: checking facets suffices by induction on dimension.
    if (cell.size() > 1) {
      for (size_t drop = 0; drop < cell.size(); ++drop) {
        std::vector<int> facet;
        for (size_t i = 0; i < cell.size(); ++i)
          if (i != drop) facet.push_back(cell[i]);
        require(present.count(facet), ErrorCode::FaceClosureViolation,
                "missing face of a listed simplex");
      }
    }
  }
  {
    auto sorted = k.verts;
    std::sort(sorted.begin(), sorted.end(), lex_less);
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            ErrorCode::ImproperIntersection, "coincident vertices");
  }
  // Pairwise proper intersection: closed cells must meet exactly in the
  // simplex spanned by their shared vertices (or not at all).
  size_t n = k.cells.size();
  std::vector<ConvexPolytope> polys(n);
  std::vector<RVec> lo(n), hi(n);
  for (size_t i = 0; i < n; ++i) {
    polys[i] = cell_polytope(k, k.cells[i]);
    detail::bbox_of(polys[i].verts, &lo[i], &hi[i]);
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      bool disjoint_box = false;
      for (int a = 0; a < k.ambient && !disjoint_box; ++a)
        disjoint_box = hi[i][a] < lo[j][a] || hi[j][a] < lo[i][a];
      if (disjoint_box) continue;
      auto meet = intersect(polys[i], polys[j]);
      if (!meet) continue;
      std::vector<int> shared;
      std::set_intersection(k.cells[i].begin(), k.cells[i].end(),
                            k.cells[j].begin(), k.cells[j].end(),
                            std::back_inserter(shared));
      require(!shared.empty(), ErrorCode::ImproperIntersection,
              "cells intersect without sharing a face");
      ConvexPolytope span;
      span.ambient = k.ambient;
      for (int v : shared) span.verts.push_back(k.verts[v]);
      std::sort(span.verts.begin(), span.verts.end(), lex_less);
      require(span == *meet, ErrorCode::ImproperIntersection,
              "cells intersect outside their common face");
    }
}

// Builds a validated canonical StratifiedCF from raw data. Canonicalization
// would silently close an unclosed input under faces and merge coincident
// vertices, so those defects are rejected on the raw input first.
inline StratifiedCF build_complex(int ambient, std::vector<RVec> verts,
                                  std::vector<std::pair<std::vector<int>, long long>> cells) {
  for (const auto& v : verts)
    require(int(v.size()) == ambient, ErrorCode::ValidationError,
            "vertex dimension mismatch");
  // Identify vertices by coordinates so listing one point twice stays legal.
  std::map<RVec, int> first;
  std::vector<int> remap(verts.size());
  for (size_t i = 0; i < verts.size(); ++i)
    remap[i] = first.try_emplace(verts[i], int(i)).first->second;
  std::set<std::vector<int>> present;
  std::vector<std::vector<int>> mapped;
  for (const auto& [cell, w] : cells) {
    std::vector<int> m;
    for (int i : cell) {
      require(i >= 0 && i < int(verts.size()), ErrorCode::ValidationError,
              "vertex index out of range");
      m.push_back(remap[i]);
    }
    std::sort(m.begin(), m.end());
    require(std::adjacent_find(m.begin(), m.end()) == m.end(),
            ErrorCode::DegenerateSimplex, "repeated vertex in simplex");
    present.insert(m);
    mapped.push_back(std::move(m));
  }
  for (const auto& cell : mapped) {
    if (cell.size() < 2) continue;
    for (size_t drop = 0; drop < cell.size(); ++drop) {
      std::vector<int> facet;
      for (size_t i = 0; i < cell.size(); ++i)
        if (i != drop) facet.push_back(cell[i]);
      require(present.count(facet), ErrorCode::FaceClosureViolation,
              "missing face of a listed simplex");
    }
  }
  StratifiedCF raw;
  raw.complex.ambient = ambient;
  raw.complex.verts = std::move(verts);
  for (size_t c = 0; c < cells.size(); ++c) {
    raw.complex.cells.push_back(cells[c].first);
    raw.weights.push_back(cells[c].second);
  }
  StratifiedCF cf = canonicalize(raw);
  validate_complex(cf.complex);
  return cf;
}

// Value at a point: the weight of the unique open cell containing it, or 0.
inline long long evaluate(const StratifiedCF& cf, const RVec& x) {
  const auto& k = cf.complex;
  require(int(x.size()) == k.ambient, ErrorCode::ValidationError,
          "point dimension mismatch");
  for (size_t c = 0; c < k.cells.size(); ++c) {
    if (cf.weights[c] == 0) continue;
    const auto& cell = k.cells[c];
    bool out = false;
    for (int a = 0; a < k.ambient && !out; ++a) {
      Rational mn = k.verts[cell[0]][a], mx = mn;
      for (int i : cell) {
        const Rational& t = k.verts[i][a];
        if (t < mn) mn = t;
        if (t > mx) mx = t;
      }
      out = x[a] < mn || x[a] > mx;
    }
    if (out) continue;
    std::vector<RVec> sv;
    for (int i : cell) sv.push_back(k.verts[i]);
    if (detail::simplex_relint_contains(sv, x)) return cf.weights[c];
  }
  return 0;
}

// Integral against the Euler characteristic: a relatively open bounded
// d-cell contributes (-1)^d times its weight.
inline long long euler_integral(const StratifiedCF& cf) {
  long long total = 0;
  for (size_t c = 0; c < cf.complex.cells.size(); ++c) {
    int d = int(cf.complex.cells[c].size()) - 1;
    total += (d % 2 == 0) ? cf.weights[c] : -cf.weights[c];
  }
  return total;
}

// Writes the function as an integer combination of indicators of closed
// simplices via 1_{relint s} = sum_{faces t of s} (-1)^{dim s - dim t} 1_{t}.
inline PolytopeCombination to_polytope_combination(const StratifiedCF& cf) {
  PolytopeCombination pc;
  pc.ambient = cf.complex.ambient;
  for (size_t c = 0; c < cf.complex.cells.size(); ++c) {
    long long w = cf.weights[c];
    if (w == 0) continue;
    const auto& cell = cf.complex.cells[c];
    size_t subsets = size_t(1) << cell.size();
    for (size_t mask = 1; mask < subsets; ++mask) {
      std::vector<int> face;
      for (size_t b = 0; b < cell.size(); ++b)
        if (mask & (size_t(1) << b)) face.push_back(cell[b]);
      int codim = int(cell.size()) - int(face.size());
      long long sgn = (codim % 2 == 0) ? 1 : -1;
      pc.terms.push_back({cell_polytope(cf.complex, face), w * sgn});
    }
  }
  return canonicalize(std::move(pc));
}

}  // namespace eulerkin
