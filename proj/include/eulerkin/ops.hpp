#pragma once

// Calculus operations on stratified constructible functions: rigid images,
// exterior products, pullback and pushforward along affine maps, slicing,
// and convolution with respect to Minkowski sum.

#include <algorithm>
#include <bit>
#include <optional>
#include <utility>
#include <vector>

#include "eulerkin/affine.hpp"
#include "eulerkin/arrangement.hpp"

namespace eulerkin {

namespace detail {

inline StratifiedCF empty_cf(int ambient) { return StratifiedCF{{ambient, {}, {}}, {}}; }

// Transforms vertex coordinates by an injective affine map; cells and weights
// carry over unchanged.
inline StratifiedCF map_vertices(const StratifiedCF& f, const AffineMap& m) {
  StratifiedCF out;
  out.complex.ambient = m.target_dim();
  for (const auto& v : f.complex.verts) out.complex.verts.push_back(apply_map(m, v));
  out.complex.cells = f.complex.cells;
  out.weights = f.weights;
  return canonicalize(out);
}

inline std::vector<size_t> maximal_cells(const SimplicialComplex& k) {
  std::vector<size_t> out;
  for (size_t i = 0; i < k.cells.size(); ++i) {
    bool maximal = true;
    for (size_t j = 0; j < k.cells.size() && maximal; ++j)
      if (j != i && k.cells[j].size() > k.cells[i].size())
        maximal = !std::includes(k.cells[j].begin(), k.cells[j].end(),
                                 k.cells[i].begin(), k.cells[i].end());
    if (maximal) out.push_back(i);
  }
  return out;
}

inline bool relint_holds(const PreparedCell& c, const RVec& x) {
  for (const auto& e : c.eqs)
    if (eval(e, x) != 0) return false;
  for (const auto& s : c.strict)
    if (eval(s, x) >= 0) return false;
  return true;
}

}  // namespace detail

// Moves a function by a rigid motion g: the result represents x -> f(g^{-1}x),
// realized by transforming vertex coordinates forward.
inline StratifiedCF rigid_motion_apply(const StratifiedCF& f, const AffineMap& m) {
  validate_map(m);
  require(m.source_dim() == f.complex.ambient && m.target_dim() == f.complex.ambient,
          ErrorCode::ValidationError, "rigid motion dimension mismatch");
  require(is_orthogonal(m), ErrorCode::NotOrthogonal,
          "rigid motion needs an exactly orthogonal linear part");
  return detail::map_vertices(f, m);
}

// (f x g)(u, v) = f(u) g(v) on the concatenated coordinates. The product
// complex is triangulated cell pair by cell pair with monotone-staircase
// simplices; the global vertex order keeps neighboring pairs consistent.
inline StratifiedCF exterior_product(const StratifiedCF& f, const StratifiedCF& g) {
  int m = f.complex.ambient, n = g.complex.ambient;
  require(m + n <= 3, ErrorCode::DimensionCapExceeded,
          "exterior product exceeds three ambient dimensions");
  if (f.complex.cells.empty() || g.complex.cells.empty()) return detail::empty_cf(m + n);

  detail::TopCollector coll;
  auto maxf = detail::maximal_cells(f.complex);
  auto maxg = detail::maximal_cells(g.complex);
  for (size_t ci : maxf)
    for (size_t cj : maxg) {
      const auto& sa = f.complex.cells[ci];
      const auto& sb = g.complex.cells[cj];
      int p = int(sa.size()) - 1, q = int(sb.size()) - 1;
      int steps = p + q;
      for (unsigned mask = 0; mask < (1u << steps); ++mask) {
        if (int(std::popcount(mask)) != p) continue;
        std::vector<RVec> simplex;
        int i = 0, j = 0;
        auto emit = [&]() {
          RVec v = f.complex.verts[sa[i]];
          const RVec& w = g.complex.verts[sb[j]];
          v.insert(v.end(), w.begin(), w.end());
          simplex.push_back(std::move(v));
        };
        emit();
        for (int s = 0; s < steps; ++s) {
          if (mask & (1u << s)) ++i; else ++j;
          emit();
        }
        coll.add_top(simplex);
      }
    }
  SimplicialComplex refined = coll.finish(m + n);
  detail::PreparedCF pf = detail::prepare_cf(f), pg = detail::prepare_cf(g);
  return assemble_cf(refined, [&](const RVec& x) {
    RVec u(x.begin(), x.begin() + m), v(x.begin() + m, x.end());
    return evaluate(pf, u) * evaluate(pg, v);
  });
}

// f composed with an affine map: (pullback(f, m))(x) = f(m(x)). The result
// must stay compactly supported, which needs an injective linear part unless
// the support misses the map's image entirely.
inline StratifiedCF pullback(const StratifiedCF& f, const AffineMap& m) {
  validate_map(m);
  require(m.target_dim() == f.complex.ambient, ErrorCode::ValidationError,
          "pullback target dimension mismatch");
  int src = m.source_dim();
  require(src >= 1 && src <= 3, ErrorCode::ValidationError,
          "pullback source dimension out of range");
  if (f.complex.cells.empty()) return detail::empty_cf(src);

  if (!kernel_basis(m.a).empty()) {
    AffineSubspace img = map_image(m);
    for (size_t c = 0; c < f.complex.cells.size(); ++c) {
      if (f.weights[c] == 0) continue;
      ConvexPolytope poly = cell_polytope(f.complex, f.complex.cells[c]);
      auto meet = intersect(poly, img);
      if (meet && relint_contains(poly, relint_point(*meet)))
        fail(ErrorCode::NonCompactSupport,
             "pullback along a non-injective map has unbounded support");
    }
    return detail::empty_cf(src);
  }

  // Preimages of the carve planes; planes missing the image drop out.
  CarveSet planes;
  {
    CarveSet target_planes;
    carve_cf(f, &target_planes);
    for (const auto& h : target_planes) {
      RVec nn = mat_apply(transpose(m.a), h.normal);
      if (is_zero(nn)) continue;
      planes.insert(canonical_hyperplane(std::move(nn), h.offset - dot(h.normal, m.t)));
    }
  }
  // Window: the preimage of the support's bounding box is a bounded
  // polyhedron when the map is injective.
  RVec lo, hi;
  detail::bbox_of(f.complex.verts, &lo, &hi);
  std::vector<Halfspace> window;
  for (int j = 0; j < m.target_dim(); ++j) {
    window.push_back({m.a[j], hi[j] - m.t[j]});
    window.push_back({vec_scale(Rational(-1), m.a[j]), m.t[j] - lo[j]});
  }
  std::vector<RVec> corner = hpoly_vertices(src, window);
  if (corner.empty()) return detail::empty_cf(src);
  RVec wlo, whi;
  detail::bbox_of(corner, &wlo, &whi);
  for (int a = 0; a < src; ++a) {
    wlo[a] -= 1;
    whi[a] += 1;
  }
  SimplicialComplex refined = arrangement_complex(src, planes, wlo, whi);
  detail::PreparedCF pf = detail::prepare_cf(f);
  return assemble_cf(refined,
                     [&](const RVec& x) { return evaluate(pf, apply_map(m, x)); });
}

// Pullback truncated to an axis-aligned box: represents x -> f(m(x)) inside
// [lo, hi] and zero outside. The untruncated pullback can have unbounded
// support; multiplying by a function supported inside the window gives the
// same result either way, which is what the projection formula needs.
inline StratifiedCF pullback_windowed(const StratifiedCF& f, const AffineMap& m,
                                      const RVec& lo, const RVec& hi) {
  validate_map(m);
  require(m.target_dim() == f.complex.ambient, ErrorCode::ValidationError,
          "pullback target dimension mismatch");
  int src = m.source_dim();
  require(src >= 1 && src <= 3, ErrorCode::ValidationError,
          "pullback source dimension out of range");
  require(int(lo.size()) == src && int(hi.size()) == src, ErrorCode::ValidationError,
          "window dimension mismatch");
  for (int a = 0; a < src; ++a)
    require(lo[a] < hi[a], ErrorCode::ValidationError, "empty pullback window");
  CarveSet planes;
  {
    CarveSet target_planes;
    carve_cf(f, &target_planes);
    for (const auto& h : target_planes) {
      RVec nn = mat_apply(transpose(m.a), h.normal);
      if (is_zero(nn)) continue;
      planes.insert(canonical_hyperplane(std::move(nn), h.offset - dot(h.normal, m.t)));
    }
  }
  SimplicialComplex refined = arrangement_complex(src, planes, lo, hi);
  detail::PreparedCF pf = detail::prepare_cf(f);
  return assemble_cf(refined,
                     [&](const RVec& x) { return evaluate(pf, apply_map(m, x)); });
}

// Restriction of f to an affine subspace, written in the subspace's own
// coordinates: the pullback along the embedding of those coordinates.
inline StratifiedCF slice(const StratifiedCF& f, const AffineSubspace& s) {
  require(s.ambient() == f.complex.ambient, ErrorCode::ValidationError,
          "slice subspace ambient mismatch");
  require(s.dim() >= 1, ErrorCode::ValidationError, "slice needs positive dimension");
  AffineMap e;
  e.t = s.point;
  e.a.assign(s.ambient(), RVec(s.dim(), Rational(0)));
  for (int j = 0; j < s.dim(); ++j)
    for (int i = 0; i < s.ambient(); ++i) e.a[i][j] = s.basis[j][i];
  return pullback(f, e);
}

// Integration along the fibers: pushforward(f, m)(y) is the Euler integral of
// f restricted to m^{-1}(y). Target dimension is capped at two.
inline StratifiedCF pushforward(const StratifiedCF& f, const AffineMap& m) {
  validate_map(m);
  require(m.source_dim() == f.complex.ambient, ErrorCode::ValidationError,
          "pushforward source dimension mismatch");
  int tgt = m.target_dim();
  require(tgt <= 2, ErrorCode::DimensionCapExceeded,
          "pushforward target dimension above two");
  if (f.complex.cells.empty()) return detail::empty_cf(tgt);

  int r = rank(m.a);
  if (r < tgt) {
    // The image is a proper affine subspace: push onto its coordinates and
    // embed the result back.
    if (r == 0) {
      long long w = euler_integral(f);
      if (w == 0) return detail::empty_cf(tgt);
      return build_complex(tgt, {m.t}, {{{0}, w}});
    }
    AffineSubspace img = map_image(m);
    RMat b = img.basis;
    RMat left = mat_mul(mat_inverse(mat_mul(b, transpose(b))), b);
    AffineMap g{mat_mul(left, m.a), mat_apply(left, vec_sub(m.t, img.point))};
    StratifiedCF inner = pushforward(f, g);
    AffineMap embed;
    embed.t = img.point;
    embed.a.assign(tgt, RVec(r, Rational(0)));
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < tgt; ++i) embed.a[i][j] = b[j][i];
    return detail::map_vertices(inner, embed);
  }

  // Surjective case. The fiber integral is constant on open cells of the
  // arrangement generated by the degenerate cell images: supporting lines of
  // segment images plus axis lines through point images (every boundary edge
  // of a two-dimensional cell image is itself the image of an edge cell, so
  // two-dimensional images contribute nothing extra).
  CarveSet planes;
  std::vector<RVec> images;
  for (const auto& v : f.complex.verts) images.push_back(apply_map(m, v));
  if (tgt == 1) {
    for (const auto& y : images)
      planes.insert(canonical_hyperplane({Rational(1)}, y[0]));
  } else {
    for (const auto& cell : f.complex.cells) {
      std::vector<RVec> pts;
      for (int i : cell) pts.push_back(images[i]);
      ConvexPolytope p = make_hull(2, std::move(pts));
      int d = dim(p);
      if (d == 1) {
        planes.insert(hrep(p).equalities[0]);
      } else if (d == 0) {
        planes.insert(canonical_hyperplane({Rational(1), Rational(0)}, p.verts[0][0]));
        planes.insert(canonical_hyperplane({Rational(0), Rational(1)}, p.verts[0][1]));
      }
    }
  }
  RVec lo, hi;
  detail::margin_box(tgt, {&images}, &lo, &hi);
  SimplicialComplex refined = arrangement_complex(tgt, planes, lo, hi);

  struct WeightedCellGeom {
    long long weight;
    ConvexPolytope poly;
    detail::PreparedCell relint;
  };
  std::vector<WeightedCellGeom> cells;
  for (size_t c = 0; c < f.complex.cells.size(); ++c) {
    if (f.weights[c] == 0) continue;
    WeightedCellGeom wc;
    wc.weight = f.weights[c];
    wc.poly = cell_polytope(f.complex, f.complex.cells[c]);
    HRep h = hrep(wc.poly);
    wc.relint.weight = wc.weight;
    detail::bbox_of(wc.poly.verts, &wc.relint.lo, &wc.relint.hi);
    wc.relint.eqs = std::move(h.equalities);
    wc.relint.strict = std::move(h.inequalities);
    cells.push_back(std::move(wc));
  }
  RMat fiber_dirs = kernel_basis(m.a);

  return assemble_cf(refined, [&](const RVec& y) {
    auto xp = solve(m.a, vec_sub(y, m.t));
    AffineSubspace fiber{*xp, fiber_dirs};
    long long total = 0;
    for (const auto& wc : cells) {
      auto meet = intersect(wc.poly, fiber);
      if (!meet) continue;
      RVec s = relint_point(*meet);
      if (!detail::relint_holds(wc.relint, s)) continue;
      total += (dim(*meet) % 2 == 0) ? wc.weight : -wc.weight;
    }
    return total;
  });
}

enum class ConvolveMode { kConvexBilinear, kBruteForce };

// Convolution with respect to Minkowski sum. The bilinear route expands both
// sides into closed convex terms, convolves termwise via
// 1_P * 1_Q = 1_{P + Q}, and re-stratifies. The brute-force route computes
// the defining fiber integrals through an exterior product and a pushforward
// along addition; it exists as an independent cross-check and is restricted
// to one dimension, where that pipeline stays exact and cheap.
inline StratifiedCF convolve(const StratifiedCF& f, const StratifiedCF& g,
                             ConvolveMode mode = ConvolveMode::kConvexBilinear) {
  int n = f.complex.ambient;
  require(n == g.complex.ambient, ErrorCode::ValidationError,
          "convolution ambient dimension mismatch");
  if (mode == ConvolveMode::kBruteForce) {
    require(n == 1, ErrorCode::ValidationError,
            "brute-force convolution works in one dimension only");
    StratifiedCF ext = exterior_product(f, g);
    AffineMap add;
    add.a = {{Rational(1), Rational(1)}};
    add.t = {Rational(0)};
    return pushforward(ext, add);
  }
  PolytopeCombination pf = to_polytope_combination(f);
  PolytopeCombination pg = to_polytope_combination(g);
  PolytopeCombination out;
  out.ambient = n;
  for (const auto& a : pf.terms)
    for (const auto& b : pg.terms)
      out.terms.push_back({minkowski_sum(a.poly, b.poly), a.weight * b.weight});
  return from_polytopes(out);
}

}  // namespace eulerkin
