#pragma once

// Exact convex polytopes in R^1..R^3, stored as canonical vertex sets
// (lex-sorted extreme points). Everything here is exact rational arithmetic;
// the float pipeline used by Monte Carlo rotation averages lives elsewhere.

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "eulerkin/error.hpp"
#include "eulerkin/linalg.hpp"

namespace eulerkin {

struct AffineSubspace {
  RVec point;
  std::vector<RVec> basis;  // linearly independent; empty for a single point

  int ambient() const { return int(point.size()); }
  int dim() const { return int(basis.size()); }
};

// Affine hull with a deterministic basis: base point is the lex-min input
// point, basis rows come from the reduced row echelon form of the differences.
inline AffineSubspace affine_hull(const std::vector<RVec>& pts) {
  AffineSubspace s;
  s.point = *std::min_element(pts.begin(), pts.end(), lex_less);
  RMat diffs;
  for (const auto& p : pts)
    if (p != s.point) diffs.push_back(vec_sub(p, s.point));
  if (!diffs.empty()) {
    Rref rr = rref(std::move(diffs));
    for (size_t k = 0; k < rr.pivot_cols.size(); ++k) s.basis.push_back(rr.m[k]);
  }
  return s;
}

inline RVec subspace_point(const AffineSubspace& s, const RVec& t) {
  RVec x = s.point;
  for (size_t j = 0; j < s.basis.size(); ++j)
    x = vec_add(x, vec_scale(t[j], s.basis[j]));
  return x;
}

// Coordinates of x within s, or nullopt when x is off the subspace.
inline std::optional<RVec> subspace_coords(const AffineSubspace& s, const RVec& x) {
  size_t n = s.point.size(), d = s.basis.size();
  RMat m(n, RVec(d, Rational(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < d; ++j) m[i][j] = s.basis[j][i];
  RVec rhs = vec_sub(x, s.point);
  auto t = solve(m, rhs);
  if (!t) return std::nullopt;
  if (subspace_point(s, *t) != x) return std::nullopt;  // inconsistent overdetermined
  return t;
}

inline std::optional<AffineSubspace> intersect(const AffineSubspace& a,
                                               const AffineSubspace& b) {
  size_t n = a.point.size();
  size_t da = a.basis.size(), db = b.basis.size();
  // Solve a.point + A s = b.point + B t.
  RMat m(n, RVec(da + db, Rational(0)));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < da; ++j) m[i][j] = a.basis[j][i];
    for (size_t j = 0; j < db; ++j) m[i][da + j] = -b.basis[j][i];
  }
  auto st = solve(m, vec_sub(b.point, a.point));
  if (!st) return std::nullopt;
  AffineSubspace r;
  r.point = a.point;
  for (size_t j = 0; j < da; ++j)
    r.point = vec_add(r.point, vec_scale((*st)[j], a.basis[j]));
  // Direction space: {A u : A u = B w} from the kernel of [A | -B].
  RMat dirs;
  for (const auto& k : kernel_basis(m)) {
    RVec v(n, Rational(0));
    for (size_t j = 0; j < da; ++j) v = vec_add(v, vec_scale(k[j], a.basis[j]));
    if (!is_zero(v)) dirs.push_back(v);
  }
  if (!dirs.empty()) {
    Rref rr = rref(std::move(dirs));
    for (size_t k = 0; k < rr.pivot_cols.size(); ++k) r.basis.push_back(rr.m[k]);
  }
  return r;
}

// n . x <= c
struct Halfspace {
  RVec normal;
  Rational offset;
};

// n . x = c, canonical: primitive integer coefficients, first nonzero of the
// normal positive. Canonical form makes hyperplanes set-comparable.
struct Hyperplane {
  RVec normal;
  Rational offset;

  friend bool operator==(const Hyperplane& a, const Hyperplane& b) {
    return a.normal == b.normal && a.offset == b.offset;
  }
  friend bool operator<(const Hyperplane& a, const Hyperplane& b) {
    if (a.normal != b.normal) return std::lexicographical_compare(
        a.normal.begin(), a.normal.end(), b.normal.begin(), b.normal.end());
    return a.offset < b.offset;
  }
};

// Scales (n, c) so all entries are integers with gcd 1; sign rule as above.
inline Hyperplane canonical_hyperplane(RVec n, Rational c) {
  Integer l = 1;
  for (const auto& x : n) l = lcm(l, denominator(x));
  l = lcm(l, denominator(c));
  Integer g = 0;
  auto acc = [&](const Rational& x) { g = gcd(g, Integer(numerator(x) * (l / denominator(x)))); };
  for (const auto& x : n) acc(x);
  acc(c);
  if (g == 0) g = 1;
  Rational f = make_rational(l, g);
  int s = 0;
  for (const auto& x : n)
    if (x != 0) {
      s = sign(x);
      break;
    }
  if (s < 0) f = -f;
  for (auto& x : n) x *= f;
  return {std::move(n), c * f};
}

inline Rational eval(const Halfspace& h, const RVec& x) {
  return dot(h.normal, x) - h.offset;
}
inline Rational eval(const Hyperplane& h, const RVec& x) {
  return dot(h.normal, x) - h.offset;
}

struct HRep {
  std::vector<Hyperplane> equalities;
  std::vector<Halfspace> inequalities;
};

struct ConvexPolytope {
  int ambient = 0;
  std::vector<RVec> verts;  // canonical: lex-sorted extreme points, nonempty

  friend bool operator==(const ConvexPolytope& a, const ConvexPolytope& b) {
    return a.ambient == b.ambient && a.verts == b.verts;
  }
  friend bool operator<(const ConvexPolytope& a, const ConvexPolytope& b) {
    return a.verts < b.verts;
  }
};

namespace detail {

// Exact 2D convex hull (monotone chain) on projected coordinates; returns the
// extreme points only, in counterclockwise order of the projection. Strict
// turn test drops collinear mid-edge points. Input must be sorted and unique.
inline std::vector<size_t> chain_hull_2d(const std::vector<std::array<Rational, 2>>& q) {
  size_t n = q.size();
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return q[a] < q[b]; });
  auto cross = [&](size_t o, size_t a, size_t b) {
    return (q[a][0] - q[o][0]) * (q[b][1] - q[o][1]) -
           (q[a][1] - q[o][1]) * (q[b][0] - q[o][0]);
  };
  std::vector<size_t> h(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {  // lower hull
    while (k >= 2 && cross(h[k - 2], h[k - 1], idx[i]) <= 0) --k;
    h[k++] = idx[i];
  }
  for (size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper hull
    while (k >= t && cross(h[k - 2], h[k - 1], idx[i]) <= 0) --k;
    h[k++] = idx[i];
  }
  h.resize(k - 1);  // last point repeats the first
  return h;
}

}  // namespace detail

// Convex hull: reduces an arbitrary nonempty point set to its extreme points.
inline ConvexPolytope make_hull(int ambient, std::vector<RVec> pts) {
  require(!pts.empty(), ErrorCode::ValidationError, "hull of empty point set");
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  AffineSubspace aff = affine_hull(pts);
  int d = aff.dim();
  ConvexPolytope p;
  p.ambient = ambient;
  if (d == 0) {
    p.verts = {pts[0]};
    return p;
  }

  // Project to the pivot coordinates of the basis: a linear bijection on the
  // affine hull, so extreme points are preserved.
  RMat bm = aff.basis;
  std::vector<int> piv = rref(bm).pivot_cols;

  if (d == 1) {
    int j = piv[0];
    auto cmp = [&](const RVec& a, const RVec& b) { return a[j] < b[j]; };
    RVec lo = *std::min_element(pts.begin(), pts.end(), cmp);
    RVec hi = *std::max_element(pts.begin(), pts.end(), cmp);
    p.verts = {lo, hi};
  } else if (d == 2) {
    std::vector<std::array<Rational, 2>> q;
    q.reserve(pts.size());
    for (const auto& v : pts) q.push_back({v[piv[0]], v[piv[1]]});
    for (size_t i : detail::chain_hull_2d(q)) p.verts.push_back(pts[i]);
    std::sort(p.verts.begin(), p.verts.end(), lex_less);
  } else {
    // d == 3: enumerate supporting planes from point triples, then keep the
    // points whose tight plane normals span R^3.
    size_t m = pts.size();
    std::vector<Halfspace> planes;
    std::map<Hyperplane, bool> seen;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = i + 1; j < m; ++j)
        for (size_t k = j + 1; k < m; ++k) {
          RVec n = cross3(vec_sub(pts[j], pts[i]), vec_sub(pts[k], pts[i]));
          if (is_zero(n)) continue;
          Rational c = dot(n, pts[i]);
          Hyperplane key = canonical_hyperplane(n, c);
          if (seen.count(key)) continue;
          bool lo = false, hi = false;
          for (const auto& v : pts) {
            int s = sign(dot(n, v) - c);
            lo |= s < 0;
            hi |= s > 0;
            if (lo && hi) break;
          }
          seen[key] = true;
          if (lo && hi) continue;
          if (hi) {
            n = vec_scale(Rational(-1), n);
            c = -c;
          }
          planes.push_back({std::move(n), std::move(c)});
        }
    for (const auto& v : pts) {
      RMat tight;
      for (const auto& h : planes)
        if (dot(h.normal, v) == h.offset) tight.push_back(h.normal);
      if (tight.size() >= 3 && rank(tight) == 3) p.verts.push_back(v);
    }
    std::sort(p.verts.begin(), p.verts.end(), lex_less);
  }
  return p;
}

inline AffineSubspace affine_hull(const ConvexPolytope& p) {
  return affine_hull(p.verts);
}

inline int dim(const ConvexPolytope& p) { return affine_hull(p).dim(); }

// Relative-interior point: the vertex average.
inline RVec relint_point(const ConvexPolytope& p) {
  RVec c(p.ambient, Rational(0));
  for (const auto& v : p.verts) c = vec_add(c, v);
  return vec_scale(make_rational(1, Integer(p.verts.size())), c);
}

namespace detail {

// Cyclic order of coplanar points around their centroid; exact angular sort
// in the projected pivot coordinates. Input points must be the vertices of a
// convex polygon (dim 2).
inline std::vector<size_t> polygon_cycle(const std::vector<RVec>& verts) {
  AffineSubspace aff = affine_hull(verts);
  RMat bm = aff.basis;
  std::vector<int> piv = rref(bm).pivot_cols;
  std::vector<std::array<Rational, 2>> q;
  std::array<Rational, 2> c{Rational(0), Rational(0)};
  for (const auto& v : verts) {
    q.push_back({v[piv[0]], v[piv[1]]});
    c[0] += q.back()[0];
    c[1] += q.back()[1];
  }
  Rational inv = make_rational(1, Integer(verts.size()));
  c[0] *= inv;
  c[1] *= inv;
  for (auto& t : q) {
    t[0] -= c[0];
    t[1] -= c[1];
  }
  auto half = [](const std::array<Rational, 2>& v) {
    // 0 for angle in [0, pi), 1 for [pi, 2pi); vertex != centroid for a polygon
    return (v[1] < 0 || (v[1] == 0 && v[0] < 0)) ? 1 : 0;
  };
  std::vector<size_t> idx(verts.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    int ha = half(q[a]), hb = half(q[b]);
    if (ha != hb) return ha < hb;
    Rational cr = q[a][0] * q[b][1] - q[a][1] * q[b][0];
    return cr > 0;
  });
  return idx;
}

}  // namespace detail

// H-representation. Equalities pin the affine hull; inequalities cut facets
// within it. For a 0-dim polytope there are no inequalities.
inline HRep hrep(const ConvexPolytope& p) {
  HRep h;
  AffineSubspace aff = affine_hull(p.verts);
  int d = aff.dim();
  size_t n = p.ambient;
  {
    RMat rows;
    for (const auto& b : aff.basis) rows.push_back(b);
    if (rows.empty()) rows.push_back(RVec(n, Rational(0)));
    for (const auto& ker : kernel_basis(rows))
      h.equalities.push_back(canonical_hyperplane(ker, dot(ker, aff.point)));
  }
  if (d == 1) {
    const RVec& u = aff.basis[0];
    Rational lo = dot(u, p.verts[0]), hi = lo;
    for (const auto& v : p.verts) {
      Rational t = dot(u, v);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    h.inequalities.push_back({u, hi});
    h.inequalities.push_back({vec_scale(Rational(-1), u), -lo});
  } else if (d == 2) {
    std::vector<size_t> cyc = detail::polygon_cycle(p.verts);
    for (size_t i = 0; i < cyc.size(); ++i) {
      const RVec& a = p.verts[cyc[i]];
      const RVec& b = p.verts[cyc[(i + 1) % cyc.size()]];
      // In-plane outward normal: solve for an ambient functional vanishing on
      // the edge direction and on the hull's normal directions, then orient.
      RMat rows;
      rows.push_back(vec_sub(b, a));
      RMat basis_rows = aff.basis;
      for (const auto& ker : kernel_basis(basis_rows))
        rows.push_back(ker);  // directions off the hull plane
      auto kb = kernel_basis(rows);
      // rows has rank n-1, so the kernel is one line.
      RVec normal = kb.at(0);
      Rational c = dot(normal, a);
      bool flip = false;
      for (const auto& v : p.verts)
        if (dot(normal, v) > c) {
          flip = true;
          break;
        }
      if (flip) {
        normal = vec_scale(Rational(-1), normal);
        c = -c;
      }
      h.inequalities.push_back({std::move(normal), std::move(c)});
    }
  } else if (d == 3) {
    size_t m = p.verts.size();
    std::map<Hyperplane, bool> seen;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = i + 1; j < m; ++j)
        for (size_t k = j + 1; k < m; ++k) {
          RVec nrm = cross3(vec_sub(p.verts[j], p.verts[i]),
                            vec_sub(p.verts[k], p.verts[i]));
          if (is_zero(nrm)) continue;
          Rational c = dot(nrm, p.verts[i]);
          Hyperplane key = canonical_hyperplane(nrm, c);
          if (seen.count(key)) continue;
          bool lo = false, hi = false;
          for (const auto& v : p.verts) {
            int s = sign(dot(nrm, v) - c);
            lo |= s < 0;
            hi |= s > 0;
            if (lo && hi) break;
          }
          seen[key] = true;
          if (lo && hi) continue;
          if (hi) {
            nrm = vec_scale(Rational(-1), nrm);
            c = -c;
          }
          h.inequalities.push_back({std::move(nrm), std::move(c)});
        }
  }
  return h;
}

inline bool contains(const HRep& h, const RVec& x) {
  for (const auto& e : h.equalities)
    if (eval(e, x) != 0) return false;
  for (const auto& q : h.inequalities)
    if (eval(q, x) > 0) return false;
  return true;
}

inline bool relint_contains(const HRep& h, const RVec& x) {
  for (const auto& e : h.equalities)
    if (eval(e, x) != 0) return false;
  for (const auto& q : h.inequalities)
    if (eval(q, x) >= 0) return false;
  return true;
}

inline bool contains(const ConvexPolytope& p, const RVec& x) {
  return contains(hrep(p), x);
}

inline bool relint_contains(const ConvexPolytope& p, const RVec& x) {
  return relint_contains(hrep(p), x);
}

// All faces by dimension: faces[k] holds each k-face as a sorted list of
// indices into p.verts. faces[dim] is the polytope itself; faces[0] the
// vertices. The improper empty face is not listed.
inline std::vector<std::vector<std::vector<int>>> face_lattice(const ConvexPolytope& p) {
  int d = dim(p);
  std::vector<std::vector<std::vector<int>>> faces(d + 1);
  std::vector<int> all(p.verts.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = int(i);
  faces[d].push_back(all);
  if (d == 0) return faces;

  // Recursively split facet vertex sets. A facet of a face is computed inside
  // the face's own hull, then mapped back to p's indices.
  auto facet_sets = [](const ConvexPolytope& q) {
    std::vector<std::vector<int>> out;
    HRep h = hrep(q);
    for (const auto& ineq : h.inequalities) {
      std::vector<int> tight;
      for (size_t i = 0; i < q.verts.size(); ++i)
        if (eval(ineq, q.verts[i]) == 0) tight.push_back(int(i));
      out.push_back(std::move(tight));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  std::vector<std::vector<int>> level = {all};
  for (int k = d; k >= 1; --k) {
    std::vector<std::vector<int>> next;
    for (const auto& face : level) {
      ConvexPolytope q;
      q.ambient = p.ambient;
      for (int i : face) q.verts.push_back(p.verts[i]);
      for (const auto& sub : facet_sets(q)) {
        std::vector<int> mapped;
        for (int i : sub) mapped.push_back(face[i]);
        std::sort(mapped.begin(), mapped.end());
        next.push_back(std::move(mapped));
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    faces[k - 1] = next;
    level = std::move(next);
  }
  return faces;
}

// Vertices of the H-polytope {t in R^k : ineqs} by basis enumeration. The
// polytope must be bounded; returns the empty vector when infeasible.
inline std::vector<RVec> hpoly_vertices(int k, const std::vector<Halfspace>& ineqs) {
  std::vector<RVec> out;
  if (k == 0) {
    RVec origin;
    for (const auto& q : ineqs)
      if (q.offset < 0) return out;
    out.push_back(origin);
    return out;
  }
  size_t m = ineqs.size();
  auto feasible = [&](const RVec& t) {
    for (const auto& q : ineqs)
      if (eval(q, t) > 0) return false;
    return true;
  };
  // Enumerate k-subsets of constraints.
  std::vector<int> stack;
  auto rec = [&](auto&& self, size_t start) -> void {
    if (int(stack.size()) == k) {
      RMat a;
      RVec b;
      for (int i : stack) {
        a.push_back(ineqs[i].normal);
        b.push_back(ineqs[i].offset);
      }
      if (rank(a) != k) return;
      auto t = solve(a, b);
      if (t && feasible(*t)) out.push_back(*t);
      return;
    }
    for (size_t i = start; i < m; ++i) {
      stack.push_back(int(i));
      self(self, i + 1);
      stack.pop_back();
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end(), lex_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

// Pulls the h-rep of p into coordinates of a subspace lying inside p's
// ambient space: x = q0 + C t, constraint n.x <= c becomes (n.C) t <= c - n.q0.
inline void append_constraints_in_coords(const ConvexPolytope& p,
                                         const AffineSubspace& sub,
                                         std::vector<Halfspace>* out,
                                         bool* maybe_empty) {
  HRep h = hrep(p);
  for (const auto& e : h.equalities) {
    RVec g(sub.dim(), Rational(0));
    for (int j = 0; j < sub.dim(); ++j) g[j] = dot(e.normal, sub.basis[j]);
    Rational rhs = e.offset - dot(e.normal, sub.point);
    if (is_zero(g)) {
      if (rhs != 0) *maybe_empty = true;
      continue;
    }
    out->push_back({g, rhs});
    out->push_back({vec_scale(Rational(-1), g), -rhs});
  }
  for (const auto& q : h.inequalities) {
    RVec g(sub.dim(), Rational(0));
    for (int j = 0; j < sub.dim(); ++j) g[j] = dot(q.normal, sub.basis[j]);
    Rational rhs = q.offset - dot(q.normal, sub.point);
    if (is_zero(g)) {
      if (rhs < 0) *maybe_empty = true;
      continue;
    }
    out->push_back({g, rhs});
  }
}

}  // namespace detail

// p intersected with an affine subspace, as a polytope in ambient coords.
inline std::optional<ConvexPolytope> intersect(const ConvexPolytope& p,
                                               const AffineSubspace& s) {
  auto meet = intersect(affine_hull(p), s);
  if (!meet) return std::nullopt;
  bool empty = false;
  std::vector<Halfspace> cons;
  detail::append_constraints_in_coords(p, *meet, &cons, &empty);
  if (empty) return std::nullopt;
  std::vector<RVec> ts = hpoly_vertices(meet->dim(), cons);
  if (ts.empty()) return std::nullopt;
  std::vector<RVec> pts;
  for (const auto& t : ts) pts.push_back(subspace_point(*meet, t));
  return make_hull(p.ambient, std::move(pts));
}

inline std::optional<ConvexPolytope> intersect(const ConvexPolytope& p,
                                               const ConvexPolytope& q) {
  auto meet = intersect(affine_hull(p), affine_hull(q));
  if (!meet) return std::nullopt;
  bool empty = false;
  std::vector<Halfspace> cons;
  detail::append_constraints_in_coords(p, *meet, &cons, &empty);
  detail::append_constraints_in_coords(q, *meet, &cons, &empty);
  if (empty) return std::nullopt;
  std::vector<RVec> ts = hpoly_vertices(meet->dim(), cons);
  if (ts.empty()) return std::nullopt;
  std::vector<RVec> pts;
  for (const auto& t : ts) pts.push_back(subspace_point(*meet, t));
  return make_hull(p.ambient, std::move(pts));
}

// Vertices of P + Q are among pairwise vertex sums.
inline ConvexPolytope minkowski_sum(const ConvexPolytope& p, const ConvexPolytope& q) {
  require(p.ambient == q.ambient, ErrorCode::ValidationError,
          "minkowski_sum: ambient dimensions differ");
  std::vector<RVec> sums;
  sums.reserve(p.verts.size() * q.verts.size());
  for (const auto& a : p.verts)
    for (const auto& b : q.verts) sums.push_back(vec_add(a, b));
  return make_hull(p.ambient, std::move(sums));
}

// Pulling triangulation: cone the lex-min vertex over the recursively pulled
// facets that avoid it. Restricted to any face it equals the pulling
// triangulation of that face, so it is consistent across a polyhedral complex
// as long as every cell uses the same (lexicographic) vertex order.
// Returns top-dimensional simplices as coordinate tuples.
inline std::vector<std::vector<RVec>> pulling_triangulation(const ConvexPolytope& p) {
  int d = dim(p);
  if (int(p.verts.size()) == d + 1) return {p.verts};
  const RVec& apex = p.verts[0];  // lex-min: verts are sorted
  std::vector<std::vector<RVec>> out;
  auto faces = face_lattice(p);
  for (const auto& facet : faces[d - 1]) {
    bool has_apex = false;
    for (int i : facet) has_apex |= p.verts[i] == apex;
    if (has_apex) continue;
    ConvexPolytope f;
    f.ambient = p.ambient;
    for (int i : facet) f.verts.push_back(p.verts[i]);
    for (auto s : pulling_triangulation(f)) {
      s.push_back(apex);
      std::sort(s.begin(), s.end(), lex_less);
      out.push_back(std::move(s));
    }
  }
  return out;
}

struct WeightedPolytope {
  ConvexPolytope poly;
  long long weight = 0;
};

// Finite integer combination sum_i w_i 1_{P_i} of closed convex polytopes.
// Canonical form merges equal polytopes and drops zero weights.
struct PolytopeCombination {
  int ambient = 0;
  std::vector<WeightedPolytope> terms;
};

inline PolytopeCombination canonicalize(PolytopeCombination pc) {
  std::map<ConvexPolytope, long long> acc;
  for (auto& t : pc.terms) acc[t.poly] += t.weight;
  pc.terms.clear();
  for (auto& [poly, w] : acc)
    if (w != 0) pc.terms.push_back({poly, w});
  return pc;
}

}  // namespace eulerkin
