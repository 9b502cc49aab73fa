#pragma once

// Intrinsic volumes of convex polytopes via external angles, and their
// additive extension to constructible functions. Normalization is classical:
// V_0 = Euler characteristic, V_1(segment) = length, V_n = Lebesgue volume.
//
// Two parallel paths:
//   - exact-vertex path: ConvexPolytope / PolytopeCombination / StratifiedCF
//     inputs with rational coordinates; face measures are computed from exact
//     data with a single final square root where one is unavoidable.
//   - float path: bodies moved by sampled rotations have irrational vertices,
//     so rigid images are carried as float coordinates and valuations are
//     evaluated with tolerance-based hulls (see float_hull_* below).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "eulerkin/error.hpp"
#include "eulerkin/polytope.hpp"
#include "eulerkin/simplicial.hpp"

namespace eulerkin {

// Values V_0..V_n for ambient dimension n.
struct IntrinsicVolumeVector {
  std::vector<double> values;
};

using FVec = std::vector<double>;
using FMat = std::vector<std::vector<double>>;

namespace detail {

inline double fdot(const FVec& a, const FVec& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline FVec fsub(const FVec& a, const FVec& b) {
  FVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline double fnorm(const FVec& a) { return std::sqrt(fdot(a, a)); }

inline FVec funit(FVec a) {
  double n = fnorm(a);
  for (auto& x : a) x /= n;
  return a;
}

inline FVec fcross(const FVec& a, const FVec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline FVec to_float(const RVec& v) {
  FVec r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = to_double(v[i]);
  return r;
}

// Angle between two outward facet normals; clamped acos guards roundoff.
inline double normal_angle(FVec n1, FVec n2) {
  double c = fdot(funit(std::move(n1)), funit(std::move(n2)));
  return std::acos(std::min(1.0, std::max(-1.0, c)));
}

// Solid angle of the convex cone spanned by the given outward unit vectors.
// The cone section is a spherically convex polygon inside an open hemisphere,
// so sorting the generators around an interior axis and fanning triangles is
// valid; each triangle contributes via the half-angle tangent formula.
inline double cone_solid_angle(std::vector<FVec> ns) {
  for (auto& n : ns) n = funit(std::move(n));
  FVec axis(3, 0.0);
  for (const auto& n : ns)
    for (int i = 0; i < 3; ++i) axis[i] += n[i];
  axis = funit(std::move(axis));
  FVec e1 = std::abs(axis[0]) < 0.9 ? FVec{1, 0, 0} : FVec{0, 1, 0};
  FVec tmp = fcross(axis, e1);
  e1 = funit(std::move(tmp));
  FVec e2 = fcross(axis, e1);
  std::sort(ns.begin(), ns.end(), [&](const FVec& a, const FVec& b) {
    return std::atan2(fdot(a, e2), fdot(a, e1)) <
           std::atan2(fdot(b, e2), fdot(b, e1));
  });
  double total = 0;
  for (size_t i = 1; i + 1 < ns.size(); ++i) {
    const FVec &a = ns[0], &b = ns[i], &c = ns[i + 1];
    double num = fdot(a, fcross(b, c));
    double den = 1.0 + fdot(a, b) + fdot(b, c) + fdot(c, a);
    total += 2.0 * std::atan2(num, den);
  }
  return std::abs(total);
}

// k-dimensional measure of a face given by exact vertices: counting measure
// for points, length for segments, area for planar polygons, volume for
// 3-polytopes. All arithmetic is rational except one final square root.
inline double face_measure(const ConvexPolytope& f) {
  int d = dim(f);
  if (d == 0) return 1.0;
  if (d == 1) {
    RVec e = vec_sub(f.verts.back(), f.verts.front());
    return std::sqrt(to_double(dot(e, e)));
  }
  if (d == 2) {
    std::vector<size_t> cyc = polygon_cycle(f.verts);
    if (f.ambient == 2) {
      Rational s = 0;
      for (size_t i = 1; i + 1 < cyc.size(); ++i) {
        RVec u = vec_sub(f.verts[cyc[i]], f.verts[cyc[0]]);
        RVec v = vec_sub(f.verts[cyc[i + 1]], f.verts[cyc[0]]);
        s += u[0] * v[1] - u[1] * v[0];
      }
      return std::abs(to_double(s)) / 2.0;
    }
    RVec s(3, Rational(0));
    for (size_t i = 1; i + 1 < cyc.size(); ++i) {
      RVec u = vec_sub(f.verts[cyc[i]], f.verts[cyc[0]]);
      RVec v = vec_sub(f.verts[cyc[i + 1]], f.verts[cyc[0]]);
      s = vec_add(s, cross3(u, v));
    }
    return std::sqrt(to_double(dot(s, s))) / 2.0;
  }
  Rational vol = 0;
  for (const auto& s : pulling_triangulation(f)) {
    RMat m;
    for (size_t i = 1; i < s.size(); ++i) m.push_back(vec_sub(s[i], s[0]));
    vol += abs(det(m));
  }
  return to_double(vol) / 6.0;
}

// Normalized external angle of the face spanned by `face` (vertex indices
// into p.verts), dispatched on codimension within the affine hull of p. The
// inequality systems of hrep(p) carry the outward facet normals: for a
// 2-polytope they lie in the hull plane, so codimension-2 angles are read
// off the two facets tight on the face in every dimension.
inline double face_angle(const ConvexPolytope& p, const HRep& h, int dim_p,
                         const std::vector<int>& face) {
  ConvexPolytope f;
  f.ambient = p.ambient;
  for (int i : face) f.verts.push_back(p.verts[i]);
  int codim = dim_p - dim(f);
  if (codim == 0) return 1.0;
  if (codim == 1) return 0.5;
  std::vector<FVec> tight;
  for (const auto& ineq : h.inequalities) {
    bool all = true;
    for (int i : face) all = all && eval(ineq, p.verts[i]) == 0;
    if (all) tight.push_back(to_float(ineq.normal));
  }
  if (codim == 2) {
    require(tight.size() == 2, ErrorCode::ValidationError,
            "face_angle: codimension-2 face not on exactly two facets");
    return normal_angle(tight[0], tight[1]) / (2.0 * std::numbers::pi);
  }
  require(tight.size() >= 3, ErrorCode::ValidationError,
          "face_angle: vertex of a 3-polytope has fewer than three facets");
  return cone_solid_angle(std::move(tight)) / (4.0 * std::numbers::pi);
}

}  // namespace detail

// Fraction of directions in the normal space of f whose support set is
// exactly f. Requires f to be a face of p.
inline double external_angle(const ConvexPolytope& p, const ConvexPolytope& f) {
  require(p.ambient == f.ambient, ErrorCode::NotAFace,
          "external_angle: ambient dimensions differ");
  auto faces = face_lattice(p);
  for (const auto& level : faces)
    for (const auto& face : level) {
      ConvexPolytope g;
      g.ambient = p.ambient;
      for (int i : face) g.verts.push_back(p.verts[i]);
      if (g == f) return detail::face_angle(p, hrep(p), dim(p), face);
    }
  fail(ErrorCode::NotAFace, "external_angle: not a face of the polytope");
}

// V_k(p) = sum over k-faces of (k-volume of face) x (external angle).
inline IntrinsicVolumeVector intrinsic_volumes(const ConvexPolytope& p) {
  IntrinsicVolumeVector out{std::vector<double>(p.ambient + 1, 0.0)};
  auto faces = face_lattice(p);
  HRep h = hrep(p);
  int d = dim(p);
  for (size_t k = 0; k < faces.size(); ++k)
    for (const auto& face : faces[k]) {
      ConvexPolytope f;
      f.ambient = p.ambient;
      for (int i : face) f.verts.push_back(p.verts[i]);
      out.values[k] += detail::face_measure(f) * detail::face_angle(p, h, d, face);
    }
  return out;
}

// Additive extension: V_k(sum_i w_i 1_{P_i}) = sum_i w_i V_k(P_i).
inline double evaluate_valuation(int k, const PolytopeCombination& pc) {
  require(k >= 0 && k <= pc.ambient, ErrorCode::OutOfRange,
          "evaluate_valuation: index outside 0..ambient");
  double total = 0;
  for (const auto& t : pc.terms)
    total += double(t.weight) * intrinsic_volumes(t.poly).values[k];
  return total;
}

inline double evaluate_valuation(int k, const StratifiedCF& cf) {
  return evaluate_valuation(k, to_polytope_combination(cf));
}

// ---------------------------------------------------------------------------
// Float path. Rotation samples have irrational entries, so rigid images are
// stored as float vertices; combinatorics of the underlying complex is
// unchanged and all geometric predicates below use tolerance kHullTol.

inline constexpr double kHullTol = 1e-9;

// A stratified function whose vertices were moved by a float rigid motion:
// exact cells and weights, float coordinates.
struct FloatCF {
  StratifiedCF base;
  std::vector<FVec> verts;
};

namespace detail {

// Intrinsic volumes of a float simplex (affinely independent vertices),
// closed-form per dimension; ambient <= 3.
inline std::vector<double> simplex_mu(int ambient, const std::vector<FVec>& v) {
  std::vector<double> mu(ambient + 1, 0.0);
  mu[0] = 1.0;
  size_t m = v.size();
  if (m == 1) return mu;
  if (m == 2) {
    mu[1] = fnorm(fsub(v[1], v[0]));
    return mu;
  }
  auto edge = [&](size_t i, size_t j) { return fnorm(fsub(v[j], v[i])); };
  if (m == 3) {
    mu[1] = (edge(0, 1) + edge(0, 2) + edge(1, 2)) / 2.0;
    FVec a = fsub(v[1], v[0]), b = fsub(v[2], v[0]);
    if (ambient == 2) {
      mu[2] = std::abs(a[0] * b[1] - a[1] * b[0]) / 2.0;
    } else {
      mu[2] = fnorm(fcross(a, b)) / 2.0;
    }
    return mu;
  }
  // Tetrahedron: edge terms need dihedral angles from outward facet normals.
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      int c = -1, d = -1;
      for (int t = 0; t < 4; ++t)
        if (t != i && t != j) (c < 0 ? c : d) = t;
      FVec e = fsub(v[j], v[i]);
      FVec n1 = fcross(e, fsub(v[c], v[i]));
      if (fdot(n1, fsub(v[d], v[i])) > 0)
        for (auto& x : n1) x = -x;
      FVec n2 = fcross(e, fsub(v[d], v[i]));
      if (fdot(n2, fsub(v[c], v[i])) > 0)
        for (auto& x : n2) x = -x;
      mu[1] += edge(i, j) * normal_angle(n1, n2) / (2.0 * std::numbers::pi);
    }
  for (int skip = 0; skip < 4; ++skip) {
    std::vector<FVec> f;
    for (int t = 0; t < 4; ++t)
      if (t != skip) f.push_back(v[t]);
    mu[2] += fnorm(fcross(fsub(f[1], f[0]), fsub(f[2], f[0]))) / 4.0;
  }
  FVec a = fsub(v[1], v[0]), b = fsub(v[2], v[0]), c = fsub(v[3], v[0]);
  mu[3] = std::abs(fdot(a, fcross(b, c))) / 6.0;
  return mu;
}

}  // namespace detail

// Applies x -> Rx + t with float R, t to every vertex; cells and weights are
// untouched. R must be orthogonal within 1e-12.
inline FloatCF rigid_motion_apply(const FMat& r, const FVec& t,
                                  const StratifiedCF& cf) {
  size_t n = cf.complex.ambient;
  require(r.size() == n && t.size() == n, ErrorCode::ValidationError,
          "rigid_motion_apply: dimension mismatch");
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      double s = 0;
      for (size_t k = 0; k < n; ++k) s += r[k][i] * r[k][j];
      require(std::abs(s - (i == j ? 1.0 : 0.0)) <= 1e-12,
              ErrorCode::NotOrthogonal,
              "rigid_motion_apply: matrix is not orthogonal");
    }
  FloatCF out{cf, {}};
  out.verts.reserve(cf.complex.verts.size());
  for (const auto& v : cf.complex.verts) {
    FVec x(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
      x[i] = t[i];
      for (size_t j = 0; j < n; ++j) x[i] += r[i][j] * to_double(v[j]);
    }
    out.verts.push_back(std::move(x));
  }
  return out;
}

// Additive extension on a moved function: each open cell expands into closed
// faces with alternating signs (the indicator of a relatively open simplex is
// the alternating sum of its closed faces), and every face is itself a float
// simplex with closed-form intrinsic volumes.
inline double evaluate_valuation(int k, const FloatCF& f) {
  int n = f.base.complex.ambient;
  require(k >= 0 && k <= n, ErrorCode::OutOfRange,
          "evaluate_valuation: index outside 0..ambient");
  double total = 0;
  for (size_t ci = 0; ci < f.base.complex.cells.size(); ++ci) {
    long long w = f.base.weights[ci];
    if (w == 0) continue;
    const auto& cell = f.base.complex.cells[ci];
    int m = int(cell.size());
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
      std::vector<FVec> verts;
      for (int b = 0; b < m; ++b)
        if (mask & (1u << b)) verts.push_back(f.verts[cell[b]]);
      int sgn = ((m - int(verts.size())) % 2 == 0) ? 1 : -1;
      total += double(w) * sgn * detail::simplex_mu(n, verts)[k];
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Tolerance-based hulls for float point sets (Minkowski sums of rotated
// bodies). Degenerate outputs signal the caller to resample the rotation.

struct FloatHull2 {
  std::vector<FVec> cycle;  // counterclockwise extreme points
  bool degenerate = false;
};

// Monotone chain with a relative collinearity tolerance.
inline FloatHull2 float_hull_2d(std::vector<FVec> pts, double tol = kHullTol) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](const FVec& a, const FVec& b) {
                          return std::abs(a[0] - b[0]) <= tol &&
                                 std::abs(a[1] - b[1]) <= tol;
                        }),
            pts.end());
  FloatHull2 h;
  if (pts.size() < 3) {
    h.cycle = pts;
    h.degenerate = true;
    return h;
  }
  auto turn = [&](const FVec& a, const FVec& b, const FVec& c) {
    double cr = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    double scale = detail::fnorm(detail::fsub(b, a)) *
                   detail::fnorm(detail::fsub(c, b));
    return cr > tol * std::max(1.0, scale) ? 1
           : cr < -tol * std::max(1.0, scale) ? -1
                                              : 0;
  };
  std::vector<FVec> lo, hi;
  for (const auto& p : pts) {
    while (lo.size() >= 2 && turn(lo[lo.size() - 2], lo.back(), p) <= 0)
      lo.pop_back();
    lo.push_back(p);
    while (hi.size() >= 2 && turn(hi[hi.size() - 2], hi.back(), p) >= 0)
      hi.pop_back();
    hi.push_back(p);
  }
  h.cycle = lo;
  for (size_t i = hi.size() - 1; i-- > 1;) h.cycle.push_back(hi[i]);
  if (h.cycle.size() < 3) h.degenerate = true;
  return h;
}

struct FloatFacet {
  std::vector<int> cycle;  // vertex indices, counterclockwise from outside
  FVec unit_normal;
  double offset = 0;  // unit_normal . x = offset on the facet plane
};

struct FloatHull3 {
  std::vector<FVec> verts;  // extreme points
  std::vector<FloatFacet> facets;
  std::vector<std::array<int, 2>> edges;        // sorted vertex index pairs
  std::vector<std::array<int, 2>> edge_facets;  // adjacent facets per edge
  bool degenerate = false;
};

// Supporting-plane enumeration over point triples, deduplicated by tight
// vertex set. Intended for the modest point counts of pairwise Minkowski
// vertex sums; flags non-generic inputs instead of guessing.
inline FloatHull3 float_hull_3d(std::vector<FVec> pts, double tol = kHullTol) {
  using detail::fcross;
  using detail::fdot;
  using detail::fnorm;
  using detail::fsub;
  using detail::funit;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  FloatHull3 h;
  size_t n = pts.size();
  double scale = 0;
  for (const auto& p : pts)
    for (double x : p) scale = std::max(scale, std::abs(x));
  double eps = tol * std::max(1.0, scale);
  std::map<std::vector<int>, std::pair<FVec, double>> planes;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      for (size_t k = j + 1; k < n; ++k) {
        FVec nrm = fcross(fsub(pts[j], pts[i]), fsub(pts[k], pts[i]));
        double len = fnorm(nrm);
        if (len <= eps * eps) continue;
        for (auto& x : nrm) x /= len;
        double off = fdot(nrm, pts[i]);
        bool above = false, below = false;
        for (size_t t = 0; t < n && !(above && below); ++t) {
          double d = fdot(nrm, pts[t]) - off;
          above |= d > eps;
          below |= d < -eps;
        }
        if (above && below) continue;
        if (above) {
          for (auto& x : nrm) x = -x;
          off = -off;
        }
        std::vector<int> tight;
        for (size_t t = 0; t < n; ++t)
          if (std::abs(fdot(nrm, pts[t]) - off) <= eps) tight.push_back(int(t));
        planes.emplace(std::move(tight), std::make_pair(nrm, off));
      }
  if (planes.size() < 4) {
    h.degenerate = true;
    return h;
  }
  // Hull vertices: points tight on at least three facet planes.
  std::vector<int> count(n, 0);
  for (const auto& [tight, _] : planes)
    for (int i : tight) ++count[i];
  std::vector<int> remap(n, -1);
  for (size_t i = 0; i < n; ++i)
    if (count[i] >= 3) {
      remap[i] = int(h.verts.size());
      h.verts.push_back(pts[i]);
    }
  std::map<std::array<int, 2>, std::vector<int>> edge_map;
  for (const auto& [tight, plane] : planes) {
    FloatFacet f;
    f.unit_normal = plane.first;
    f.offset = plane.second;
    std::vector<int> cyc;
    for (int i : tight)
      if (remap[i] >= 0) cyc.push_back(i);
    if (cyc.size() < 3) {
      h.degenerate = true;
      return h;
    }
    // Order around the facet centroid within the facet plane.
    FVec cent(3, 0.0);
    for (int i : cyc)
      for (int a = 0; a < 3; ++a) cent[a] += pts[i][a] / double(cyc.size());
    FVec e1 = funit(fsub(pts[cyc[1]], pts[cyc[0]]));
    FVec e2 = fcross(f.unit_normal, e1);
    std::sort(cyc.begin(), cyc.end(), [&](int a, int b) {
      FVec da = fsub(pts[a], cent), db = fsub(pts[b], cent);
      return std::atan2(fdot(da, e2), fdot(da, e1)) <
             std::atan2(fdot(db, e2), fdot(db, e1));
    });
    // Force counterclockwise seen from outside (normal side).
    FVec u = fsub(pts[cyc[1]], pts[cyc[0]]);
    FVec v = fsub(pts[cyc[2]], pts[cyc[0]]);
    if (fdot(fcross(u, v), f.unit_normal) < 0)
      std::reverse(cyc.begin(), cyc.end());
    int fid = int(h.facets.size());
    for (size_t i = 0; i < cyc.size(); ++i) {
      int a = remap[cyc[i]], b = remap[cyc[(i + 1) % cyc.size()]];
      edge_map[{std::min(a, b), std::max(a, b)}].push_back(fid);
      f.cycle.push_back(remap[cyc[i]]);
    }
    h.facets.push_back(std::move(f));
  }
  for (const auto& [e, fs] : edge_map) {
    if (fs.size() != 2) {
      h.degenerate = true;
      return h;
    }
    h.edges.push_back(e);
    h.edge_facets.push_back({fs[0], fs[1]});
  }
  return h;
}

// Intrinsic volumes of the convex hull of float points whose affine span has
// the given expected dimension; nullopt when the hull machinery reports a
// degenerate configuration (caller resamples the rotation).
inline std::optional<std::vector<double>> float_mu_of_hull(
    int ambient, const std::vector<FVec>& pts, int expected_dim) {
  using detail::fnorm;
  using detail::fsub;
  std::vector<double> mu(ambient + 1, 0.0);
  mu[0] = 1.0;
  if (expected_dim == 0) return mu;
  if (expected_dim == 1) {
    size_t lo = 0, hi = 0;
    for (size_t i = 1; i < pts.size(); ++i) {
      if (pts[i] < pts[lo]) lo = i;
      if (pts[hi] < pts[i]) hi = i;
    }
    mu[1] = fnorm(fsub(pts[hi], pts[lo]));
    return mu;
  }
  if (expected_dim == 2) {
    std::vector<FVec> flat = pts;
    if (ambient == 3) {
      // Project onto an orthonormal frame of the points' own plane.
      FVec o = pts[0], b1, b2;
      double best = 0;
      for (size_t i = 1; i < pts.size(); ++i)
        if (double l = fnorm(fsub(pts[i], o)); l > best) {
          best = l;
          b1 = fsub(pts[i], o);
        }
      if (best <= kHullTol) return std::nullopt;
      b1 = detail::funit(std::move(b1));
      best = 0;
      for (const auto& p : pts) {
        FVec d = fsub(p, o);
        FVec r = fsub(d, {b1[0] * detail::fdot(d, b1),
                          b1[1] * detail::fdot(d, b1),
                          b1[2] * detail::fdot(d, b1)});
        if (double l = fnorm(r); l > best) {
          best = l;
          b2 = r;
        }
      }
      if (best <= kHullTol) return std::nullopt;
      b2 = detail::funit(std::move(b2));
      flat.clear();
      for (const auto& p : pts) {
        FVec d = fsub(p, o);
        flat.push_back({detail::fdot(d, b1), detail::fdot(d, b2)});
      }
    }
    FloatHull2 h = float_hull_2d(std::move(flat));
    if (h.degenerate) return std::nullopt;
    double per = 0, area = 0;
    size_t m = h.cycle.size();
    for (size_t i = 0; i < m; ++i) {
      const FVec &a = h.cycle[i], &b = h.cycle[(i + 1) % m];
      per += fnorm(fsub(b, a));
      area += a[0] * b[1] - a[1] * b[0];
    }
    mu[1] = per / 2.0;
    mu[2] = std::abs(area) / 2.0;
    return mu;
  }
  FloatHull3 h = float_hull_3d(pts);
  if (h.degenerate) return std::nullopt;
  for (size_t e = 0; e < h.edges.size(); ++e) {
    double len = fnorm(fsub(h.verts[h.edges[e][1]], h.verts[h.edges[e][0]]));
    double ang = detail::normal_angle(h.facets[h.edge_facets[e][0]].unit_normal,
                                      h.facets[h.edge_facets[e][1]].unit_normal);
    mu[1] += len * ang / (2.0 * std::numbers::pi);
  }
  FVec cent(3, 0.0);
  for (const auto& v : h.verts)
    for (int a = 0; a < 3; ++a) cent[a] += v[a] / double(h.verts.size());
  for (const auto& f : h.facets) {
    double area = 0;
    for (size_t i = 1; i + 1 < f.cycle.size(); ++i) {
      FVec u = fsub(h.verts[f.cycle[i]], h.verts[f.cycle[0]]);
      FVec v = fsub(h.verts[f.cycle[i + 1]], h.verts[f.cycle[0]]);
      area += fnorm(detail::fcross(u, v)) / 2.0;
    }
    mu[2] += area / 2.0;
    mu[3] += area * (f.offset - detail::fdot(f.unit_normal, cent)) / 3.0;
  }
  // Divergence-theorem volume about the centroid; orientation makes each
  // term positive for a convex hull.
  mu[3] = std::abs(mu[3]);
  return mu;
}

// Euclidean distance from a point to the solid convex hull; zero inside.
inline double distance_to_hull(const FloatHull3& h, const FVec& x) {
  using detail::fdot;
  using detail::fnorm;
  using detail::fsub;
  bool inside = true;
  for (const auto& f : h.facets)
    inside = inside && fdot(f.unit_normal, x) - f.offset <= 0;
  if (inside) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  auto seg_dist = [&](const FVec& a, const FVec& b) {
    FVec d = fsub(b, a);
    double t = fdot(fsub(x, a), d) / fdot(d, d);
    t = std::min(1.0, std::max(0.0, t));
    FVec p = {a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]};
    return fnorm(fsub(x, p));
  };
  for (const auto& f : h.facets) {
    double hgt = fdot(f.unit_normal, x) - f.offset;
    FVec proj = {x[0] - hgt * f.unit_normal[0], x[1] - hgt * f.unit_normal[1],
                 x[2] - hgt * f.unit_normal[2]};
    bool in_facet = true;
    size_t m = f.cycle.size();
    for (size_t i = 0; i < m && in_facet; ++i) {
      FVec u = fsub(h.verts[f.cycle[(i + 1) % m]], h.verts[f.cycle[i]]);
      FVec w = fsub(proj, h.verts[f.cycle[i]]);
      in_facet = fdot(detail::fcross(u, w), f.unit_normal) >= -kHullTol;
    }
    if (in_facet) {
      best = std::min(best, std::abs(hgt));
    } else {
      for (size_t i = 0; i < m; ++i)
        best = std::min(
            best, seg_dist(h.verts[f.cycle[i]], h.verts[f.cycle[(i + 1) % m]]));
    }
  }
  return best;
}

}  // namespace eulerkin
