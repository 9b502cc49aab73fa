#pragma once

// Hyperplane-arrangement refinement. Every operation that needs two
// stratifications to live on one complex routes through here: collect the
// hyperplanes supporting the inputs' faces ("carves"), refine a bounding box
// into convex cells by successive exact splits, triangulate by pulling, and
// transfer weights by evaluating the inputs at a rational relative-interior
// sample of each refined cell. Each input open cell is a sign-condition
// region of the carve set, so samples determine values exactly.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "eulerkin/simplicial.hpp"

namespace eulerkin {

using CarveSet = std::set<Hyperplane>;

// Hyperplanes supporting the affine hull and the proper faces of a polytope.
inline void carve_polytope(const ConvexPolytope& p, CarveSet* out) {
  HRep h = hrep(p);
  for (const auto& eq : h.equalities)
    out->insert(canonical_hyperplane(eq.normal, eq.offset));
  for (const auto& iq : h.inequalities)
    out->insert(canonical_hyperplane(iq.normal, iq.offset));
}

// Carves for every cell of a stratification; faces of a carved cell are cut
// out by the same planes, so only inclusion-maximal cells contribute.
inline void carve_cf(const StratifiedCF& cf, CarveSet* out) {
  const auto& cells = cf.complex.cells;
  for (size_t i = 0; i < cells.size(); ++i) {
    bool maximal = true;
    for (size_t j = 0; j < cells.size() && maximal; ++j)
      if (j != i && cells[j].size() > cells[i].size())
        maximal = !std::includes(cells[j].begin(), cells[j].end(),
                                 cells[i].begin(), cells[i].end());
    if (maximal) carve_polytope(cell_polytope(cf.complex, cells[i]), out);
  }
}

namespace detail {

// Registry of simplices given by vertex coordinates; emits a face-closed
// canonical complex.
struct TopCollector {
  std::map<RVec, int> vid;
  std::vector<RVec> coords;
  std::set<std::vector<int>> cells;

  int id(const RVec& v) {
    auto [it, fresh] = vid.try_emplace(v, int(coords.size()));
    if (fresh) coords.push_back(v);
    return it->second;
  }

  void add_top(const std::vector<RVec>& simplex) {
    std::vector<int> ids;
    ids.reserve(simplex.size());
    for (const auto& v : simplex) ids.push_back(id(v));
    std::sort(ids.begin(), ids.end());
    size_t subsets = size_t(1) << ids.size();
    for (size_t mask = 1; mask < subsets; ++mask) {
      std::vector<int> face;
      for (size_t b = 0; b < ids.size(); ++b)
        if (mask & (size_t(1) << b)) face.push_back(ids[b]);
      cells.insert(std::move(face));
    }
  }

  SimplicialComplex finish(int ambient) {
    StratifiedCF raw;
    raw.complex.ambient = ambient;
    raw.complex.verts = std::move(coords);
    for (const auto& c : cells) {
      raw.complex.cells.push_back(c);
      raw.weights.push_back(1);
    }
    return canonicalize(raw).complex;
  }
};

// Fan triangles of a convex polygon from its lex-min vertex; `cycle` lists
// the vertices in cyclic boundary order.
inline void fan_polygon(const std::vector<RVec>& cycle, TopCollector* out,
                        const RVec* apex = nullptr) {
  size_t m = cycle.size(), best = 0;
  for (size_t i = 1; i < m; ++i)
    if (lex_less(cycle[i], cycle[best])) best = i;
  for (size_t j = 0; j < m; ++j) {
    size_t a = j, b = (j + 1) % m;
    if (a == best || b == best) continue;
    std::vector<RVec> t{cycle[best], cycle[a], cycle[b]};
    if (apex) t.push_back(*apex);
    out->add_top(t);
  }
}

// Splits a convex polygon (cyclic vertex order) by a hyperplane; children
// keep cyclic order. Either side may come back empty when the plane does not
// cut strictly through the interior.
inline void split_polygon(const std::vector<RVec>& poly, const Hyperplane& h,
                          std::vector<RVec>* minus, std::vector<RVec>* plus) {
  size_t n = poly.size();
  std::vector<Rational> e(n);
  bool any_m = false, any_p = false;
  for (size_t i = 0; i < n; ++i) {
    e[i] = eval(h, poly[i]);
    any_m |= e[i] < 0;
    any_p |= e[i] > 0;
  }
  if (!any_m || !any_p) {
    (any_p ? *plus : *minus) = poly;
    return;
  }
  for (size_t i = 0; i < n; ++i) {
    size_t j = (i + 1) % n;
    if (e[i] <= 0) minus->push_back(poly[i]);
    if (e[i] >= 0) plus->push_back(poly[i]);
    if ((e[i] < 0 && e[j] > 0) || (e[i] > 0 && e[j] < 0)) {
      Rational t = e[i] / (e[i] - e[j]);
      RVec w = vec_add(poly[i], vec_scale(t, vec_sub(poly[j], poly[i])));
      minus->push_back(w);
      plus->push_back(w);
    }
  }
}

// A full-dimensional convex cell of a 3D arrangement: bounding halfspaces,
// vertices, and per-vertex sets of tight constraint indices (kept exact so
// edges can be recognized as vertex pairs whose common tight normals have
// rank 2).
struct Cell3 {
  std::vector<Halfspace> cons;
  std::vector<RVec> verts;
  std::vector<std::vector<int>> tight;
};

inline void prune_cell3(Cell3* c) {
  std::vector<int> remap(c->cons.size(), -1);
  for (const auto& t : c->tight)
    for (int k : t) remap[k] = 0;
  std::vector<Halfspace> cons;
  for (size_t k = 0; k < c->cons.size(); ++k)
    if (remap[k] == 0) {
      remap[k] = int(cons.size());
      cons.push_back(std::move(c->cons[k]));
    }
  c->cons = std::move(cons);
  for (auto& t : c->tight)
    for (int& k : t) k = remap[k];
}

inline bool is_edge(const Cell3& c, size_t i, size_t j, std::vector<int>* common) {
  common->clear();
  std::set_intersection(c.tight[i].begin(), c.tight[i].end(),
                        c.tight[j].begin(), c.tight[j].end(),
                        std::back_inserter(*common));
  if (common->size() < 2) return false;
  RMat normals;
  for (int k : *common) normals.push_back(c.cons[k].normal);
  return rank(normals) == 2;
}

inline void split_cell3(const Cell3& c, const Hyperplane& h,
                        std::optional<Cell3>* minus, std::optional<Cell3>* plus) {
  size_t n = c.verts.size();
  std::vector<Rational> e(n);
  bool any_m = false, any_p = false;
  for (size_t i = 0; i < n; ++i) {
    e[i] = eval(h, c.verts[i]);
    any_m |= e[i] < 0;
    any_p |= e[i] > 0;
  }
  if (!any_m || !any_p) {
    (any_p ? *plus : *minus) = c;
    return;
  }

  struct Cap {
    RVec v;
    std::vector<int> common;
  };
  std::vector<Cap> caps;
  std::vector<int> common;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      if (!((e[i] < 0 && e[j] > 0) || (e[i] > 0 && e[j] < 0))) continue;
      if (!is_edge(c, i, j, &common)) continue;
      Rational t = e[i] / (e[i] - e[j]);
      caps.push_back({vec_add(c.verts[i], vec_scale(t, vec_sub(c.verts[j], c.verts[i]))),
                      common});
    }

  auto build = [&](bool keep_minus) {
    Cell3 out;
    out.cons = c.cons;
    int hidx = int(out.cons.size());
    if (keep_minus)
      out.cons.push_back({h.normal, h.offset});
    else
      out.cons.push_back({vec_scale(Rational(-1), h.normal), -h.offset});
    for (size_t i = 0; i < n; ++i) {
      bool keep = keep_minus ? e[i] <= 0 : e[i] >= 0;
      if (!keep) continue;
      out.verts.push_back(c.verts[i]);
      auto t = c.tight[i];
      if (e[i] == 0) t.push_back(hidx);
      out.tight.push_back(std::move(t));
    }
    for (const auto& cap : caps) {
      out.verts.push_back(cap.v);
      auto t = cap.common;
      t.push_back(hidx);
      out.tight.push_back(std::move(t));
    }
    prune_cell3(&out);
    return out;
  };
  *minus = build(true);
  *plus = build(false);
}

// Pulls a Cell3 into tetrahedra: cone the lex-min vertex over the fans of
// the facets that do not contain it.
inline void pull_cell3(const Cell3& c, TopCollector* out) {
  size_t v0 = 0;
  for (size_t i = 1; i < c.verts.size(); ++i)
    if (lex_less(c.verts[i], c.verts[v0])) v0 = i;
  for (size_t k = 0; k < c.cons.size(); ++k) {
    std::vector<RVec> facet;
    bool has_apex = false;
    for (size_t i = 0; i < c.verts.size(); ++i)
      if (std::binary_search(c.tight[i].begin(), c.tight[i].end(), int(k))) {
        facet.push_back(c.verts[i]);
        has_apex |= i == v0;
      }
    if (facet.size() < 3 || has_apex) continue;
    std::vector<size_t> cyc = polygon_cycle(facet);
    std::vector<RVec> cycle;
    for (size_t i : cyc) cycle.push_back(facet[i]);
    fan_polygon(cycle, out, &c.verts[v0]);
  }
}

}  // namespace detail

// Simplicial complex covering [lo, hi] in which every carve hyperplane is a
// union of cells; consequently every refined open cell is sign-constant with
// respect to all carve planes.
inline SimplicialComplex arrangement_complex(int ambient, const CarveSet& planes,
                                             const RVec& lo, const RVec& hi) {
  detail::TopCollector coll;
  if (ambient == 1) {
    std::set<Rational> cuts{lo[0], hi[0]};
    for (const auto& h : planes) {
      Rational x = h.offset / h.normal[0];
      if (lo[0] < x && x < hi[0]) cuts.insert(x);
    }
    std::vector<Rational> xs(cuts.begin(), cuts.end());
    for (size_t i = 0; i + 1 < xs.size(); ++i)
      coll.add_top({RVec{xs[i]}, RVec{xs[i + 1]}});
  } else if (ambient == 2) {
    std::vector<std::vector<RVec>> polys{{RVec{lo[0], lo[1]}, RVec{hi[0], lo[1]},
                                          RVec{hi[0], hi[1]}, RVec{lo[0], hi[1]}}};
    for (const auto& h : planes) {
      std::vector<std::vector<RVec>> next;
      for (const auto& poly : polys) {
        std::vector<RVec> minus, plus;
        detail::split_polygon(poly, h, &minus, &plus);
        if (!minus.empty()) next.push_back(std::move(minus));
        if (!plus.empty()) next.push_back(std::move(plus));
      }
      polys = std::move(next);
    }
    for (const auto& poly : polys) detail::fan_polygon(poly, &coll);
  } else {
    require(ambient == 3, ErrorCode::ValidationError,
            "arrangement ambient dimension out of range");
    detail::Cell3 box;
    for (int a = 0; a < 3; ++a) {
      RVec np(3, Rational(0)), nm(3, Rational(0));
      np[a] = 1;
      nm[a] = -1;
      box.cons.push_back({np, hi[a]});
      box.cons.push_back({nm, -lo[a]});
    }
    for (int m = 0; m < 8; ++m) {
      RVec v(3);
      std::vector<int> t;
      for (int a = 0; a < 3; ++a) {
        bool top = m & (1 << a);
        v[a] = top ? hi[a] : lo[a];
        t.push_back(2 * a + (top ? 0 : 1));
      }
      std::sort(t.begin(), t.end());
      box.verts.push_back(std::move(v));
      box.tight.push_back(std::move(t));
    }
    std::vector<detail::Cell3> cells{std::move(box)};
    for (const auto& h : planes) {
      std::vector<detail::Cell3> next;
      for (const auto& c : cells) {
        std::optional<detail::Cell3> minus, plus;
        detail::split_cell3(c, h, &minus, &plus);
        if (minus) next.push_back(std::move(*minus));
        if (plus) next.push_back(std::move(*plus));
      }
      cells = std::move(next);
    }
    for (const auto& c : cells) detail::pull_cell3(c, &coll);
  }
  return coll.finish(ambient);
}

namespace detail {

// Bounding box with margin 1 around a point collection.
inline bool margin_box(int ambient, const std::vector<const std::vector<RVec>*>& groups,
                       RVec* lo, RVec* hi) {
  bool seen = false;
  for (const auto* g : groups)
    for (const auto& v : *g) {
      if (!seen) {
        *lo = v;
        *hi = v;
        seen = true;
        continue;
      }
      for (int a = 0; a < ambient; ++a) {
        if (v[a] < (*lo)[a]) (*lo)[a] = v[a];
        if (v[a] > (*hi)[a]) (*hi)[a] = v[a];
      }
    }
  if (!seen) return false;
  for (int a = 0; a < ambient; ++a) {
    (*lo)[a] -= 1;
    (*hi)[a] += 1;
  }
  return true;
}

inline RVec cell_sample(const SimplicialComplex& k, const std::vector<int>& cell) {
  RVec s(k.ambient, Rational(0));
  for (int i : cell) s = vec_add(s, k.verts[i]);
  return vec_scale(make_rational(1, Integer(cell.size())), s);
}

// Point-location accelerator: each weighted open cell of a StratifiedCF as
// sign conditions (equalities exact, facet inequalities strict), so a sample
// query is a handful of dot products with early exit instead of a solve.
struct PreparedCell {
  long long weight;
  RVec lo, hi;
  std::vector<Hyperplane> eqs;
  std::vector<Halfspace> strict;
};

struct PreparedCF {
  int ambient = 0;
  std::vector<PreparedCell> cells;
};

inline PreparedCF prepare_cf(const StratifiedCF& cf) {
  PreparedCF p;
  p.ambient = cf.complex.ambient;
  for (size_t c = 0; c < cf.complex.cells.size(); ++c) {
    if (cf.weights[c] == 0) continue;
    ConvexPolytope poly = cell_polytope(cf.complex, cf.complex.cells[c]);
    HRep h = hrep(poly);
    PreparedCell pc;
    pc.weight = cf.weights[c];
    bbox_of(poly.verts, &pc.lo, &pc.hi);
    pc.eqs = std::move(h.equalities);
    pc.strict = std::move(h.inequalities);
    p.cells.push_back(std::move(pc));
  }
  return p;
}

inline long long evaluate(const PreparedCF& p, const RVec& x) {
  for (const auto& c : p.cells) {
    bool out = false;
    for (int a = 0; a < p.ambient && !out; ++a) out = x[a] < c.lo[a] || x[a] > c.hi[a];
    for (size_t i = 0; i < c.eqs.size() && !out; ++i) out = eval(c.eqs[i], x) != 0;
    for (size_t i = 0; i < c.strict.size() && !out; ++i) out = eval(c.strict[i], x) >= 0;
    if (!out) return c.weight;
  }
  return 0;
}

inline bool simplex_contains(const std::vector<RVec>& sv, const RVec& x) {
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
    if (l < 0) return false;
  return true;
}

}  // namespace detail

// Weights each cell of a refined complex by `value` at an exact relative-
// interior sample, then canonicalizes (dropping the zero-weight bulk).
template <class F>
StratifiedCF assemble_cf(const SimplicialComplex& refined, F&& value) {
  StratifiedCF out;
  out.complex = refined;
  out.weights.reserve(refined.cells.size());
  for (const auto& cell : refined.cells)
    out.weights.push_back(value(detail::cell_sample(refined, cell)));
  return canonicalize(out);
}

// Does the union of closed cells contain x?
inline bool complex_contains(const SimplicialComplex& k, const RVec& x) {
  for (const auto& cell : k.cells) {
    std::vector<RVec> sv;
    sv.reserve(cell.size());
    for (int i : cell) sv.push_back(k.verts[i]);
    bool out = false;
    for (int a = 0; a < k.ambient && !out; ++a) {
      Rational mn = sv[0][a], mx = mn;
      for (const auto& v : sv) {
        if (v[a] < mn) mn = v[a];
        if (v[a] > mx) mx = v[a];
      }
      out = x[a] < mn || x[a] > mx;
    }
    if (!out && detail::simplex_contains(sv, x)) return true;
  }
  return false;
}

// A simplicial complex refining both inputs: each input cell is a union of
// output cells, and the output covers exactly the union of the inputs.
inline SimplicialComplex common_refinement(const SimplicialComplex& a,
                                           const SimplicialComplex& b) {
  require(a.ambient == b.ambient, ErrorCode::ValidationError,
          "ambient dimension mismatch");
  StratifiedCF wa{a, std::vector<long long>(a.cells.size(), 1)};
  StratifiedCF wb{b, std::vector<long long>(b.cells.size(), 1)};
  CarveSet planes;
  carve_cf(wa, &planes);
  carve_cf(wb, &planes);
  RVec lo, hi;
  if (!detail::margin_box(a.ambient, {&a.verts, &b.verts}, &lo, &hi))
    return SimplicialComplex{a.ambient, {}, {}};
  SimplicialComplex refined = arrangement_complex(a.ambient, planes, lo, hi);
  // Restrict to the union of the supports; the kept set is face-closed since
  // closures of kept cells stay inside the closed union.
  StratifiedCF kept;
  kept.complex = refined;
  for (const auto& cell : refined.cells) {
    RVec s = detail::cell_sample(refined, cell);
    kept.weights.push_back(complex_contains(a, s) || complex_contains(b, s) ? 1 : 0);
  }
  return canonicalize(kept).complex;
}

// ca*f + cb*g on a common refinement.
inline StratifiedCF combine(long long ca, const StratifiedCF& f, long long cb,
                            const StratifiedCF& g) {
  require(f.complex.ambient == g.complex.ambient, ErrorCode::ValidationError,
          "ambient dimension mismatch");
  if (f.complex.cells == g.complex.cells && f.complex.verts == g.complex.verts) {
    StratifiedCF out = f;
    for (size_t i = 0; i < out.weights.size(); ++i)
      out.weights[i] = ca * f.weights[i] + cb * g.weights[i];
    return canonicalize(out);
  }
  CarveSet planes;
  carve_cf(f, &planes);
  carve_cf(g, &planes);
  RVec lo, hi;
  if (!detail::margin_box(f.complex.ambient, {&f.complex.verts, &g.complex.verts},
                          &lo, &hi))
    return StratifiedCF{{f.complex.ambient, {}, {}}, {}};
  SimplicialComplex refined = arrangement_complex(f.complex.ambient, planes, lo, hi);
  detail::PreparedCF pf = detail::prepare_cf(f), pg = detail::prepare_cf(g);
  return assemble_cf(refined, [&](const RVec& x) {
    return ca * evaluate(pf, x) + cb * evaluate(pg, x);
  });
}

// Pointwise product f*g on a common refinement.
inline StratifiedCF pointwise_product(const StratifiedCF& f, const StratifiedCF& g) {
  require(f.complex.ambient == g.complex.ambient, ErrorCode::ValidationError,
          "ambient dimension mismatch");
  if (f.complex.cells == g.complex.cells && f.complex.verts == g.complex.verts) {
    StratifiedCF out = f;
    for (size_t i = 0; i < out.weights.size(); ++i)
      out.weights[i] = f.weights[i] * g.weights[i];
    return canonicalize(out);
  }
  if (f.complex.cells.empty() || g.complex.cells.empty())
    return StratifiedCF{{f.complex.ambient, {}, {}}, {}};
  CarveSet planes;
  carve_cf(f, &planes);
  carve_cf(g, &planes);
  RVec lo, hi;
  detail::margin_box(f.complex.ambient, {&f.complex.verts, &g.complex.verts}, &lo, &hi);
  SimplicialComplex refined = arrangement_complex(f.complex.ambient, planes, lo, hi);
  detail::PreparedCF pf = detail::prepare_cf(f), pg = detail::prepare_cf(g);
  return assemble_cf(refined, [&](const RVec& x) {
    return evaluate(pf, x) * evaluate(pg, x);
  });
}

// Sum of weighted closed-polytope indicators as a canonical StratifiedCF.
inline StratifiedCF from_polytopes(const PolytopeCombination& in) {
  PolytopeCombination pc = canonicalize(in);
  if (pc.terms.empty()) return StratifiedCF{{pc.ambient, {}, {}}, {}};
  CarveSet planes;
  std::vector<HRep> hreps;
  std::vector<RVec> lo_t, hi_t;
  std::vector<const std::vector<RVec>*> groups;
  for (const auto& term : pc.terms) {
    carve_polytope(term.poly, &planes);
    hreps.push_back(hrep(term.poly));
    RVec l, h;
    detail::bbox_of(term.poly.verts, &l, &h);
    lo_t.push_back(std::move(l));
    hi_t.push_back(std::move(h));
    groups.push_back(&term.poly.verts);
  }
  RVec lo, hi;
  detail::margin_box(pc.ambient, groups, &lo, &hi);
  SimplicialComplex refined = arrangement_complex(pc.ambient, planes, lo, hi);
  return assemble_cf(refined, [&](const RVec& x) {
    long long v = 0;
    for (size_t t = 0; t < pc.terms.size(); ++t) {
      bool out = false;
      for (int a = 0; a < pc.ambient && !out; ++a)
        out = x[a] < lo_t[t][a] || x[a] > hi_t[t][a];
      if (!out && contains(hreps[t], x)) v += pc.terms[t].weight;
    }
    return v;
  });
}

// Semantic equality of the represented functions (independent of
// presentation): values agree at a sample of every cell of a common
// refinement, and both vanish off the refined box.
inline bool cf_equal(const StratifiedCF& f, const StratifiedCF& g) {
  if (f.complex.ambient != g.complex.ambient) return false;
  if (f.complex.verts == g.complex.verts && f.complex.cells == g.complex.cells &&
      f.weights == g.weights)
    return true;
  CarveSet planes;
  carve_cf(f, &planes);
  carve_cf(g, &planes);
  RVec lo, hi;
  if (!detail::margin_box(f.complex.ambient, {&f.complex.verts, &g.complex.verts},
                          &lo, &hi))
    return true;  // both empty
  SimplicialComplex refined = arrangement_complex(f.complex.ambient, planes, lo, hi);
  detail::PreparedCF pf = detail::prepare_cf(f), pg = detail::prepare_cf(g);
  for (const auto& cell : refined.cells) {
    RVec s = detail::cell_sample(refined, cell);
    if (evaluate(pf, s) != evaluate(pg, s)) return false;
  }
  return true;
}

}  // namespace eulerkin
