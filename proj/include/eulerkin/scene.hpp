#pragma once

// Scene files: JSON descriptions of the objects a run operates on. A scene
// declares its space (Euclidean of dimension 1..3, or the unit 3-sphere)
// and a named collection of objects matching that space. Exact coordinates
// travel as decimal strings "p/q" so round trips are lossless; sphere data
// is floating point.

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "eulerkin/error.hpp"
#include "eulerkin/polytope.hpp"
#include "eulerkin/simplicial.hpp"
#include "eulerkin/sphere3.hpp"

namespace eulerkin {

using Json = nlohmann::ordered_json;

struct Scene {
  bool spherical = false;
  int dim = 0;  // ambient dimension; always 3 when spherical
  std::vector<std::pair<std::string, StratifiedCF>> cfs;
  std::vector<std::pair<std::string, PolytopeCombination>> polytopes;
  std::vector<std::pair<std::string, BallCF>> balls;
  std::vector<std::pair<std::string, std::string>> metadata;
};

namespace detail {

inline void check_name(const std::string& name, std::set<std::string>& seen) {
  require(!name.empty(), ErrorCode::ValidationError, "empty object name");
  for (char c : name)
    require(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                c == '-' || c == '.',
            ErrorCode::ValidationError,
            "object name '" + name + "' has characters outside [A-Za-z0-9_.-]");
  require(seen.insert(name).second, ErrorCode::ValidationError,
          "duplicate object name '" + name + "'");
}

inline Rational parse_rational_text(const std::string& s,
                                    const std::string& where) {
  auto bad = [&] {
    fail(ErrorCode::ValidationError,
         where + ": '" + s + "' is not a rational \"p/q\"");
  };
  std::string num = s, den = "1";
  if (size_t slash = s.find('/'); slash != std::string::npos) {
    num = s.substr(0, slash);
    den = s.substr(slash + 1);
  }
  auto digits = [&](const std::string& part, bool sign_ok) {
    size_t start = sign_ok && !part.empty() && part[0] == '-' ? 1 : 0;
    if (part.size() == start) bad();
    for (size_t i = start; i < part.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) bad();
  };
  digits(num, true);
  digits(den, true);
  return make_rational(Integer(num), Integer(den));
}

inline Rational json_rational(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) return parse_rational_text(v.get<std::string>(), where);
  fail(ErrorCode::ValidationError,
       where + ": coordinates must be integers or rational strings");
}

inline RVec json_vertex(const Json& v, int dim, const std::string& where) {
  require(v.is_array() && int(v.size()) == dim, ErrorCode::ValidationError,
          where + ": vertex arity does not match the space dimension");
  RVec out;
  for (const auto& c : v) out.push_back(json_rational(c, where));
  return out;
}

inline long long json_weight(const Json& o, const std::string& where) {
  require(o.contains("w") && o["w"].is_number_integer(),
          ErrorCode::ValidationError, where + ": integer weight 'w' required");
  return o["w"].get<long long>();
}

}  // namespace detail

inline Scene parse_scene_json(const Json& j) {
  require(j.is_object(), ErrorCode::ValidationError,
          "scene must be a JSON object");
  require(j.contains("space"), ErrorCode::ValidationError,
          "scene is missing 'space'");
  Scene scene;
  const Json& sp = j["space"];
  if (sp.is_string() && sp.get<std::string>() == "sphere3") {
    scene.spherical = true;
    scene.dim = 3;
  } else if (sp.is_object() && sp.contains("euclidean") &&
             sp["euclidean"].is_number_integer()) {
    scene.dim = sp["euclidean"].get<int>();
    require(scene.dim >= 1 && scene.dim <= 3, ErrorCode::ValidationError,
            "euclidean dimension must lie in 1..3");
  } else {
    fail(ErrorCode::ValidationError,
         "'space' must be \"sphere3\" or {\"euclidean\": n}");
  }

  require(j.contains("objects") && j["objects"].is_object(),
          ErrorCode::ValidationError, "scene is missing 'objects' map");
  std::set<std::string> seen;
  for (const auto& [name, obj] : j["objects"].items()) {
    detail::check_name(name, seen);
    const std::string where = "object '" + name + "'";
    require(obj.is_object() && obj.size() == 1, ErrorCode::ValidationError,
            where + ": must have exactly one kind key");
    try {
      if (obj.contains("cf")) {
        require(!scene.spherical, ErrorCode::ValidationError,
                where + ": simplicial objects need a euclidean space");
        const Json& cf = obj["cf"];
        require(cf.contains("vertices") && cf["vertices"].is_array() &&
                    cf.contains("simplices") && cf["simplices"].is_array(),
                ErrorCode::ValidationError,
                where + ": 'cf' needs 'vertices' and 'simplices' arrays");
        std::vector<RVec> verts;
        for (const auto& v : cf["vertices"])
          verts.push_back(detail::json_vertex(v, scene.dim, where));
        std::vector<std::pair<std::vector<int>, long long>> cells;
        for (const auto& s : cf["simplices"]) {
          require(s.is_object() && s.contains("v") && s["v"].is_array(),
                  ErrorCode::ValidationError,
                  where + ": each simplex needs a vertex list 'v'");
          std::vector<int> ids;
          for (const auto& id : s["v"]) {
            require(id.is_number_integer(), ErrorCode::ValidationError,
                    where + ": simplex vertex ids must be integers");
            int v = id.get<int>();
            require(v >= 0 && v < int(verts.size()),
                    ErrorCode::ValidationError,
                    where + ": simplex vertex id out of range");
            ids.push_back(v);
          }
          cells.push_back({std::move(ids), detail::json_weight(s, where)});
        }
        scene.cfs.emplace_back(
            name, build_complex(scene.dim, std::move(verts), std::move(cells)));
      } else if (obj.contains("polytopes")) {
        require(!scene.spherical, ErrorCode::ValidationError,
                where + ": polytope objects need a euclidean space");
        PolytopeCombination pc{scene.dim, {}};
        require(obj["polytopes"].is_array(), ErrorCode::ValidationError,
                where + ": 'polytopes' must be an array");
        for (const auto& t : obj["polytopes"]) {
          require(t.is_object() && t.contains("vertices") &&
                      t["vertices"].is_array() && !t["vertices"].empty(),
                  ErrorCode::ValidationError,
                  where + ": each polytope needs a nonempty vertex array");
          std::vector<RVec> pts;
          for (const auto& v : t["vertices"])
            pts.push_back(detail::json_vertex(v, scene.dim, where));
          pc.terms.push_back({make_hull(scene.dim, std::move(pts)),
                              detail::json_weight(t, where)});
        }
        scene.polytopes.emplace_back(name, canonicalize(std::move(pc)));
      } else if (obj.contains("balls")) {
        require(scene.spherical, ErrorCode::ValidationError,
                where + ": ball objects need the sphere3 space");
        require(obj["balls"].is_array(), ErrorCode::ValidationError,
                where + ": 'balls' must be an array");
        BallCF f;
        for (const auto& b : obj["balls"]) {
          require(b.is_object() && b.contains("c") && b["c"].is_array() &&
                      b["c"].size() == 4 && b.contains("r") &&
                      b["r"].is_number(),
                  ErrorCode::ValidationError,
                  where + ": each ball needs 'c' (4 numbers) and 'r'");
          Quat c{b["c"][0].get<double>(), b["c"][1].get<double>(),
                 b["c"][2].get<double>(), b["c"][3].get<double>()};
          f.terms.push_back({detail::json_weight(b, where),
                             make_ball(c, b["r"].get<double>())});
        }
        scene.balls.emplace_back(name, canonicalize(std::move(f)));
      } else {
        fail(ErrorCode::ValidationError,
             where + ": kind must be 'cf', 'polytopes', or 'balls'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ValidationError) throw;
      fail(ErrorCode::ValidationError, where + ": " + e.what());
    }
  }

  if (j.contains("metadata")) {
    require(j["metadata"].is_object(), ErrorCode::ValidationError,
            "'metadata' must be a string map");
    for (const auto& [k, v] : j["metadata"].items()) {
      require(v.is_string(), ErrorCode::ValidationError,
              "'metadata' values must be strings");
      scene.metadata.emplace_back(k, v.get<std::string>());
    }
  }
  return scene;
}

inline Scene parse_scene_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    size_t line = 1;
    for (size_t b = 0; b < std::min(e.byte, text.size()); ++b)
      if (text[b] == '\n') ++line;
    fail(ErrorCode::ParseError,
         "line " + std::to_string(line) + ": " + e.what());
  }
  return parse_scene_json(j);
}

inline Scene parse_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), ErrorCode::IoError, "cannot open scene file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene_text(buf.str());
}

inline Json scene_to_json(const Scene& scene) {
  Json j;
  if (scene.spherical)
    j["space"] = "sphere3";
  else
    j["space"] = Json{{"euclidean", scene.dim}};
  Json objs = Json::object();
  auto vertex_json = [](const RVec& v) {
    Json a = Json::array();
    for (const auto& c : v) a.push_back(to_string(c));
    return a;
  };
  for (const auto& [name, cf] : scene.cfs) {
    Json verts = Json::array(), cells = Json::array();
    for (const auto& v : cf.complex.verts) verts.push_back(vertex_json(v));
    for (size_t c = 0; c < cf.complex.cells.size(); ++c)
      cells.push_back(
          Json{{"v", cf.complex.cells[c]}, {"w", cf.weights[c]}});
    objs[name] =
        Json{{"cf", Json{{"vertices", verts}, {"simplices", cells}}}};
  }
  for (const auto& [name, pc] : scene.polytopes) {
    Json terms = Json::array();
    for (const auto& t : pc.terms) {
      Json verts = Json::array();
      for (const auto& v : t.poly.verts) verts.push_back(vertex_json(v));
      terms.push_back(Json{{"vertices", verts}, {"w", t.weight}});
    }
    objs[name] = Json{{"polytopes", terms}};
  }
  for (const auto& [name, f] : scene.balls) {
    Json terms = Json::array();
    for (const auto& t : f.terms) {
      const Quat& c = t.ball.center;
      terms.push_back(Json{{"c", Json::array({c.w, c.x, c.y, c.z})},
                           {"r", t.ball.radius},
                           {"w", t.weight}});
    }
    objs[name] = Json{{"balls", terms}};
  }
  j["objects"] = std::move(objs);
  if (!scene.metadata.empty()) {
    Json meta = Json::object();
    for (const auto& [k, v] : scene.metadata) meta[k] = v;
    j["metadata"] = std::move(meta);
  }
  return j;
}

inline std::string write_scene(const Scene& scene) {
  return scene_to_json(scene).dump(2) + "\n";
}

}  // namespace eulerkin
