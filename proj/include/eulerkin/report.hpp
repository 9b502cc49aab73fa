#pragma once

// Run reports: tabular results with the run inputs echoed. Two renderings
// share one row model: CSV is a bare table (header row even when empty),
// JSON is a schema-versioned object. Exact results are carried as rationals
// and serialized as "p/q" strings; floating-point values are written with
// 17 significant digits so parsing them back is lossless. Reports contain
// nothing nondeterministic: a timing figure is kept on the struct for
// logging but never serialized, so identical inputs give identical bytes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "eulerkin/error.hpp"
#include "eulerkin/rational.hpp"

namespace eulerkin {

struct GridSpec {
  int count_r = 20;
  int count_s = 20;
  double r_max = std::numbers::pi / 4;
};

enum class ReportFormat { kCsv, kJson };

struct RunConfig {
  uint64_t seed = 0;
  long long samples = 10000;
  GridSpec grid;
  double tolerance = 1e-8;
  ReportFormat format = ReportFormat::kCsv;
};

struct ReportValue {
  bool exact = false;
  Rational rat;
  double num = 0;
};

inline ReportValue exact_value(Rational r) { return {true, std::move(r), 0}; }
inline ReportValue num_value(double x) { return {false, Rational(0), x}; }

struct ReportRow {
  std::string name;
  std::optional<int> i, k, l;
  std::optional<ReportValue> value;
  std::optional<double> se;
  std::optional<double> residual;
};

struct Report {
  std::string command;
  std::string space;
  uint64_t seed = 0;
  long long samples = 0;
  GridSpec grid;
  double tolerance = 0;
  std::vector<std::string> objects;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ReportRow> rows;
  bool tolerance_ok = true;  // false exits with code 3 for verify commands
  double wall_ms = 0;        // informational only; never serialized
};

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string render_csv(const Report& report) {
  std::string out = "name,i,k,l,value,se,residual\n";
  auto idx = [](const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  auto flt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const ReportRow& r : report.rows) {
    std::string value;
    if (r.value)
      value = r.value->exact ? to_string(r.value->rat)
                             : format_double(r.value->num);
    out += r.name + "," + idx(r.i) + "," + idx(r.k) + "," + idx(r.l) + "," +
           value + "," + flt(r.se) + "," + flt(r.residual) + "\n";
  }
  return out;
}

inline std::string render_json(const Report& report) {
  nlohmann::ordered_json j;
  j["schema"] = "euler-kinematics/v1";
  j["command"] = report.command;
  j["space"] = report.space;
  j["seed"] = report.seed;
  j["samples"] = report.samples;
  j["grid"] = {{"count_r", report.grid.count_r},
               {"count_s", report.grid.count_s},
               {"r_max", report.grid.r_max}};
  j["tolerance"] = report.tolerance;
  j["objects"] = report.objects;
  if (!report.metadata.empty()) {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.metadata) meta[k] = v;
    j["metadata"] = std::move(meta);
  }
  j["tolerance_ok"] = report.tolerance_ok;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ReportRow& r : report.rows) {
    nlohmann::ordered_json row;
    row["name"] = r.name;
    if (r.i) row["i"] = *r.i;
    if (r.k) row["k"] = *r.k;
    if (r.l) row["l"] = *r.l;
    if (r.value) {
      if (r.value->exact)
        row["value"] = to_string(r.value->rat);
      else
        row["value"] = r.value->num;
    }
    if (r.se) row["se"] = *r.se;
    if (r.residual) row["residual"] = *r.residual;
    rows.push_back(std::move(row));
  }
  j["results"] = std::move(rows);
  return j.dump(2) + "\n";
}

inline std::string render_report(const Report& report, ReportFormat format) {
  return format == ReportFormat::kCsv ? render_csv(report)
                                      : render_json(report);
}

// Writes to the given path, or to standard output when the path is empty
// or "-".
inline void write_report(const Report& report, const std::string& path,
                         ReportFormat format) {
  std::string text = render_report(report, format);
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(bool(out), ErrorCode::IoError, "cannot open output file " + path);
  out << text;
  require(bool(out), ErrorCode::IoError, "failed writing " + path);
}

}  // namespace eulerkin
