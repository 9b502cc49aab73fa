#pragma once

// Command dispatch: one entry point maps a named command plus a scene and a
// run configuration to a report. Dispatch is single-threaded and all
// randomness flows from the configured seed through tagged counter-based
// streams, so identical inputs produce identical reports.

#include <chrono>
#include <string>
#include <vector>

#include "eulerkin/arrangement.hpp"
#include "eulerkin/kinematic.hpp"
#include "eulerkin/ops.hpp"
#include "eulerkin/report.hpp"
#include "eulerkin/scene.hpp"
#include "eulerkin/sphere3.hpp"
#include "eulerkin/valuation.hpp"

namespace eulerkin {

namespace detail {

// Euclidean objects in report order: simplicial objects first, then
// polytope combinations restratified through the arrangement pipeline.
inline std::vector<std::pair<std::string, StratifiedCF>> euclidean_objects(
    const Scene& scene) {
  std::vector<std::pair<std::string, StratifiedCF>> out = scene.cfs;
  for (const auto& [name, pc] : scene.polytopes)
    out.emplace_back(name, from_polytopes(pc));
  return out;
}

inline std::vector<std::pair<double, double>> config_grid(
    const GridSpec& grid) {
  require(grid.count_r >= 1 && grid.count_s >= 1, ErrorCode::ValidationError,
          "grid counts must be positive");
  require(grid.r_max > 0 && grid.r_max < std::numbers::pi / 2,
          ErrorCode::ValidationError, "grid r_max must lie in (0, pi/2)");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(size_t(grid.count_r) * size_t(grid.count_s));
  for (int a = 0; a < grid.count_r; ++a)
    for (int b = 0; b < grid.count_s; ++b)
      pts.push_back({(a + 0.5) * grid.r_max / grid.count_r,
                     (b + 0.5) * grid.r_max / grid.count_s});
  return pts;
}

inline void tensor_rows(Report& report, const SolveResult& sol) {
  int n = sol.tensor.order;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        ReportRow row;
        row.name = "d";
        row.i = i;
        row.k = k;
        row.l = l;
        row.value = num_value(sol.tensor.at(i, k, l));
        report.rows.push_back(std::move(row));
      }
  ReportRow res;
  res.name = "residual";
  res.residual = sol.residual;
  report.rows.push_back(std::move(res));
}

inline void require_spherical(const Scene& scene, const std::string& cmd) {
  require(scene.spherical, ErrorCode::ValidationError,
          cmd + " needs the sphere3 space");
}

inline void require_euclidean(const Scene& scene, const std::string& cmd) {
  require(!scene.spherical, ErrorCode::ValidationError,
          cmd + " needs a euclidean space");
}

}  // namespace detail

inline Report run(const std::string& command, const Scene& scene,
                  const RunConfig& config) {
  require(config.samples >= 1, ErrorCode::InvalidSampleCount,
          "samples must be positive");
  require(config.tolerance > 0, ErrorCode::ValidationError,
          "tolerance must be positive");
  auto start = std::chrono::steady_clock::now();

  Report report;
  report.command = command;
  report.space = scene.spherical
                     ? std::string("sphere3")
                     : "euclidean(" + std::to_string(scene.dim) + ")";
  report.seed = config.seed;
  report.samples = config.samples;
  report.grid = config.grid;
  report.tolerance = config.tolerance;
  report.metadata = scene.metadata;
  for (const auto& [name, cf] : scene.cfs) report.objects.push_back(name);
  for (const auto& [name, pc] : scene.polytopes)
    report.objects.push_back(name);
  for (const auto& [name, f] : scene.balls) report.objects.push_back(name);

  if (command == "integrate") {
    if (scene.spherical) {
      for (const auto& [name, f] : scene.balls)
        report.rows.push_back(
            {name, {}, {}, {}, exact_value(Rational(euler_integral(f)))});
    } else {
      for (const auto& [name, cf] : detail::euclidean_objects(scene))
        report.rows.push_back(
            {name, {}, {}, {}, exact_value(Rational(euler_integral(cf)))});
    }
  } else if (command == "convolve") {
    if (scene.spherical) {
      require(scene.balls.size() == 2, ErrorCode::ValidationError,
              "convolve needs exactly two objects");
      BallCF res =
          convolve_balls(scene.balls[0].second, scene.balls[1].second);
      report.rows.push_back(
          {"integral", {}, {}, {}, exact_value(Rational(euler_integral(res)))});
      report.rows.push_back(
          {"terms", {}, {}, {}, exact_value(Rational(res.terms.size()))});
    } else {
      auto objs = detail::euclidean_objects(scene);
      require(objs.size() == 2, ErrorCode::ValidationError,
              "convolve needs exactly two objects");
      StratifiedCF res = convolve(objs[0].second, objs[1].second);
      report.rows.push_back(
          {"integral", {}, {}, {}, exact_value(Rational(euler_integral(res)))});
      report.rows.push_back(
          {"cells",
           {},
           {},
           {},
           exact_value(Rational(res.complex.cells.size()))});
    }
  } else if (command == "pushforward") {
    detail::require_euclidean(scene, command);
    // Project onto the first coordinate; the reported integral of the
    // image equals the object's own integral whenever the pipeline is
    // correct, which makes this an end-to-end consistency command.
    AffineMap proj;
    proj.a = {RVec(size_t(scene.dim), Rational(0))};
    proj.a[0][0] = 1;
    proj.t = {Rational(0)};
    for (const auto& [name, cf] : detail::euclidean_objects(scene)) {
      StratifiedCF img = pushforward(cf, proj);
      report.rows.push_back(
          {name, {}, {}, {}, exact_value(Rational(euler_integral(img)))});
    }
  } else if (command == "valuations") {
    if (scene.spherical) {
      for (const auto& [name, f] : scene.balls)
        for (int i = 0; i <= 3; ++i)
          report.rows.push_back(
              {name, i, {}, {}, num_value(closed_form_valuation(i, f))});
    } else {
      for (const auto& [name, cf] : scene.cfs)
        for (int k = 0; k <= scene.dim; ++k)
          report.rows.push_back(
              {name, k, {}, {}, num_value(evaluate_valuation(k, cf))});
      for (const auto& [name, pc] : scene.polytopes)
        for (int k = 0; k <= scene.dim; ++k)
          report.rows.push_back(
              {name, k, {}, {}, num_value(evaluate_valuation(k, pc))});
    }
  } else if (command == "kinematic-flat") {
    detail::require_euclidean(scene, command);
    require(scene.dim == 2 || scene.dim == 3, ErrorCode::ValidationError,
            "kinematic-flat needs a euclidean space of dimension 2 or 3");
    detail::tensor_rows(report, flat_kinematic_tensor(scene.dim));
  } else if (command == "crofton") {
    detail::require_spherical(scene, command);
    for (const auto& [name, f] : scene.balls)
      for (int i = 0; i <= 3; ++i) {
        McEstimate est =
            crofton_valuation(i, f, config.samples, config.seed);
        ReportRow row;
        row.name = name;
        row.i = i;
        row.value = num_value(est.estimate);
        row.se = est.std_error;
        report.rows.push_back(std::move(row));
      }
  } else if (command == "verify-s3") {
    detail::require_spherical(scene, command);
    std::array<double, 4> res =
        verify_m_table(detail::config_grid(config.grid));
    for (int i = 0; i <= 3; ++i) {
      ReportRow row;
      row.name = "residual";
      row.i = i;
      row.residual = res[size_t(i)];
      report.tolerance_ok =
          report.tolerance_ok && res[size_t(i)] <= config.tolerance;
      report.rows.push_back(std::move(row));
    }
  } else if (command == "recover-s3") {
    detail::require_spherical(scene, command);
    SolveResult sol = recover_d(detail::config_grid(config.grid));
    detail::tensor_rows(report, sol);
    report.tolerance_ok = sol.residual <= config.tolerance;
  } else {
    fail(ErrorCode::ValidationError, "unknown command '" + command + "'");
  }

  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

}  // namespace eulerkin
