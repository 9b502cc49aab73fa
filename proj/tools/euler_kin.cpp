// Command-line front end: parses flags, loads the scene, dispatches the
// command, and writes the report. Exit codes: 0 success, 2 validation or
// input error, 3 tolerance failure on a verify command.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "eulerkin/run.hpp"

namespace {

eulerkin::GridSpec parse_grid(const std::string& text) {
  eulerkin::GridSpec g;
  std::istringstream in(text);
  char c1 = 0, c2 = 0;
  in >> g.count_r >> c1 >> g.count_s >> c2 >> g.r_max;
  eulerkin::require(bool(in) && c1 == ',' && c2 == ',' && in.peek() == EOF,
                    eulerkin::ErrorCode::ValidationError,
                    "--grid expects count_r,count_s,r_max");
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euler-characteristic integration and kinematic valuations"};
  std::string command, scene_path, out_path, format = "csv", grid_text;
  eulerkin::RunConfig config;

  app.add_option("command", command,
                 "integrate | convolve | pushforward | valuations | "
                 "kinematic-flat | crofton | verify-s3 | recover-s3")
      ->required();
  app.add_option("--scene", scene_path, "scene JSON file");
  app.add_option("--seed", config.seed, "random seed (default 0)");
  app.add_option("--samples", config.samples,
                 "Monte Carlo sample count (default 10000)");
  app.add_option("--grid", grid_text,
                 "count_r,count_s,r_max (default 20,20,pi/4)");
  app.add_option("--tol", config.tolerance,
                 "tolerance for verify commands (default 1e-8)");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "csv | json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!grid_text.empty()) config.grid = parse_grid(grid_text);
    config.format = format == "json" ? eulerkin::ReportFormat::kJson
                                     : eulerkin::ReportFormat::kCsv;
    eulerkin::Scene scene;
    if (!scene_path.empty()) {
      scene = eulerkin::parse_scene(scene_path);
    } else {
      eulerkin::require(
          command == "verify-s3" || command == "recover-s3",
          eulerkin::ErrorCode::ValidationError, "--scene is required");
      scene.spherical = true;
      scene.dim = 3;
    }
    eulerkin::Report report = eulerkin::run(command, scene, config);
    eulerkin::write_report(report, out_path, config.format);
    std::cerr << "euler-kin: " << command << " finished in "
              << eulerkin::format_double(report.wall_ms) << " ms\n";
    return report.tolerance_ok ? 0 : 3;
  } catch (const eulerkin::Error& e) {
    std::cerr << "euler-kin: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "euler-kin: " << e.what() << "\n";
    return 2;
  }
}
