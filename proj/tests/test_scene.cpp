#include "eulerkin/run.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

using namespace eulerkin;

namespace {

auto code_is(ErrorCode c) {
  return Catch::Matchers::Predicate<Error>(
      [c](const Error& e) { return e.code() == c; });
}

const char* kIntervalScene = R"({
  "space": {"euclidean": 1},
  "objects": {
    "u": {"cf": {"vertices": [["0"], ["1"]],
                 "simplices": [{"v": [0], "w": 1},
                               {"v": [1], "w": 1},
                               {"v": [0, 1], "w": 1}]}}
  }
})";

const char* kBallScene = R"({
  "space": "sphere3",
  "objects": {
    "b": {"balls": [{"c": [1, 0, 0, 0], "r": 0.5, "w": 1}]}
  }
})";

std::string square_scene() {
  return R"({
    "space": {"euclidean": 2},
    "objects": {
      "sq": {"polytopes": [{"vertices": [["0","0"],["1","0"],["0","1"],["1","1"]],
                            "w": 1}]}
    },
    "metadata": {"note": "unit square"}
  })";
}

const ReportRow& find_row(const Report& r, const std::string& name, int i,
                          int k, int l) {
  for (const auto& row : r.rows)
    if (row.name == name && row.i && *row.i == i && row.k && *row.k == k &&
        row.l && *row.l == l)
      return row;
  FAIL("row not found");
  static ReportRow dummy;
  return dummy;
}

}  // namespace

TEST_CASE("scene parsing handles both spaces and validates objects") {
  Scene interval = parse_scene_text(kIntervalScene);
  CHECK(!interval.spherical);
  CHECK(interval.dim == 1);
  REQUIRE(interval.cfs.size() == 1);
  CHECK(interval.cfs[0].first == "u");
  CHECK(euler_integral(interval.cfs[0].second) == 1);

  Scene balls = parse_scene_text(kBallScene);
  CHECK(balls.spherical);
  REQUIRE(balls.balls.size() == 1);
  CHECK(balls.balls[0].second.terms.size() == 1);
  CHECK(balls.balls[0].second.terms[0].ball.radius == 0.5);
}

TEST_CASE("scene validation rejects malformed inputs") {
  auto expect_invalid = [](const std::string& text) {
    CHECK_THROWS_MATCHES(parse_scene_text(text), Error,
                         code_is(ErrorCode::ValidationError));
  };
  // Vertex arity not matching the declared dimension.
  expect_invalid(R"({"space":{"euclidean":2},"objects":
      {"u":{"cf":{"vertices":[["0"],["1"]],"simplices":[{"v":[0],"w":1}]}}}})");
  // Unknown object kind.
  expect_invalid(R"({"space":{"euclidean":1},"objects":{"u":{"thing":1}}})");
  // Balls in a euclidean scene and simplicial data on the sphere.
  expect_invalid(R"({"space":{"euclidean":1},"objects":
      {"u":{"balls":[{"c":[1,0,0,0],"r":0.5,"w":1}]}}})");
  expect_invalid(R"({"space":"sphere3","objects":
      {"u":{"cf":{"vertices":[["0","0","0"]],"simplices":[]}}}})");
  // Bad rational text and out-of-range simplex ids.
  expect_invalid(R"({"space":{"euclidean":1},"objects":
      {"u":{"cf":{"vertices":[["x"]],"simplices":[{"v":[0],"w":1}]}}}})");
  expect_invalid(R"({"space":{"euclidean":1},"objects":
      {"u":{"cf":{"vertices":[["0"]],"simplices":[{"v":[4],"w":1}]}}}})");
  // Ball radius outside (0, pi) and bad center arity.
  expect_invalid(R"({"space":"sphere3","objects":
      {"b":{"balls":[{"c":[1,0,0,0],"r":4.0,"w":1}]}}})");
  expect_invalid(R"({"space":"sphere3","objects":
      {"b":{"balls":[{"c":[1,0,0],"r":0.5,"w":1}]}}})");
  // Bad space declarations and names.
  expect_invalid(R"({"space":{"euclidean":7},"objects":{}})");
  expect_invalid(R"({"space":"sphere4","objects":{}})");
  expect_invalid(R"({"space":"sphere3","objects":{"a b":{"balls":[]}}})");

  CHECK_THROWS_MATCHES(parse_scene_text("{\n  \"space\": 1,\n  oops\n}"),
                       Error, code_is(ErrorCode::ParseError));
  try {
    parse_scene_text("{\n  \"space\": 1,\n  oops\n}");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_MATCHES(parse_scene("/no/such/file.json"), Error,
                       code_is(ErrorCode::IoError));
}

TEST_CASE("scenes round-trip through write and parse without loss") {
  Scene mixed = parse_scene_text(R"({
    "space": {"euclidean": 2},
    "objects": {
      "tri": {"cf": {"vertices": [["0","0"],["1/3","0"],["0","2/7"]],
                     "simplices": [{"v":[0],"w":1},{"v":[1],"w":1},
                                   {"v":[2],"w":1},{"v":[0,1],"w":1},
                                   {"v":[0,2],"w":1},{"v":[1,2],"w":1},
                                   {"v":[0,1,2],"w":1}]}},
      "sq": {"polytopes": [{"vertices": [["0","0"],["1","0"],["0","1"],
                                         ["1","1"]], "w": 2}]}
    },
    "metadata": {"tag": "round-trip"}
  })");
  std::string once = write_scene(mixed);
  std::string twice = write_scene(parse_scene_text(once));
  CHECK(once == twice);
  CHECK(once.find("1/3") != std::string::npos);
  CHECK(once.find("2/7") != std::string::npos);

  Scene sphere = parse_scene_text(R"({
    "space": "sphere3",
    "objects": {
      "b": {"balls": [{"c": [0.7071067811865476, 0.7071067811865475, 0, 0],
                       "r": 0.52359877559829882, "w": -2},
                      {"c": [1, 0, 0, 0], "r": 0.25, "w": 1}]}
    }
  })");
  std::string s1 = write_scene(sphere);
  std::string s2 = write_scene(parse_scene_text(s1));
  CHECK(s1 == s2);
}

TEST_CASE("integrate, pushforward, and convolve report exact integrals") {
  RunConfig config;
  Scene interval = parse_scene_text(kIntervalScene);

  Report integ = run("integrate", interval, config);
  REQUIRE(integ.rows.size() == 1);
  CHECK(integ.rows[0].name == "u");
  REQUIRE(integ.rows[0].value);
  CHECK(integ.rows[0].value->exact);
  CHECK(integ.rows[0].value->rat == 1);

  Report push = run("pushforward", parse_scene_text(square_scene()), config);
  REQUIRE(push.rows.size() == 1);
  CHECK(push.rows[0].value->rat == 1);

  Scene pair = parse_scene_text(R"({
    "space": {"euclidean": 1},
    "objects": {
      "a": {"polytopes": [{"vertices": [["0"],["1"]], "w": 1}]},
      "b": {"polytopes": [{"vertices": [["0"],["1"]], "w": 1}]}
    }
  })");
  Report conv = run("convolve", pair, config);
  REQUIRE(conv.rows.size() == 2);
  CHECK(conv.rows[0].name == "integral");
  CHECK(conv.rows[0].value->rat == 1);
  CHECK(conv.rows[1].name == "cells");
  CHECK(conv.rows[1].value->rat == 3);  // two endpoints and one open segment

  CHECK_THROWS_MATCHES(run("convolve", interval, config), Error,
                       code_is(ErrorCode::ValidationError));
  CHECK_THROWS_MATCHES(run("no-such-command", interval, config), Error,
                       code_is(ErrorCode::ValidationError));
}

TEST_CASE("valuations command reports intrinsic volumes and tube functions") {
  RunConfig config;
  Report vals = run("valuations", parse_scene_text(square_scene()), config);
  REQUIRE(vals.rows.size() == 3);
  CHECK_THAT(vals.rows[0].value->num, Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(vals.rows[1].value->num, Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK_THAT(vals.rows[2].value->num, Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(vals.metadata.size() == 1);

  Report nus = run("valuations", parse_scene_text(kBallScene), config);
  REQUIRE(nus.rows.size() == 4);
  for (int i = 0; i <= 3; ++i) {
    CHECK(*nus.rows[size_t(i)].i == i);
    CHECK_THAT(nus.rows[size_t(i)].value->num,
               Catch::Matchers::WithinAbs(f_closed(i, 0.5), 1e-15));
  }
}

TEST_CASE("crofton command samples all four valuations deterministically") {
  RunConfig config;
  config.samples = 4000;
  config.seed = 99;
  Scene scene = parse_scene_text(kBallScene);
  Report rep = run("crofton", scene, config);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.rows[0].value->num == 1.0);
  CHECK(*rep.rows[0].se == 0.0);
  for (int i = 1; i <= 3; ++i) {
    const ReportRow& row = rep.rows[size_t(i)];
    REQUIRE(row.se);
    CHECK(std::abs(row.value->num - f_closed(i, 0.5)) <
          3.5 * *row.se + 1e-9);
  }
  CHECK(render_json(rep) == render_json(run("crofton", scene, config)));
  CHECK(render_csv(rep) == render_csv(run("crofton", scene, config)));
}

TEST_CASE("verify and recover commands gate on tolerance") {
  RunConfig config;
  Scene sphere;
  sphere.spherical = true;
  sphere.dim = 3;

  config.tolerance = 1e-10;
  Report ok = run("verify-s3", sphere, config);
  CHECK(ok.tolerance_ok);
  REQUIRE(ok.rows.size() == 4);
  for (const auto& row : ok.rows) {
    REQUIRE(row.residual);
    CHECK(*row.residual <= 1e-10);
  }

  config.tolerance = 1e-18;
  CHECK(!run("verify-s3", sphere, config).tolerance_ok);

  config.tolerance = 1e-9;
  Report rec = run("recover-s3", sphere, config);
  CHECK(rec.tolerance_ok);
  REQUIRE(rec.rows.size() == 65);
  const ReportRow& entry = find_row(rec, "d", 2, 1, 1);
  CHECK_THAT(entry.value->num,
             Catch::Matchers::WithinAbs(1.2337005501361697, 1e-6));
  CHECK(rec.rows.back().name == "residual");
  CHECK(*rec.rows.back().residual <= 1e-9);

  CHECK_THROWS_MATCHES(run("verify-s3", parse_scene_text(kIntervalScene),
                           config),
                       Error, code_is(ErrorCode::ValidationError));
}

TEST_CASE("flat kinematic command emits the full tensor") {
  RunConfig config;
  Scene plane;
  plane.dim = 2;
  Report rep = run("kinematic-flat", plane, config);
  REQUIRE(rep.rows.size() == 28);  // 27 tensor entries plus the residual row
  const ReportRow& cross = find_row(rep, "d", 2, 1, 1);
  CHECK_THAT(cross.value->num,
             Catch::Matchers::WithinAbs(2.0 / std::numbers::pi, 1e-10));

  Scene line;
  line.dim = 1;
  CHECK_THROWS_MATCHES(run("kinematic-flat", line, config), Error,
                       code_is(ErrorCode::ValidationError));
}

TEST_CASE("run validates its configuration") {
  Scene sphere;
  sphere.spherical = true;
  sphere.dim = 3;
  RunConfig config;

  config.samples = 0;
  CHECK_THROWS_MATCHES(run("verify-s3", sphere, config), Error,
                       code_is(ErrorCode::InvalidSampleCount));
  config.samples = 10;
  config.tolerance = -1;
  CHECK_THROWS_MATCHES(run("verify-s3", sphere, config), Error,
                       code_is(ErrorCode::ValidationError));
  config.tolerance = 1e-8;
  config.grid.r_max = 2.0;  // past pi/2
  CHECK_THROWS_MATCHES(run("verify-s3", sphere, config), Error,
                       code_is(ErrorCode::ValidationError));
  config.grid.r_max = 0.7;
  config.grid.count_r = 0;
  CHECK_THROWS_MATCHES(run("verify-s3", sphere, config), Error,
                       code_is(ErrorCode::ValidationError));
}

TEST_CASE("reports render to stable CSV and schema-versioned JSON") {
  RunConfig config;
  Scene empty = parse_scene_text(
      R"({"space":{"euclidean":1},"objects":{}})");
  Report none = run("integrate", empty, config);
  CHECK(render_csv(none) == "name,i,k,l,value,se,residual\n");

  config.samples = 500;
  Report rep = run("crofton", parse_scene_text(kBallScene), config);
  std::string csv = render_csv(rep);
  CHECK(csv.rfind("name,i,k,l,value,se,residual\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  std::string json_text = render_json(rep);
  auto parsed = nlohmann::ordered_json::parse(json_text);
  CHECK(parsed["schema"] == "euler-kinematics/v1");
  CHECK(parsed["space"] == "sphere3");
  CHECK(parsed["results"].size() == 4);
  // Floats survive the round trip bit-for-bit.
  double back = parsed["results"][2]["value"].get<double>();
  CHECK(back == rep.rows[2].value->num);

  // Exact values appear as integers or "p/q" strings in both formats.
  Report integ = run("integrate", parse_scene_text(kIntervalScene), config);
  CHECK(render_csv(integ).find("u,,,,1,,\n") != std::string::npos);
  auto ji = nlohmann::ordered_json::parse(render_json(integ));
  CHECK(ji["results"][0]["value"] == "1");
}

TEST_CASE("reports write to files and surface io failures") {
  RunConfig config;
  Report rep = run("integrate", parse_scene_text(kIntervalScene), config);
  std::string path = "test_report_out.csv";
  write_report(rep, path, ReportFormat::kCsv);
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::string line;
  std::getline(in, line);
  CHECK(line == "name,i,k,l,value,se,residual");
  in.close();
  std::remove(path.c_str());

  CHECK_THROWS_MATCHES(
      write_report(rep, "/no/such/dir/report.csv", ReportFormat::kCsv),
      Error, code_is(ErrorCode::IoError));
}
