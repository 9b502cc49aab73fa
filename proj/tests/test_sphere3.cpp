#include "eulerkin/sphere3.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

using namespace eulerkin;

namespace {

constexpr double kPi = std::numbers::pi;

auto code_is(ErrorCode c) {
  return Catch::Matchers::Predicate<Error>(
      [c](const Error& e) { return e.code() == c; });
}

Quat random_unit(RngStream& g) { return sample_quaternion(g); }

// Unit quaternion at geodesic distance theta from the identity along a
// random tangent direction.
Quat exp_tangent(double theta, RngStream& g) {
  double x, y, z, n;
  do {
    x = g.normal();
    y = g.normal();
    z = g.normal();
    n = std::sqrt(x * x + y * y + z * z);
  } while (n < 1e-6);
  double s = std::sin(theta) / n;
  return {std::cos(theta), s * x, s * y, s * z};
}

// Point of the closed ball B(center, radius), at controlled distance.
Quat ball_point(const Quat& center, double dist, RngStream& g) {
  return qnormalize(qmul(center, exp_tangent(dist, g)));
}

BallCF single(const Quat& c, double r, long long w = 1) {
  return {{{w, make_ball(c, r)}}};
}

GeodesicSubsphere axis_subsphere(int dim) {
  GeodesicSubsphere e{dim, {}};
  for (int k = 0; k <= dim; ++k) {
    std::array<double, 4> u{0, 0, 0, 0};
    u[size_t(k)] = 1.0;
    e.frame.push_back(u);
  }
  return e;
}

double ks_distance(std::vector<double> xs,
                   const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  double d = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double fx = cdf(xs[i]);
    d = std::max(d, std::abs(fx - double(i) / double(xs.size())));
    d = std::max(d, std::abs(double(i + 1) / double(xs.size()) - fx));
  }
  return d;
}

// Union Euler characteristic of at most three balls via the nerve: the
// pairwise tests use the triangle inequality on center distances, and the
// triple status is supplied by the caller from the construction.
long long nerve_chi(const std::vector<GeodesicBall>& balls,
                    bool triple_nonempty) {
  auto chi = static_cast<long long>(balls.size());
  for (size_t i = 0; i < balls.size(); ++i)
    for (size_t j = i + 1; j < balls.size(); ++j)
      if (geodesic_distance(balls[i].center, balls[j].center) <=
          balls[i].radius + balls[j].radius)
        --chi;
  if (balls.size() == 3 && triple_nonempty) ++chi;
  return chi;
}

}  // namespace

TEST_CASE("closed-form tube functions match frozen values") {
  CHECK(f_closed(0, 0.9) == 1.0);
  CHECK_THAT(f_closed(1, kPi / 2), Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(f_closed(2, kPi / 4), Catch::Matchers::WithinAbs(0.5, 1e-15));
  CHECK_THAT(f_closed(3, kPi / 2), Catch::Matchers::WithinAbs(0.5, 1e-15));
  CHECK_THAT(f_closed(3, kPi / 6),
             Catch::Matchers::WithinAbs(0.028834442811218646, 1e-14));
  CHECK_THAT(f_closed(1, 0.3),
             Catch::Matchers::WithinAbs(0.37071721315118217, 1e-14));
  CHECK_THAT(f_closed(2, 0.7),
             Catch::Matchers::WithinAbs(0.41501642854987947, 1e-14));
  CHECK(f_closed(1, 0.0) == 0.0);
  CHECK_THROWS_MATCHES(f_closed(1, -0.1), Error,
                       code_is(ErrorCode::OutOfRange));
  CHECK_THROWS_MATCHES(f_closed(1, 1.7), Error,
                       code_is(ErrorCode::OutOfRange));
  CHECK_THROWS_MATCHES(f_closed(4, 0.3), Error,
                       code_is(ErrorCode::OutOfRange));
}

TEST_CASE("quaternion geometry: distances, isometries, canonical signs") {
  RngStream g(11, stream_tag::kTestGen, 0);
  Quat one{1, 0, 0, 0};
  CHECK_THAT(geodesic_distance(one, Quat{-1, 0, 0, 0}),
             Catch::Matchers::WithinAbs(kPi, 1e-12));
  for (int it = 0; it < 100; ++it) {
    Quat p = random_unit(g), q = random_unit(g);
    SO4Element rot = sample_so4(g);
    CHECK(rot.e.w >= 0.0);
    CHECK_THAT(qdot(so4_apply(rot, p), so4_apply(rot, p)),
               Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(geodesic_distance(so4_apply(rot, p), so4_apply(rot, q)),
               Catch::Matchers::WithinAbs(geodesic_distance(p, q), 1e-12));
  }
  CHECK_THROWS_MATCHES(make_ball(one, 0.0), Error,
                       code_is(ErrorCode::OutOfRange));
  CHECK_THROWS_MATCHES(make_ball(one, kPi), Error,
                       code_is(ErrorCode::OutOfRange));
}

TEST_CASE("ball convolution multiplies centers and adds radii") {
  Quat one{1, 0, 0, 0};
  RngStream g(12, stream_tag::kTestGen, 0);
  Quat q1 = random_unit(g), q2 = random_unit(g);

  BallCF conv = convolve_balls(single(one, 0.3, 2), single(one, 0.4, 3));
  REQUIRE(conv.terms.size() == 1);
  CHECK(conv.terms[0].weight == 6);
  CHECK_THAT(conv.terms[0].ball.radius,
             Catch::Matchers::WithinAbs(0.7, 1e-15));
  CHECK_THAT(geodesic_distance(conv.terms[0].ball.center, one),
             Catch::Matchers::WithinAbs(0.0, 1e-12));

  BallCF rc = convolve_balls(single(q1, 0.35), single(q2, 0.3));
  REQUIRE(rc.terms.size() == 1);
  CHECK_THAT(geodesic_distance(rc.terms[0].ball.center, qmul(q1, q2)),
             Catch::Matchers::WithinAbs(0.0, 1e-12));

  CHECK_THROWS_MATCHES(convolve_balls(single(q1, 0.9), single(q2, 0.8)),
                       Error, code_is(ErrorCode::RadiusSumExceedsRegime));
}

TEST_CASE("convolved support verified by product membership sampling") {
  RngStream g(13, stream_tag::kTestOracle, 0);
  Quat q1 = random_unit(g), q2 = random_unit(g);
  const double r = 0.35, s = 0.3;
  Quat center = qnormalize(qmul(q1, q2));

  int outside = 0;
  double max_dist = 0;
  for (int it = 0; it < 100000; ++it) {
    Quat y = ball_point(q1, r * g.uniform01(), g);
    Quat z = ball_point(q2, s * g.uniform01(), g);
    double d = geodesic_distance(qmul(y, z), center);
    max_dist = std::max(max_dist, d);
    if (d > r + s + 1e-6) ++outside;
  }
  CHECK(outside == 0);
  CHECK(max_dist <= r + s + 1e-9);

  // The bound is attained: aligned one-parameter factors compose to a point
  // at distance exactly r + s from the product center.
  Quat axis{std::cos(r), std::sin(r), 0, 0};
  Quat axis2{std::cos(s), std::sin(s), 0, 0};
  Quat extreme = qmul(qmul(q1, qmul(axis, axis2)), q2);
  double want = r + s;
  // q1 * exp(u r) * exp(u s) * q2 lies in both factors' translates and at
  // distance r + s from q1 q2 because conjugation by q2 is an isometry.
  CHECK_THAT(geodesic_distance(qnormalize(extreme), qnormalize(qmul(q1, q2))),
             Catch::Matchers::WithinAbs(want, 1e-10));
}

TEST_CASE("rotations act on ball combinations as isometries") {
  RngStream g(14, stream_tag::kTestGen, 1);
  Quat c1 = random_unit(g), c2 = random_unit(g);
  BallCF phi = canonicalize(
      {{{1, make_ball(c1, 0.45)}, {2, make_ball(c2, 0.8)}}});
  SO4Element rot = sample_so4(g);
  BallCF moved = act(rot, phi);
  REQUIRE(moved.terms.size() == phi.terms.size());
  for (int it = 0; it < 200; ++it) {
    Quat p = random_unit(g);
    CHECK(evaluate(phi, p) == evaluate(moved, so4_apply(rot, p)));
  }
  SO4Element id{{1, 0, 0, 0}, {1, 0, 0, 0}};
  BallCF same = act(id, phi);
  for (size_t i = 0; i < phi.terms.size(); ++i)
    CHECK_THAT(
        geodesic_distance(same.terms[i].ball.center, phi.terms[i].ball.center),
        Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("convolution is associative and translation equivariant") {
  RngStream g(15, stream_tag::kTestGen, 2);
  Quat q1 = random_unit(g), q2 = random_unit(g), q3 = random_unit(g);
  BallCF a = single(q1, 0.2), b = single(q2, 0.25, 2), c = single(q3, 0.3);

  BallCF left = convolve_balls(convolve_balls(a, b), c);
  BallCF right = convolve_balls(a, convolve_balls(b, c));
  REQUIRE(left.terms.size() == 1);
  REQUIRE(right.terms.size() == 1);
  CHECK(left.terms[0].weight == right.terms[0].weight);
  CHECK_THAT(left.terms[0].ball.radius,
             Catch::Matchers::WithinAbs(right.terms[0].ball.radius, 1e-12));
  CHECK_THAT(geodesic_distance(left.terms[0].ball.center,
                               right.terms[0].ball.center),
             Catch::Matchers::WithinAbs(0.0, 1e-12));

  Quat t = random_unit(g);
  SO4Element left_translate{t, {1, 0, 0, 0}};
  SO4Element right_translate{{1, 0, 0, 0}, qconj(t)};
  BallCF lt = convolve_balls(act(left_translate, a), b);
  BallCF lt2 = act(left_translate, convolve_balls(a, b));
  CHECK_THAT(geodesic_distance(lt.terms[0].ball.center,
                               lt2.terms[0].ball.center),
             Catch::Matchers::WithinAbs(0.0, 1e-12));
  BallCF rt = convolve_balls(a, act(right_translate, b));
  BallCF rt2 = act(right_translate, convolve_balls(a, b));
  CHECK_THAT(geodesic_distance(rt.terms[0].ball.center,
                               rt2.terms[0].ball.center),
             Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("subsphere frames are orthonormal and points are uniform") {
  RngStream g(16, stream_tag::kTestGen, 3);
  for (int it = 0; it < 50; ++it) {
    GeodesicSubsphere e = sample_subsphere(2, g);
    REQUIRE(e.frame.size() == 3);
    for (size_t i = 0; i < 3; ++i)
      for (size_t j = i; j < 3; ++j) {
        double d = 0;
        for (int k = 0; k < 4; ++k) d += e.frame[i][k] * e.frame[j][k];
        CHECK_THAT(d, Catch::Matchers::WithinAbs(i == j ? 1.0 : 0.0, 1e-12));
      }
  }

  const int n = 20000;
  std::array<double, 4> mean{0, 0, 0, 0};
  for (int it = 0; it < n; ++it) {
    GeodesicSubsphere e = sample_subsphere(0, g);
    for (int k = 0; k < 4; ++k) mean[size_t(k)] += e.frame[0][size_t(k)];
  }
  double sigma = 0.5 / std::sqrt(double(n));
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(mean[size_t(k)] / n) < 4.0 * sigma);

  CHECK_THROWS_MATCHES(sample_subsphere(3, g), Error,
                       code_is(ErrorCode::OutOfRange));
}

TEST_CASE("pair distances of uniform points match the volume law") {
  RngStream g(17, stream_tag::kTestOracle, 1);
  const int n = 2000;
  std::vector<double> dists;
  dists.reserve(n);
  for (int it = 0; it < n; ++it)
    dists.push_back(geodesic_distance(random_unit(g), random_unit(g)));
  double d = ks_distance(dists, [](double t) {
    return (t - std::sin(t) * std::cos(t)) / kPi;
  });
  CHECK(d < 1.628 / std::sqrt(double(n)));  // 1% Kolmogorov-Smirnov level
}

TEST_CASE("great circles are unit-speed geodesics") {
  RngStream g(18, stream_tag::kTestGen, 4);
  GeodesicSubsphere e = sample_subsphere(1, g);
  for (int it = 0; it < 50; ++it) {
    double t1 = 2 * kPi * g.uniform01(), t2 = 2 * kPi * g.uniform01();
    auto at = [&](double t) {
      Quat p;
      p.w = e.frame[0][0] * std::cos(t) + e.frame[1][0] * std::sin(t);
      p.x = e.frame[0][1] * std::cos(t) + e.frame[1][1] * std::sin(t);
      p.y = e.frame[0][2] * std::cos(t) + e.frame[1][2] * std::sin(t);
      p.z = e.frame[0][3] * std::cos(t) + e.frame[1][3] * std::sin(t);
      return p;
    };
    double want = std::abs(std::remainder(t1 - t2, 2 * kPi));
    CHECK_THAT(geodesic_distance(at(t1), at(t2)),
               Catch::Matchers::WithinAbs(want, 1e-9));
  }
}

TEST_CASE("euler integral on points and circles") {
  Quat one{1, 0, 0, 0}, ey{0, 1, 0, 0}, ez{0, 0, 0, 1};
  GeodesicSubsphere pt{0, {{1, 0, 0, 0}}};
  BallCF phi = canonicalize(
      {{{2, make_ball(one, 0.5)}, {-1, make_ball(ez, 0.4)}}});
  CHECK(euler_integral_on_subsphere(phi, pt) == 2);
  GeodesicSubsphere far{0, {{0, 0, 0, 1}}};
  CHECK(euler_integral_on_subsphere(phi, far) == -1);

  GeodesicSubsphere circle = axis_subsphere(1);
  CHECK(euler_integral_on_subsphere(single(one, 0.4), circle) == 1);
  CHECK(euler_integral_on_subsphere(single(one, 0.4, -3), circle) == -3);
  // Center orthogonal to the circle plane: tiny ball misses, huge ball
  // swallows the whole circle, and a closed circle has chi = 0.
  CHECK(euler_integral_on_subsphere(single(ez, 0.4), circle) == 0);
  CHECK(euler_integral_on_subsphere(single(ez, 2.0), circle) == 0);
  // Two disjoint arcs.
  BallCF two = canonicalize(
      {{{1, make_ball(one, 0.3)}, {1, make_ball(ey, 0.3)}}});
  CHECK(euler_integral_on_subsphere(two, circle) == 2);
  // Overlapping arcs: the integral is linear, so weights add.
  Quat tilted{std::cos(0.4), std::sin(0.4), 0, 0};
  BallCF overlap = canonicalize(
      {{{1, make_ball(one, 0.3)}, {1, make_ball(tilted, 0.3)}}});
  CHECK(euler_integral_on_subsphere(overlap, circle) == 2);

  // Boundary tangent to the circle: rejected for resampling.
  Quat grazing{std::cos(0.5), 0, 0, std::sin(0.5)};
  CHECK_THROWS_MATCHES(
      euler_integral_on_subsphere(single(grazing, 0.5), circle), Error,
      code_is(ErrorCode::DegenerateTangency));
}

TEST_CASE("euler integral on great 2-spheres classifies caps") {
  Quat one{1, 0, 0, 0}, ez{0, 0, 0, 1};
  GeodesicSubsphere sphere = axis_subsphere(2);
  CHECK(euler_integral_on_subsphere(single(one, 0.4), sphere) == 1);
  CHECK(euler_integral_on_subsphere(single(one, 2.0, 3), sphere) == 3);
  CHECK(euler_integral_on_subsphere(single(ez, 0.4), sphere) == 0);
  // Ball centered off the subsphere but engulfing it entirely: chi(S^2) = 2.
  CHECK(euler_integral_on_subsphere(single(ez, 2.0), sphere) == 2);

  // Tangency of the cap boundary and of two cap boundaries.
  Quat graze{std::cos(0.5), 0, 0, std::sin(0.5)};
  CHECK_THROWS_MATCHES(euler_integral_on_subsphere(single(graze, 0.5), sphere),
                       Error, code_is(ErrorCode::DegenerateTangency));
  Quat c2{std::cos(0.6), std::sin(0.6), 0, 0};
  BallCF tangent_pair = canonicalize(
      {{{1, make_ball(one, 0.3)}, {1, make_ball(c2, 0.3)}}});
  CHECK_THROWS_MATCHES(euler_integral_on_subsphere(tangent_pair, sphere),
                       Error, code_is(ErrorCode::DegenerateTangency));

  // More than six distinct balls meeting the subsphere is out of contract.
  BallCF seven;
  for (int k = 0; k < 7; ++k) {
    Quat c = qnormalize({1.0, 0.01 * (k + 1), 0, 0});
    seven.terms.push_back({1, make_ball(c, 0.3)});
  }
  CHECK_THROWS_MATCHES(euler_integral_on_subsphere(seven, sphere), Error,
                       code_is(ErrorCode::NerveBoundExceeded));
}

TEST_CASE("counting valuation agrees with the nerve on unions") {
  // Three balls whose centers sit 0.5 away from a common pole, 120 degrees
  // apart. With radius 0.55 the pole lies in all three (union contractible);
  // with radius 0.45 the triple intersection is empty and the union is a
  // ring, so the nerve gives chi = 0.
  std::vector<GeodesicBall> tight, ring;
  for (int k = 0; k < 3; ++k) {
    double ang = 2 * kPi * k / 3.0;
    Quat c{std::cos(0.5), std::sin(0.5) * std::cos(ang),
           std::sin(0.5) * std::sin(ang), 0};
    tight.push_back(make_ball(c, 0.55));
    ring.push_back(make_ball(c, 0.45));
  }
  Quat pole{1, 0, 0, 0};
  for (const auto& b : tight)
    REQUIRE(geodesic_distance(pole, b.center) <= b.radius);
  for (const auto& b : ring)
    REQUIRE(geodesic_distance(pole, b.center) > b.radius);

  CHECK(nerve_chi(tight, true) == 1);
  CHECK(nerve_chi(ring, false) == 0);

  // The counting valuation itself is linear: it sees weights, not unions.
  BallCF phi;
  for (const auto& b : ring) phi.terms.push_back({1, b});
  McEstimate nu0 = crofton_valuation(0, phi, 0, 99);
  CHECK(nu0.estimate == 3.0);
  CHECK(nu0.std_error == 0.0);
  CHECK(euler_integral(phi) == 3);
}

TEST_CASE("crofton sampling reproduces the closed forms") {
  RngStream g(19, stream_tag::kTestGen, 5);
  Quat c = random_unit(g);
  const long long n = 20000;
  for (int i : {1, 2, 3}) {
    for (double r : {0.2, 0.7}) {
      McEstimate est = crofton_valuation(i, single(c, r), n, 7000 + i);
      REQUIRE(est.std_error > 0.0);
      CHECK(est.std_error < 0.02);
      CHECK(std::abs(est.estimate - f_closed(i, r)) <
            3.5 * est.std_error + 1e-9);
    }
  }
  McEstimate wide = crofton_valuation(2, single(c, 1.0), n, 7777);
  CHECK(std::abs(wide.estimate - f_closed(2, 1.0)) <
        3.5 * wide.std_error + 1e-9);

  CHECK_THROWS_MATCHES(crofton_valuation(2, single(c, 0.5), 0, 1), Error,
                       code_is(ErrorCode::InvalidSampleCount));
  CHECK_THROWS_MATCHES(crofton_valuation(4, single(c, 0.5), 10, 1), Error,
                       code_is(ErrorCode::OutOfRange));
}

TEST_CASE("crofton error shrinks like the square root of the sample count") {
  RngStream g(20, stream_tag::kTestGen, 6);
  Quat c = random_unit(g);
  McEstimate coarse = crofton_valuation(2, single(c, 0.7), 2500, 41);
  McEstimate fine = crofton_valuation(2, single(c, 0.7), 10000, 42);
  double ratio = coarse.std_error / fine.std_error;
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.4);
}

TEST_CASE("crofton valuations are rotation invariant and linear") {
  RngStream g(21, stream_tag::kTestGen, 7);
  Quat c1 = random_unit(g), c2 = random_unit(g);
  BallCF phi = canonicalize(
      {{{1, make_ball(c1, 0.4)}, {2, make_ball(c2, 0.6)}}});
  const long long n = 20000;

  McEstimate base = crofton_valuation(2, phi, n, 501);
  McEstimate moved = crofton_valuation(2, act(sample_so4(g), phi), n, 502);
  double comb = std::hypot(base.std_error, moved.std_error);
  CHECK(std::abs(base.estimate - moved.estimate) < 3.5 * comb);

  double closed = closed_form_valuation(2, phi);
  CHECK(std::abs(base.estimate - closed) < 3.5 * base.std_error + 1e-9);

  McEstimate count = crofton_valuation(0, phi, 0, 0);
  CHECK(count.estimate == 3.0);
}

TEST_CASE("stored kinematic table satisfies the addition identity") {
  std::vector<std::pair<double, double>> grid;
  for (int a = 0; a < 20; ++a)
    for (int b = 0; b < 20; ++b)
      grid.push_back({(a + 0.5) * kPi / 4 / 20, (b + 0.5) * kPi / 4 / 20});
  std::array<double, 4> res = verify_m_table(grid);
  CHECK(res[0] == 0.0);
  for (int i = 0; i < 4; ++i) CHECK(res[size_t(i)] <= 1e-10);

  CHECK_THROWS_MATCHES(verify_m_table({{0.9, 0.9}}), Error,
                       code_is(ErrorCode::OutOfRange));
  std::vector<std::pair<double, double>> empty;
  CHECK_THROWS_MATCHES(verify_m_table(empty), Error,
                       code_is(ErrorCode::ValidationError));
}

TEST_CASE("template solve recovers the kinematic table from scratch") {
  std::vector<std::pair<double, double>> grid;
  for (int a = 0; a < 15; ++a)
    for (int b = 0; b < 15; ++b)
      grid.push_back({0.05 + a * (kPi / 4 - 0.1) / 14,
                      0.05 + b * (kPi / 4 - 0.1) / 14});
  SolveResult sol = recover_d(grid);
  CHECK(sol.residual <= 1e-9);
  const KinematicTensor& table = s3_kinematic_table();
  for (int i = 0; i <= 3; ++i)
    for (int k = 0; k <= 3; ++k)
      for (int l = 0; l <= 3; ++l)
        CHECK_THAT(sol.tensor.at(i, k, l),
                   Catch::Matchers::WithinAbs(table.at(i, k, l), 1e-6));

  std::vector<std::pair<double, double>> small(50, {0.3, 0.3});
  CHECK_THROWS_MATCHES(recover_d(small), Error,
                       code_is(ErrorCode::ValidationError));
}

TEST_CASE("kinematic identity holds exactly in closed form") {
  RngStream g(22, stream_tag::kTestGen, 8);
  Quat q1 = random_unit(g), q2 = random_unit(g);
  Quat p1 = random_unit(g), p2 = random_unit(g);

  KinematicCheck simple =
      mc_kinematic_s3(single(q1, 0.3), single(p1, 0.4), 2, 50, 0, 31);
  CHECK_THAT(simple.lhs.estimate,
             Catch::Matchers::WithinAbs(f_closed(2, 0.7), 1e-12));
  CHECK(simple.lhs.std_error <= 1e-12);
  CHECK_THAT(simple.lhs.estimate,
             Catch::Matchers::WithinAbs(simple.rhs, 1e-10));

  BallCF phi1 = canonicalize(
      {{{1, make_ball(q1, 0.3)}, {1, make_ball(q2, 0.35)}}});
  BallCF phi2 = canonicalize(
      {{{1, make_ball(p1, 0.2)}, {2, make_ball(p2, 0.25)}}});
  for (int i : {1, 2, 3}) {
    KinematicCheck mixed = mc_kinematic_s3(phi1, phi2, i, 150, 0, 32);
    CHECK(mixed.lhs.std_error <= 1e-12);
    CHECK_THAT(mixed.lhs.estimate,
               Catch::Matchers::WithinAbs(mixed.rhs, 1e-9));
  }

  KinematicCheck count = mc_kinematic_s3(phi1, phi2, 0, 25, 0, 33);
  CHECK(count.lhs.estimate == 6.0);  // weight sums 2 and 3 multiply
  CHECK(count.lhs.std_error == 0.0);
  CHECK(count.rhs == 6.0);
}

TEST_CASE("kinematic identity holds under full Monte Carlo") {
  RngStream g(23, stream_tag::kTestGen, 9);
  Quat q = random_unit(g), p = random_unit(g);
  KinematicCheck mc =
      mc_kinematic_s3(single(q, 0.35), single(p, 0.25), 1, 100, 400, 34);
  REQUIRE(mc.lhs.std_error > 0.0);
  CHECK(std::abs(mc.lhs.estimate - mc.rhs) < 4.0 * mc.lhs.std_error);

  KinematicCheck again =
      mc_kinematic_s3(single(q, 0.35), single(p, 0.25), 1, 100, 400, 34);
  CHECK(again.lhs.estimate == mc.lhs.estimate);
  KinematicCheck other =
      mc_kinematic_s3(single(q, 0.35), single(p, 0.25), 1, 100, 400, 35);
  CHECK(other.lhs.estimate != mc.lhs.estimate);

  CHECK_THROWS_MATCHES(
      mc_kinematic_s3(single(q, 0.3), single(p, 0.4), 5, 10, 0, 1), Error,
      code_is(ErrorCode::OutOfRange));
  CHECK_THROWS_MATCHES(
      mc_kinematic_s3(single(q, 0.3), single(p, 0.4), 1, 0, 0, 1), Error,
      code_is(ErrorCode::InvalidSampleCount));
  CHECK_THROWS_MATCHES(
      mc_kinematic_s3(single(q, 0.9), single(p, 0.8), 1, 5, 0, 1), Error,
      code_is(ErrorCode::RadiusSumExceedsRegime));
}
