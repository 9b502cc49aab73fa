#pragma once

// Constructible functions on the unit 3-sphere generated by geodesic balls,
// with the sphere identified with the unit quaternions so that rotations of
// R^4 act as x -> e x conj(f). Crofton-style valuations nu_i average the
// Euler characteristic of intersections with random totally geodesic
// subspheres; the kinematic coefficient table for these valuations is kept
// in one verified constant and independently re-derived by template solving.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

#include "eulerkin/error.hpp"
#include "eulerkin/kinematic.hpp"
#include "eulerkin/rng.hpp"

namespace eulerkin {

struct Quat {
  double w = 1, x = 0, y = 0, z = 0;
};

inline Quat qmul(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quat qconj(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

inline double qdot(const Quat& a, const Quat& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Quat qnormalize(Quat q) {
  double n = std::sqrt(qdot(q, q));
  require(n > 1e-12, ErrorCode::ValidationError,
          "qnormalize: vanishing quaternion");
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

// Geodesic distance on the unit sphere; the sphere itself, not its quotient
// by the antipodal map, so opposite points are at distance pi.
inline double geodesic_distance(const Quat& a, const Quat& b) {
  return std::acos(std::min(1.0, std::max(-1.0, qdot(a, b))));
}

struct GeodesicBall {
  Quat center;
  double radius = 0;  // in (0, pi); membership is distance <= radius
};

inline GeodesicBall make_ball(Quat center, double radius) {
  require(radius > 0 && radius < std::numbers::pi, ErrorCode::OutOfRange,
          "make_ball: radius must lie in (0, pi)");
  return {qnormalize(center), radius};
}

struct WeightedBall {
  long long weight = 0;
  GeodesicBall ball;
};

// Integer combination of geodesic ball indicators.
struct BallCF {
  std::vector<WeightedBall> terms;
};

inline BallCF canonicalize(BallCF f) {
  std::map<std::array<double, 5>, long long> acc;
  for (const auto& t : f.terms) {
    const Quat& c = t.ball.center;
    acc[{c.w, c.x, c.y, c.z, t.ball.radius}] += t.weight;
  }
  f.terms.clear();
  for (const auto& [key, w] : acc)
    if (w != 0)
      f.terms.push_back({w, {{key[0], key[1], key[2], key[3]}, key[4]}});
  return f;
}

inline long long evaluate(const BallCF& f, const Quat& p) {
  long long v = 0;
  for (const auto& t : f.terms)
    if (geodesic_distance(p, t.ball.center) <= t.ball.radius) v += t.weight;
  return v;
}

// Euler integral over the whole sphere: each ball of radius < pi is
// contractible, so the integral is the weight sum.
inline long long euler_integral(const BallCF& f) {
  long long v = 0;
  for (const auto& t : f.terms) v += t.weight;
  return v;
}

// Rotation of R^4 presented by a pair of unit quaternions acting as
// x -> e x conj(f); (e, f) and (-e, -f) act identically, so the sign of
// e.w is canonicalized.
struct SO4Element {
  Quat e, f;
};

inline SO4Element canonicalize(SO4Element g) {
  if (g.e.w < 0) {
    g.e = {-g.e.w, -g.e.x, -g.e.y, -g.e.z};
    g.f = {-g.f.w, -g.f.x, -g.f.y, -g.f.z};
  }
  return g;
}

inline Quat so4_apply(const SO4Element& g, const Quat& p) {
  return qnormalize(qmul(qmul(g.e, p), qconj(g.f)));
}

// Isometries map balls to balls with the same radius.
inline BallCF act(const SO4Element& g, BallCF f) {
  for (auto& t : f.terms) t.ball.center = so4_apply(g, t.ball.center);
  return canonicalize(std::move(f));
}

inline Quat sample_quaternion(RngStream& g) {
  double n;
  Quat q;
  do {
    q = {g.normal(), g.normal(), g.normal(), g.normal()};
    n = std::sqrt(qdot(q, q));
  } while (n < 1e-6);
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

inline SO4Element sample_so4(RngStream& g) {
  return canonicalize({sample_quaternion(g), sample_quaternion(g)});
}

// Group convolution of ball indicators. Balls around the identity multiply
// like intervals under the exponential map, and both translations are
// isometries, so 1_{B(a,r)} * 1_{B(b,s)} = 1_{B(ab, r+s)} whenever
// r + s < pi/2 (each factor is then geodesically convex and every
// convolution fiber is a convex intersection with chi = 1).
inline BallCF convolve_balls(const BallCF& f, const BallCF& g) {
  BallCF out;
  for (const auto& a : f.terms)
    for (const auto& b : g.terms) {
      double rs = a.ball.radius + b.ball.radius;
      require(rs < std::numbers::pi / 2.0, ErrorCode::RadiusSumExceedsRegime,
              "convolve_balls: radius sum must stay below pi/2");
      out.terms.push_back({a.weight * b.weight,
                           {qnormalize(qmul(a.ball.center, b.ball.center)),
                            rs}});
    }
  return canonicalize(std::move(out));
}

// Normalized tube-volume functions of geodesic balls: the expected Euler
// characteristic of a ball's intersection with a random totally geodesic
// subsphere of codimension i, as a closed form in the radius.
inline double f_closed(int i, double r) {
  require(i >= 0 && i <= 3, ErrorCode::OutOfRange,
          "f_closed: index must lie in 0..3");
  require(r >= 0 && r <= std::numbers::pi / 2.0, ErrorCode::OutOfRange,
          "f_closed: radius must lie in [0, pi/2]");
  switch (i) {
    case 0:
      return 1.0;
    case 1:
      return 2.0 * (std::cos(r) * std::sin(r) + r) / std::numbers::pi;
    case 2:
      return std::sin(r) * std::sin(r);
    default:
      return (r - std::cos(r) * std::sin(r)) / std::numbers::pi;
  }
}

// Coefficient table of the spherical additive kinematic expansion
// nu_i(phi * g psi) averaged over rotations = sum d[i][k][l] nu_k nu_l.
// Fixed here once; the recovery path below never reads it, so verification
// and re-derivation stay independent.
inline const KinematicTensor& s3_kinematic_table() {
  static const KinematicTensor table = [] {
    const double p2 = std::numbers::pi * std::numbers::pi;
    KinematicTensor t(4);
    t.at(0, 0, 0) = 1;
    t.at(1, 0, 1) = t.at(1, 1, 0) = 1;
    t.at(1, 1, 2) = t.at(1, 2, 1) = -1;
    t.at(1, 2, 3) = t.at(1, 3, 2) = 2;
    t.at(2, 0, 2) = t.at(2, 2, 0) = 1;
    t.at(2, 1, 1) = p2 / 8;
    t.at(2, 1, 3) = t.at(2, 3, 1) = -p2 / 4;
    t.at(2, 2, 2) = -2;
    t.at(2, 3, 3) = p2 / 2;
    t.at(3, 0, 3) = t.at(3, 3, 0) = 1;
    t.at(3, 1, 2) = t.at(3, 2, 1) = 0.5;
    t.at(3, 2, 3) = t.at(3, 3, 2) = -1;
    return t;
  }();
  return table;
}

// Totally geodesic d-sphere, cut out by the span of an orthonormal frame of
// d+1 vectors; d = 0 is a single point (so the codimension-3 valuation is
// the normalized volume).
struct GeodesicSubsphere {
  int dim = 0;
  std::vector<std::array<double, 4>> frame;
};

inline GeodesicSubsphere sample_subsphere(int d, RngStream& g) {
  require(d >= 0 && d <= 2, ErrorCode::OutOfRange,
          "sample_subsphere: dimension must lie in 0..2");
  GeodesicSubsphere e{d, {}};
  while (int(e.frame.size()) < d + 1) {
    std::array<double, 4> v = {g.normal(), g.normal(), g.normal(),
                               g.normal()};
    for (const auto& u : e.frame) {
      double s = 0;
      for (int c = 0; c < 4; ++c) s += u[c] * v[c];
      for (int c = 0; c < 4; ++c) v[c] -= s * u[c];
    }
    double n = 0;
    for (double c : v) n += c * c;
    n = std::sqrt(n);
    if (n < 1e-6) continue;
    for (double& c : v) c /= n;
    e.frame.push_back(v);
  }
  return e;
}

namespace detail {

inline constexpr double kTangencyTol = 1e-9;

inline double frame_dot(const std::array<double, 4>& u, const Quat& c) {
  return u[0] * c.w + u[1] * c.x + u[2] * c.y + u[3] * c.z;
}

// Euler integral of the restriction to a great circle by endpoint sweep.
// Each ball meets the circle in a closed arc, the whole circle, or nothing;
// the integral of the resulting step function is computed stratum by
// stratum: points count +1, open gaps count -1 times their value. Whole
// circles contribute zero because a circle has as many gaps as endpoints.
inline long long circle_integral(const BallCF& phi,
                                 const GeodesicSubsphere& e) {
  const double two_pi = 2.0 * std::numbers::pi;
  struct Arc {
    double mid, half;
    long long weight;
  };
  std::vector<Arc> arcs;
  for (const auto& t : phi.terms) {
    double a = frame_dot(e.frame[0], t.ball.center);
    double b = frame_dot(e.frame[1], t.ball.center);
    double amp = std::sqrt(a * a + b * b);
    double cr = std::cos(t.ball.radius);
    require(std::abs(amp - std::abs(cr)) > kTangencyTol,
            ErrorCode::DegenerateTangency,
            "circle_integral: ball boundary tangent to the circle");
    if (amp < std::abs(cr)) continue;  // empty or full: both contribute 0
    double mid = std::atan2(b, a);
    double half = std::acos(std::min(1.0, std::max(-1.0, cr / amp)));
    arcs.push_back({mid, half, t.weight});
  }
  if (arcs.empty()) return 0;
  std::vector<double> ends;
  for (const auto& a : arcs) {
    for (double s : {a.mid - a.half, a.mid + a.half}) {
      double v = std::fmod(s, two_pi);
      if (v < 0) v += two_pi;
      ends.push_back(v);
    }
  }
  std::sort(ends.begin(), ends.end());
  for (size_t i = 0; i < ends.size(); ++i) {
    double gap = (i + 1 < ends.size()) ? ends[i + 1] - ends[i]
                                       : ends[0] + two_pi - ends[i];
    require(gap > kTangencyTol, ErrorCode::DegenerateTangency,
            "circle_integral: arc endpoints too close to separate");
  }
  auto value_at = [&](double theta) {
    long long v = 0;
    for (const auto& a : arcs) {
      double d = std::abs(std::remainder(theta - a.mid, two_pi));
      if (d <= a.half + 1e-12) v += a.weight;
    }
    return v;
  };
  long long chi = 0;
  for (size_t i = 0; i < ends.size(); ++i) {
    chi += value_at(ends[i]);
    double next = (i + 1 < ends.size()) ? ends[i + 1] : ends[0] + two_pi;
    chi -= value_at(std::fmod((ends[i] + next) / 2.0, two_pi));
  }
  return chi;
}

// Euler integral of the restriction to a great 2-sphere. Each ball cuts a
// spherical cap (or nothing, or everything); the integral is linear in the
// terms with chi(cap) = 1 and chi(whole sphere) = 2. Tangencies of cap
// boundaries and near-degenerate classifications are rejected for resampling
// since they occur with probability zero.
inline long long sphere_integral(const BallCF& phi,
                                 const GeodesicSubsphere& e) {
  struct Cap {
    std::array<double, 3> center;  // frame coordinates, unit length
    double radius;                 // geodesic radius in (0, pi)
  };
  std::vector<Cap> caps;
  long long chi = 0;
  int meeting = 0;
  for (const auto& t : phi.terms) {
    std::array<double, 3> m;
    double nn = 0;
    for (int k = 0; k < 3; ++k) {
      m[k] = frame_dot(e.frame[k], t.ball.center);
      nn += m[k] * m[k];
    }
    nn = std::sqrt(nn);
    double cr = std::cos(t.ball.radius);
    if (nn <= kTangencyTol) {
      // Center almost orthogonal to the subsphere: the intersection is the
      // whole 2-sphere or empty depending on the sign of cos(radius).
      require(std::abs(cr) > kTangencyTol, ErrorCode::DegenerateTangency,
              "sphere_integral: ball boundary grazes the subsphere");
      if (cr < 0) {
        chi += 2 * t.weight;
        ++meeting;
      }
      continue;
    }
    double tval = cr / nn;
    require(std::abs(tval - 1.0) > kTangencyTol &&
                std::abs(tval + 1.0) > kTangencyTol,
            ErrorCode::DegenerateTangency,
            "sphere_integral: cap boundary degenerates to a point");
    if (tval > 1.0) continue;  // empty
    ++meeting;
    if (tval < -1.0) {
      chi += 2 * t.weight;  // cap covers the whole subsphere
      continue;
    }
    chi += t.weight;
    caps.push_back({{m[0] / nn, m[1] / nn, m[2] / nn}, std::acos(tval)});
  }
  require(meeting <= 6, ErrorCode::NerveBoundExceeded,
          "sphere_integral: more than six balls meet the subsphere");
  for (size_t i = 0; i < caps.size(); ++i)
    for (size_t j = i + 1; j < caps.size(); ++j) {
      double d = 0;
      for (int k = 0; k < 3; ++k) d += caps[i].center[k] * caps[j].center[k];
      double sep = std::acos(std::min(1.0, std::max(-1.0, d)));
      double sum = caps[i].radius + caps[j].radius;
      double dif = std::abs(caps[i].radius - caps[j].radius);
      bool tangent = std::abs(sep - sum) <= kTangencyTol ||
                     std::abs(sep - dif) <= kTangencyTol ||
                     std::abs(sep - (2.0 * std::numbers::pi - sum)) <=
                         kTangencyTol;
      require(!tangent, ErrorCode::DegenerateTangency,
              "sphere_integral: cap boundaries tangent");
    }
  return chi;
}

}  // namespace detail

// Euler integral of the restriction of a ball combination to a totally
// geodesic subsphere: point evaluation for d = 0, exact arc sweep for d = 1,
// cap classification for d = 2 (at most six distinct balls may meet the
// subsphere in that case).
inline long long euler_integral_on_subsphere(const BallCF& phi,
                                             const GeodesicSubsphere& e) {
  if (e.dim == 0) {
    const auto& u = e.frame[0];
    return evaluate(phi, Quat{u[0], u[1], u[2], u[3]});
  }
  if (e.dim == 1) return detail::circle_integral(phi, e);
  require(e.dim == 2, ErrorCode::OutOfRange,
          "euler_integral_on_subsphere: dimension must lie in 0..2");
  return detail::sphere_integral(phi, e);
}

// Monte Carlo Crofton valuation: nu_i averages the Euler integral over
// random subspheres of dimension 3-i. The count valuation nu_0 needs no
// sampling; degenerate subsphere samples are rejected and redrawn inside
// the same per-sample stream, keeping results reproducible.
inline McEstimate crofton_valuation(int i, const BallCF& phi,
                                    long long samples, uint64_t seed) {
  require(i >= 0 && i <= 3, ErrorCode::OutOfRange,
          "crofton_valuation: index must lie in 0..3");
  if (i == 0) return {double(euler_integral(phi)), 0.0, 0};
  require(samples >= 1, ErrorCode::InvalidSampleCount,
          "crofton_valuation: need at least one sample");
  int d = 3 - i;
  McEstimate out;
  double sum = 0, sumsq = 0;
  for (long long s = 0; s < samples; ++s) {
    RngStream g(seed, stream_tag::kCrofton, uint64_t(s));
    long long value = 0;
    for (int attempt = 0;; ++attempt) {
      require(attempt < 256, ErrorCode::ValidationError,
              "crofton_valuation: persistent degenerate subspheres");
      GeodesicSubsphere e = sample_subsphere(d, g);
      try {
        value = euler_integral_on_subsphere(phi, e);
        break;
      } catch (const Error& err) {
        if (err.code() != ErrorCode::DegenerateTangency) throw;
        ++out.resamples;
      }
    }
    sum += double(value);
    sumsq += double(value) * double(value);
  }
  double mean = sum / double(samples);
  out.estimate = mean;
  if (samples > 1) {
    double var = (sumsq - sum * mean) / double(samples - 1);
    out.std_error = std::sqrt(std::max(0.0, var) / double(samples));
  }
  return out;
}

// Exact valuation of a ball combination by linearity: nu_i(sum w 1_B) =
// sum w f_i(radius). Valid whenever every radius is within the closed-form
// domain [0, pi/2].
inline double closed_form_valuation(int i, const BallCF& phi) {
  double v = 0;
  for (const auto& t : phi.terms)
    v += double(t.weight) * f_closed(i, t.ball.radius);
  return v;
}

// Residual per row of the fixed coefficient table against the closed-form
// tube functions: max over the grid of |f_i(r+s) - sum d f_k(r) f_l(s)|.
inline std::array<double, 4> verify_m_table(
    const std::vector<std::pair<double, double>>& grid) {
  require(!grid.empty(), ErrorCode::ValidationError,
          "verify_m_table: empty grid");
  const KinematicTensor& t = s3_kinematic_table();
  std::array<double, 4> worst{0, 0, 0, 0};
  for (auto [r, s] : grid) {
    require(r > 0 && r < std::numbers::pi / 4 && s > 0 &&
                s < std::numbers::pi / 4,
            ErrorCode::OutOfRange,
            "verify_m_table: grid points must lie in (0, pi/4)^2");
    for (int i = 0; i <= 3; ++i) {
      double rhs = 0;
      for (int k = 0; k <= 3; ++k)
        for (int l = 0; l <= 3; ++l)
          rhs += t.at(i, k, l) * f_closed(k, r) * f_closed(l, s);
      worst[i] = std::max(worst[i], std::abs(f_closed(i, r + s) - rhs));
    }
  }
  return worst;
}

// Re-derives the coefficient tensor from the closed-form tube functions by
// template least squares; independent of the stored table.
inline SolveResult recover_d(
    const std::vector<std::pair<double, double>>& grid) {
  require(grid.size() >= 100, ErrorCode::ValidationError,
          "recover_d: need at least 100 grid points");
  for (auto [r, s] : grid)
    require(r > 0 && r < std::numbers::pi / 4 && s > 0 &&
                s < std::numbers::pi / 4,
            ErrorCode::OutOfRange,
            "recover_d: grid points must lie in (0, pi/4)^2");
  std::vector<std::function<double(double)>> family;
  for (int i = 0; i <= 3; ++i)
    family.push_back([i](double r) { return f_closed(i, r); });
  return solve_template(family, grid);
}

struct KinematicCheck {
  McEstimate lhs;
  double rhs = 0;
};

// Checks the spherical kinematic identity by Monte Carlo: the left side
// samples rotations, convolves, and evaluates nu_i (by Crofton sampling
// with `crofton_samples` subspheres, or in closed form when that count is
// zero); the right side pairs the fixed coefficient table with closed-form
// valuations of the factors.
inline KinematicCheck mc_kinematic_s3(const BallCF& phi1, const BallCF& phi2,
                                      int i, long long group_samples,
                                      long long crofton_samples,
                                      uint64_t seed) {
  require(i >= 0 && i <= 3, ErrorCode::OutOfRange,
          "mc_kinematic_s3: index must lie in 0..3");
  require(group_samples >= 1, ErrorCode::InvalidSampleCount,
          "mc_kinematic_s3: need at least one rotation sample");
  KinematicCheck out;
  const KinematicTensor& t = s3_kinematic_table();
  for (int k = 0; k <= 3; ++k)
    for (int l = 0; l <= 3; ++l) {
      double c = t.at(i, k, l);
      if (c != 0)
        out.rhs += c * closed_form_valuation(k, phi1) *
                   closed_form_valuation(l, phi2);
    }
  double sum = 0, sumsq = 0;
  for (long long s = 0; s < group_samples; ++s) {
    RngStream g(seed, stream_tag::kKinematicGroup, uint64_t(s));
    BallCF conv = convolve_balls(phi1, act(sample_so4(g), phi2));
    double value;
    if (i == 0) {
      value = double(euler_integral(conv));
    } else if (crofton_samples == 0) {
      value = closed_form_valuation(i, conv);
    } else {
      uint64_t inner = splitmix64(
          splitmix64(seed ^ splitmix64(stream_tag::kKinematicCrofton)) +
          uint64_t(s));
      McEstimate est = crofton_valuation(i, conv, crofton_samples, inner);
      value = est.estimate;
      out.lhs.resamples += est.resamples;
    }
    sum += value;
    sumsq += value * value;
  }
  double mean = sum / double(group_samples);
  out.lhs.estimate = mean;
  if (group_samples > 1) {
    double var = (sumsq - sum * mean) / double(group_samples - 1);
    out.lhs.std_error = std::sqrt(std::max(0.0, var) / double(group_samples));
  }
  return out;
}

}  // namespace eulerkin
