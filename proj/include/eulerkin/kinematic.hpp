#pragma once

// Additive kinematic harness over rigid rotations: Haar sampling of SO(n),
// Monte Carlo averages of valuations of Minkowski sums of rotated bodies,
// and least-squares recovery of coefficient tensors from template function
// families. The template solver is shared by the flat and spherical sides.

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "eulerkin/error.hpp"
#include "eulerkin/polytope.hpp"
#include "eulerkin/rng.hpp"
#include "eulerkin/valuation.hpp"

namespace eulerkin {

// Coefficients c[i][k][l] of a bilinear kinematic expansion, symmetric under
// swapping k and l. Indices run over a valuation basis of size `order`.
struct KinematicTensor {
  int order = 0;
  std::vector<double> entries;  // order^3 values in (i, k, l) row-major order

  explicit KinematicTensor(int n = 0)
      : order(n), entries(size_t(n) * n * n, 0.0) {}
  double at(int i, int k, int l) const {
    return entries[(size_t(i) * order + k) * order + l];
  }
  double& at(int i, int k, int l) {
    return entries[(size_t(i) * order + k) * order + l];
  }
};

struct SolveResult {
  KinematicTensor tensor;
  double residual = 0;  // max absolute equation residual of the fit
};

struct McEstimate {
  double estimate = 0;
  double std_error = 0;
  long long resamples = 0;  // rotation samples rejected as degenerate
};

// Haar-uniform rotation matrix; n = 2 by uniform angle, n = 3 by uniform
// unit quaternion. Determinant is +1 in both constructions.
inline FMat haar_rotation(int n, RngStream& g) {
  require(n == 2 || n == 3, ErrorCode::OutOfRange,
          "haar_rotation: dimension must be 2 or 3");
  if (n == 2) {
    double a = 2.0 * std::numbers::pi * g.uniform01();
    return {{std::cos(a), -std::sin(a)}, {std::sin(a), std::cos(a)}};
  }
  double w, x, y, z, nrm;
  do {
    w = g.normal();
    x = g.normal();
    y = g.normal();
    z = g.normal();
    nrm = std::sqrt(w * w + x * x + y * y + z * z);
  } while (nrm < 1e-6);
  w /= nrm;
  x /= nrm;
  y /= nrm;
  z /= nrm;
  return {{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
          {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
          {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}};
}

namespace detail {

// Householder least squares with the factor retained for multiple
// right-hand sides. Columns are checked for rank by the R diagonal.
struct LeastSquares {
  size_t m, n;
  FMat a;         // transformed matrix, Householder vectors below diagonal
  FVec beta;      // Householder scalars
  FMat original;  // untouched copy for residual evaluation

  LeastSquares(FMat mat) : m(mat.size()), n(mat[0].size()), original(mat) {
    a = std::move(mat);
    beta.assign(n, 0.0);
    for (size_t j = 0; j < n && j < m; ++j) {
      double sigma = 0;
      for (size_t i = j + 1; i < m; ++i) sigma += a[i][j] * a[i][j];
      double ajj = a[j][j];
      if (sigma == 0) continue;
      double mu = std::sqrt(ajj * ajj + sigma);
      double v0 = ajj <= 0 ? ajj - mu : -sigma / (ajj + mu);
      beta[j] = 2 * v0 * v0 / (sigma + v0 * v0);
      a[j][j] = mu;
      for (size_t i = j + 1; i < m; ++i) a[i][j] /= v0;
      for (size_t c = j + 1; c < n; ++c) {
        double s = a[j][c];
        for (size_t i = j + 1; i < m; ++i) s += a[i][j] * a[i][c];
        s *= beta[j];
        a[j][c] -= s;
        for (size_t i = j + 1; i < m; ++i) a[i][c] -= s * a[i][j];
      }
    }
  }

  bool rank_deficient() const {
    double top = 0;
    for (size_t j = 0; j < n; ++j) top = std::max(top, std::abs(a[j][j]));
    for (size_t j = 0; j < n; ++j)
      if (std::abs(a[j][j]) <= 1e-12 * std::max(top, 1.0)) return true;
    return false;
  }

  FVec solve(FVec b) const {
    for (size_t j = 0; j < n && j < m; ++j) {
      if (beta[j] == 0) continue;
      double s = b[j];
      for (size_t i = j + 1; i < m; ++i) s += a[i][j] * b[i];
      s *= beta[j];
      b[j] -= s;
      for (size_t i = j + 1; i < m; ++i) b[i] -= s * a[i][j];
    }
    FVec x(n, 0.0);
    for (size_t j = n; j-- > 0;) {
      double s = b[j];
      for (size_t c = j + 1; c < n; ++c) s -= a[j][c] * x[c];
      x[j] = s / a[j][j];
    }
    return x;
  }

  double max_residual(const FVec& x, const FVec& b) const {
    double worst = 0;
    for (size_t r = 0; r < m; ++r) {
      double s = -b[r];
      for (size_t c = 0; c < n; ++c) s += original[r][c] * x[c];
      worst = std::max(worst, std::abs(s));
    }
    return worst;
  }
};

}  // namespace detail

// Fits f_i(r+s) = sum_{k<=l} d_{k,l} [f_k(r) f_l(s) + (k<l) f_l(r) f_k(s)]
// in least squares over the grid and returns the symmetric tensor plus the
// worst equation residual.
inline SolveResult solve_template(
    const std::vector<std::function<double(double)>>& family,
    const std::vector<std::pair<double, double>>& grid) {
  int n = int(family.size());
  require(n >= 1, ErrorCode::ValidationError, "solve_template: empty family");
  size_t unknowns = size_t(n) * (n + 1) / 2;
  require(grid.size() >= unknowns, ErrorCode::RankDeficientSystem,
          "solve_template: fewer grid points than unknowns");
  FMat a(grid.size(), FVec(unknowns, 0.0));
  for (size_t r = 0; r < grid.size(); ++r) {
    auto [x, y] = grid[r];
    size_t col = 0;
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l, ++col) {
        double v = family[k](x) * family[l](y);
        if (k != l) v += family[l](x) * family[k](y);
        a[r][col] = v;
      }
  }
  detail::LeastSquares ls(std::move(a));
  require(!ls.rank_deficient(), ErrorCode::RankDeficientSystem,
          "solve_template: template system is rank deficient");
  SolveResult out{KinematicTensor(n), 0.0};
  for (int i = 0; i < n; ++i) {
    FVec b(grid.size());
    for (size_t r = 0; r < grid.size(); ++r)
      b[r] = family[i](grid[r].first + grid[r].second);
    FVec x = ls.solve(b);
    out.residual = std::max(out.residual, ls.max_residual(x, b));
    size_t col = 0;
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l, ++col) {
        out.tensor.at(i, k, l) = x[col];
        out.tensor.at(i, l, k) = x[col];
      }
  }
  return out;
}

// Intrinsic volumes of the Euclidean r-ball as closed-form template
// functions: the classical tube formula makes these the canonical flat
// template family, so the flat tensor is derived rather than hard-coded.
inline std::vector<std::function<double(double)>> ball_templates(int n) {
  require(n == 2 || n == 3, ErrorCode::OutOfRange,
          "ball_templates: dimension must be 2 or 3");
  using std::numbers::pi;
  if (n == 2)
    return {[](double) { return 1.0; }, [](double r) { return pi * r; },
            [](double r) { return pi * r * r; }};
  return {[](double) { return 1.0; }, [](double r) { return 4.0 * r; },
          [](double r) { return 2.0 * pi * r * r; },
          [](double r) { return 4.0 / 3.0 * pi * r * r * r; }};
}

// Flat kinematic tensor for SO(n) from ball templates on a default grid.
inline SolveResult flat_kinematic_tensor(int n) {
  std::vector<std::pair<double, double>> grid;
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j) grid.emplace_back(0.25 * i, 0.25 * j);
  return solve_template(ball_templates(n), grid);
}

// Monte Carlo mean and standard error of V_i(phi1 * g phi2) over Haar
// rotation samples g. Translations are integrated out analytically: the
// valuations are translation invariant, so only rotations are sampled. The
// convolution of indicator combinations expands bilinearly over Minkowski
// sums of pairs, evaluated with tolerance hulls; degenerate hulls trigger a
// resample of the rotation within the same per-sample stream.
inline McEstimate rotation_average_convolution(const PolytopeCombination& f1,
                                               const PolytopeCombination& f2,
                                               int i, long long samples,
                                               uint64_t seed) {
  require(samples >= 1, ErrorCode::InvalidSampleCount,
          "rotation_average_convolution: need at least one sample");
  int n = f1.ambient;
  require(n == f2.ambient, ErrorCode::ValidationError,
          "rotation_average_convolution: ambient dimensions differ");
  require(n == 2 || n == 3, ErrorCode::OutOfRange,
          "rotation_average_convolution: dimension must be 2 or 3");
  require(i >= 0 && i <= n, ErrorCode::OutOfRange,
          "rotation_average_convolution: valuation index out of range");
  struct Body {
    std::vector<FVec> verts;
    int dim = 0;
    long long weight = 0;
  };
  std::vector<Body> left, right;
  for (const auto& t : f1.terms) {
    Body b{{}, dim(t.poly), t.weight};
    for (const auto& v : t.poly.verts) b.verts.push_back(detail::to_float(v));
    left.push_back(std::move(b));
  }
  for (const auto& t : f2.terms) {
    Body b{{}, dim(t.poly), t.weight};
    for (const auto& v : t.poly.verts) b.verts.push_back(detail::to_float(v));
    right.push_back(std::move(b));
  }
  McEstimate out;
  double sum = 0, sumsq = 0;
  for (long long s = 0; s < samples; ++s) {
    RngStream g(seed, stream_tag::kRotationAverage, uint64_t(s));
    double value = 0;
    for (int attempt = 0;; ++attempt) {
      require(attempt < 256, ErrorCode::ValidationError,
              "rotation_average_convolution: persistent degenerate hulls");
      FMat r = haar_rotation(n, g);
      bool ok = true;
      value = 0;
      for (const auto& a : left) {
        std::vector<FVec> rotated;
        for (const auto& b : right) {
          rotated.clear();
          for (const auto& v : b.verts) {
            FVec w(n, 0.0);
            for (int p = 0; p < n; ++p)
              for (int c = 0; c < n; ++c) w[p] += r[p][c] * v[c];
            rotated.push_back(std::move(w));
          }
          std::vector<FVec> sums;
          sums.reserve(a.verts.size() * rotated.size());
          for (const auto& u : a.verts)
            for (const auto& v : rotated) {
              FVec w(n);
              for (int c = 0; c < n; ++c) w[c] = u[c] + v[c];
              sums.push_back(std::move(w));
            }
          int expected = std::min(n, a.dim + b.dim);
          auto mu = float_mu_of_hull(n, sums, expected);
          if (!mu) {
            ok = false;
            break;
          }
          value += double(a.weight) * double(b.weight) * (*mu)[i];
        }
        if (!ok) break;
      }
      if (ok) break;
      ++out.resamples;
    }
    sum += value;
    sumsq += value * value;
  }
  double mean = sum / double(samples);
  out.estimate = mean;
  if (samples > 1) {
    double var = (sumsq - sum * mean) / double(samples - 1);
    out.std_error = std::sqrt(std::max(0.0, var) / double(samples));
  }
  return out;
}

}  // namespace eulerkin
