#include "cmrwave/loess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "cmrwave/error.hpp"

namespace cmrwave {

namespace {

constexpr int kMaxDegree = 2;

struct Neighbourhood {
  std::size_t lo = 0;  // inclusive
  std::size_t hi = 0;  // exclusive
  double radius = 0.0;
};

// The `span` points nearest to x0 form a contiguous run of the sorted xs.
Neighbourhood nearest(std::span<const double> xs, double x0, int span) {
  const std::size_t n = xs.size();
  const auto q = static_cast<std::size_t>(span);
  if (q >= n) {
    double far = std::max(std::abs(x0 - xs.front()), std::abs(xs.back() - x0));
    if (q > n) far *= static_cast<double>(q) / static_cast<double>(n);
    return {0, n, far};
  }
  std::size_t hi = static_cast<std::size_t>(
      std::lower_bound(xs.begin(), xs.end(), x0) - xs.begin());
  std::size_t lo = hi;
  while (hi - lo < q) {
    if (lo == 0) {
      ++hi;
    } else if (hi == n) {
      --lo;
    } else if (x0 - xs[lo - 1] <= xs[hi] - x0) {
      --lo;
    } else {
      ++hi;
    }
  }
  return {lo, hi, std::max(std::abs(x0 - xs[lo]), std::abs(xs[hi - 1] - x0))};
}

// Solves the (d+1)x(d+1) system in place by Gaussian elimination with partial
// pivoting. Returns false when a pivot vanishes relative to the matrix scale.
bool solve_small(std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1>& a,
                 std::array<double, kMaxDegree + 1>& b, int dim) {
  double scale = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) scale = std::max(scale, std::abs(a[i][j]));
  if (scale == 0.0) return false;
  for (int col = 0; col < dim; ++col) {
    int pivot = col;
    for (int r = col + 1; r < dim; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) <= 1e-13 * scale) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (int r = col + 1; r < dim; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < dim; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = dim - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < dim; ++c) acc -= a[r][c] * b[c];
    b[r] = acc / a[r][r];
  }
  return true;
}

double fit_unchecked(std::span<const double> xs, std::span<const double> ys, double x0,
                     const LoessParams& params,
                     std::optional<std::span<const double>> robustness) {
  const Neighbourhood nb = nearest(xs, x0, params.span);
  if (!(nb.radius > 0.0)) {
    throw DegenerateFitError(
        fmt::format("loess neighbourhood around x={} has zero radius", x0));
  }

  // Local coordinates s = (x - x0) / h keep the normal equations well scaled;
  // the fitted value at x0 is then the constant coefficient.
  const int dim = params.degree + 1;
  std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> normal{};
  std::array<double, kMaxDegree + 1> rhs{};
  int positive = 0;
  for (std::size_t i = nb.lo; i < nb.hi; ++i) {
    const double s = (xs[i] - x0) / nb.radius;
    double w = tricube(s);
    if (robustness) w *= (*robustness)[i];
    if (!(w > 0.0)) continue;
    ++positive;
    std::array<double, 2 * kMaxDegree + 1> pow{};
    pow[0] = w;
    for (int k = 1; k < 2 * dim - 1; ++k) pow[k] = pow[k - 1] * s;
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) normal[r][c] += pow[r + c];
      rhs[r] += pow[r] * ys[i];
    }
  }
  if (positive < dim) {
    throw DegenerateFitError(fmt::format(
        "loess at x={}: {} point(s) with positive weight, degree {} needs {}", x0,
        positive, params.degree, dim));
  }
  if (!solve_small(normal, rhs, dim)) {
    throw DegenerateFitError(fmt::format("loess at x={}: singular local system", x0));
  }
  return rhs[0];
}

void check_inputs(std::size_t nx, std::size_t ny,
                  const std::optional<std::span<const double>>& robustness) {
  if (nx != ny) {
    throw ValidationError(fmt::format("loess: {} x values but {} y values", nx, ny));
  }
  if (nx == 0) throw DegenerateFitError("loess: no data points");
  if (robustness && robustness->size() != nx) {
    throw ValidationError(fmt::format("loess: {} robustness weights for {} points",
                                      robustness->size(), nx));
  }
}

}  // namespace

void validate(const LoessParams& params) {
  if (params.degree < 0 || params.degree > kMaxDegree) {
    throw ValidationError(fmt::format("loess degree must be 0, 1 or 2 (got {})",
                                      params.degree));
  }
  if (params.span < params.degree + 1) {
    throw ValidationError(fmt::format("loess span {} is below degree + 1 = {}",
                                      params.span, params.degree + 1));
  }
}

double tricube(double u) {
  const double a = std::abs(u);
  if (a >= 1.0) return 0.0;
  const double t = 1.0 - a * a * a;
  return t * t * t;
}

double loess_fit_at(std::span<const double> xs, std::span<const double> ys, double x0,
                    const LoessParams& params,
                    std::optional<std::span<const double>> robustness) {
  validate(params);
  check_inputs(xs.size(), ys.size(), robustness);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw ValidationError("loess: x values must be strictly increasing");
    }
  }
  return fit_unchecked(xs, ys, x0, params, robustness);
}

std::vector<double> loess_smooth_range(std::span<const double> ys,
                                       const LoessParams& params, long first,
                                       long last,
                                       std::optional<std::span<const double>> robustness,
                                       RobustFallback fallback) {
  validate(params);
  check_inputs(ys.size(), ys.size(), robustness);
  std::vector<double> xs(ys.size());
  std::iota(xs.begin(), xs.end(), 0.0);
  std::vector<double> out;
  if (last < first) return out;
  out.reserve(static_cast<std::size_t>(last - first + 1));
  for (long x = first; x <= last; ++x) {
    const double x0 = static_cast<double>(x);
    if (robustness && fallback == RobustFallback::Unweighted) {
      try {
        out.push_back(fit_unchecked(xs, ys, x0, params, robustness));
      } catch (const DegenerateFitError&) {
        out.push_back(fit_unchecked(xs, ys, x0, params, std::nullopt));
      }
    } else {
      out.push_back(fit_unchecked(xs, ys, x0, params, robustness));
    }
  }
  return out;
}

std::vector<double> loess_smooth_series(std::span<const double> ys,
                                        const LoessParams& params,
                                        std::optional<std::span<const double>> robustness,
                                        RobustFallback fallback) {
  if (ys.empty()) return {};
  return loess_smooth_range(ys, params, 0, static_cast<long>(ys.size()) - 1, robustness,
                            fallback);
}

}  // namespace cmrwave
