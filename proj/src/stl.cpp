#include "cmrwave/stl.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "cmrwave/error.hpp"
#include "cmrwave/loess.hpp"

namespace cmrwave {

namespace {

// Residual scales at or below this fraction of the series magnitude are
// treated as round-off, so no point is downweighted.
constexpr double kResidualNoiseFloor = 1e-10;

std::vector<double> moving_average(std::span<const double> xs, int len) {
  const auto l = static_cast<std::size_t>(len);
  std::vector<double> out;
  if (xs.size() < l) return out;
  out.reserve(xs.size() - l + 1);
  for (std::size_t i = 0; i + l <= xs.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < l; ++k) acc += xs[i + k];
    out.push_back(acc / static_cast<double>(len));
  }
  return out;
}

double median(std::vector<double> xs) {
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<long>(mid), xs.end());
  double hi = xs[mid];
  if (xs.size() % 2 == 1) return hi;
  double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<long>(mid));
  return 0.5 * (lo + hi);
}

std::vector<double> bisquare_weights(std::span<const double> y,
                                     std::span<const double> trend,
                                     std::span<const double> seasonal) {
  const std::size_t n = y.size();
  std::vector<double> abs_resid(n);
  double magnitude = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    abs_resid[i] = std::abs(y[i] - trend[i] - seasonal[i]);
    magnitude = std::max(magnitude, std::abs(y[i]));
  }
  const double h = 6.0 * median(abs_resid);
  std::vector<double> w(n, 1.0);
  if (h <= kResidualNoiseFloor * magnitude) return w;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = abs_resid[i] / h;
    if (u >= 1.0) {
      w[i] = 0.0;
    } else {
      const double t = 1.0 - u * u;
      w[i] = t * t;
    }
  }
  return w;
}

void inner_pass(std::span<const double> y, const StlParams& p,
                const std::vector<double>* weights, std::vector<double>& trend,
                std::vector<double>& seasonal) {
  const std::size_t n = y.size();
  const auto period = static_cast<std::size_t>(p.period);

  std::vector<double> detrended(n);
  for (std::size_t i = 0; i < n; ++i) detrended[i] = y[i] - trend[i];

  // Each cycle-subseries is smoothed and extrapolated one step on each side,
  // giving a series that starts one period early and ends one period late.
  std::vector<double> cycle(n + 2 * period);
  const LoessParams seasonal_fit{p.seasonal_span, p.seasonal_degree};
  std::vector<double> sub, sub_w;
  for (std::size_t j = 0; j < period; ++j) {
    sub.clear();
    sub_w.clear();
    for (std::size_t i = j; i < n; i += period) {
      sub.push_back(detrended[i]);
      if (weights) sub_w.push_back((*weights)[i]);
    }
    const long m = static_cast<long>(sub.size());
    std::optional<std::span<const double>> rw;
    if (weights) rw = std::span<const double>(sub_w);
    const auto smoothed = loess_smooth_range(sub, seasonal_fit, -1, m, rw, RobustFallback::Unweighted);
    for (std::size_t k = 0; k < smoothed.size(); ++k) cycle[j + k * period] = smoothed[k];
  }

  auto low = moving_average(cycle, p.period);
  low = moving_average(low, p.period);
  low = moving_average(low, 3);
  low = loess_smooth_series(low, LoessParams{p.lowpass_span, p.lowpass_degree});

  std::vector<double> deseasonalized(n);
  for (std::size_t i = 0; i < n; ++i) {
    seasonal[i] = cycle[i + period] - low[i];
    deseasonalized[i] = y[i] - seasonal[i];
  }

  std::optional<std::span<const double>> rw;
  if (weights) rw = std::span<const double>(*weights);
  trend = loess_smooth_series(deseasonalized, LoessParams{p.trend_span, p.trend_degree}, rw,
                              RobustFallback::Unweighted);
}

void require_odd_at_least(const char* name, int value, int minimum) {
  if (value < minimum || value % 2 == 0) {
    throw ValidationError(
        fmt::format("STL {} must be an odd integer >= {} (got {})", name, minimum, value));
  }
}

void require_degree(const char* name, int degree) {
  if (degree < 0 || degree > 2) {
    throw ValidationError(fmt::format("STL {} must be 0, 1 or 2 (got {})", name, degree));
  }
}

}  // namespace

int default_trend_span(int period, int seasonal_span) {
  // 1.5 p / (1 - 1.5 / ns) == 3 p ns / (2 ns - 3), rounded up exactly.
  const long num = 3L * period * seasonal_span;
  const long den = 2L * seasonal_span - 3;
  long span = (num + den - 1) / den;
  if (span % 2 == 0) ++span;
  return static_cast<int>(span);
}

int default_lowpass_span(int period) { return period % 2 == 0 ? period + 1 : period; }

StlParams default_stl_params(int period) {
  StlParams p;
  p.period = period;
  p.seasonal_span = 11;
  p.trend_span = default_trend_span(period, p.seasonal_span);
  p.lowpass_span = default_lowpass_span(period);
  return p;
}

void validate(const StlParams& p) {
  if (p.period < 2) {
    throw ValidationError(fmt::format("STL period must be >= 2 (got {})", p.period));
  }
  require_odd_at_least("seasonal span", p.seasonal_span, 7);
  require_odd_at_least("trend span", p.trend_span,
                       default_trend_span(p.period, p.seasonal_span));
  require_odd_at_least("low-pass span", p.lowpass_span, default_lowpass_span(p.period));
  require_degree("seasonal degree", p.seasonal_degree);
  require_degree("trend degree", p.trend_degree);
  require_degree("low-pass degree", p.lowpass_degree);
  if (p.inner_iterations < 1) {
    throw ValidationError("STL inner iterations must be >= 1");
  }
  if (p.outer_iterations < 0) {
    throw ValidationError("STL outer iterations must be >= 0");
  }
}

StlResult stl_decompose(std::span<const double> series, const StlParams& params) {
  validate(params);
  const std::size_t n = series.size();
  if (n < 2 * static_cast<std::size_t>(params.period)) {
    throw LengthError(fmt::format("STL needs at least {} points for period {} (got {})",
                                  2 * params.period, params.period, n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(series[i])) {
      throw ValidationError(fmt::format("STL input has a non-finite value at index {}", i));
    }
  }

  StlResult r;
  r.trend.assign(n, 0.0);
  r.seasonal.assign(n, 0.0);
  r.robustness_weights.assign(n, 1.0);

  for (int pass = 0; pass <= params.outer_iterations; ++pass) {
    const std::vector<double>* weights = pass == 0 ? nullptr : &r.robustness_weights;
    for (int it = 0; it < params.inner_iterations; ++it) {
      inner_pass(series, params, weights, r.trend, r.seasonal);
    }
    if (pass < params.outer_iterations) {
      r.robustness_weights = bisquare_weights(series, r.trend, r.seasonal);
    }
  }

  r.remainder.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.remainder[i] = series[i] - r.trend[i] - r.seasonal[i];
  }
  return r;
}

}  // namespace cmrwave
