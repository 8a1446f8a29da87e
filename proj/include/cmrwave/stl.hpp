#pragma once

#include <span>
#include <vector>

namespace cmrwave {

/// Seasonal-trend decomposition settings. Spans are neighbour counts and
/// must be odd.
struct StlParams {
  int period = 7;
  int seasonal_span = 11;
  int trend_span = 13;
  int lowpass_span = 7;
  int seasonal_degree = 1;
  int trend_degree = 1;
  int lowpass_degree = 1;
  int inner_iterations = 2;
  int outer_iterations = 1;

  bool operator==(const StlParams&) const = default;
};

/// Smallest odd integer >= 1.5 * period / (1 - 1.5 / seasonal_span).
int default_trend_span(int period, int seasonal_span);

/// Smallest odd integer >= period.
int default_lowpass_span(int period);

/// Defaults for a given period: seasonal span 11 and derived trend and
/// low-pass spans, two inner passes, one robustness pass.
StlParams default_stl_params(int period = 7);

/// Throws ValidationError when any field breaks the constraints above.
void validate(const StlParams& params);

struct StlResult {
  std::vector<double> trend;
  std::vector<double> seasonal;
  std::vector<double> remainder;
  /// Bisquare weights used in the final pass; all ones without robustness
  /// iterations.
  std::vector<double> robustness_weights;
};

/// Decomposes `series` into trend + seasonal + remainder.
///
/// Throws LengthError when the series is shorter than two periods and
/// ValidationError on non-finite input or invalid parameters.
StlResult stl_decompose(std::span<const double> series, const StlParams& params);

}  // namespace cmrwave
