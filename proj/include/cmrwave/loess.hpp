#pragma once

#include <optional>
#include <span>
#include <vector>

namespace cmrwave {

/// Local regression settings: `span` nearest neighbours, local polynomial of
/// `degree` (0, 1 or 2).
struct LoessParams {
  int span = 7;
  int degree = 1;
};

/// Throws ValidationError unless degree is 0..2 and span >= degree + 1.
void validate(const LoessParams& params);

/// Tricube kernel (1 - |u|^3)^3 on |u| < 1, zero elsewhere.
double tricube(double u);

/// Fits a weighted local polynomial around `x0` and returns its value there.
///
/// The neighbourhood is the `span` points nearest to x0, and `h` is the
/// distance to the span-th nearest of them. When span exceeds the number of
/// points, h is the largest distance scaled by span / n. Each point gets
/// tricube(|x - x0| / h), multiplied by `robustness[i]` when provided.
///
/// Requires strictly increasing `xs`, `xs.size() == ys.size()`. Throws
/// DegenerateFitError when fewer than degree + 1 points carry positive
/// weight or the local system is singular.
double loess_fit_at(std::span<const double> xs, std::span<const double> ys,
                    double x0, const LoessParams& params,
                    std::optional<std::span<const double>> robustness = std::nullopt);

/// What series smoothing does when robustness weights leave a position with
/// too few weighted points.
enum class RobustFallback {
  Throw,       // propagate DegenerateFitError
  Unweighted,  // refit that position without robustness weights
};

/// Loess evaluated at every index of an equally spaced series (x = 0..n-1).
/// Points near the ends use the asymmetric nearest-neighbour window.
std::vector<double> loess_smooth_series(
    std::span<const double> ys, const LoessParams& params,
    std::optional<std::span<const double>> robustness = std::nullopt,
    RobustFallback fallback = RobustFallback::Throw);

/// Same as loess_smooth_series but evaluated at arbitrary (possibly
/// extrapolated) integer positions `first .. last` inclusive.
std::vector<double> loess_smooth_range(
    std::span<const double> ys, const LoessParams& params, long first, long last,
    std::optional<std::span<const double>> robustness = std::nullopt,
    RobustFallback fallback = RobustFallback::Throw);

}  // namespace cmrwave
