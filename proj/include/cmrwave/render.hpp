#pragma once

#include <span>
#include <string>

#include "cmrwave/aggregate.hpp"
#include "cmrwave/ingest.hpp"
#include "cmrwave/prepare.hpp"

namespace cmrwave {

struct RadarOptions {
  int width = 600;
  int height = 600;
  std::string title;
};

/// Radius of the outermost ring relative to the canvas.
double radar_radius(const RadarOptions& options);

/// Paired radar chart: one closed pentagon per wave (wave 1 red, wave 2 blue)
/// on five axes 72 degrees apart in W, G&P, P, R&R, Ts order, starting at 12
/// o'clock and running clockwise. A value v sits at radius v / L * R with L
/// the slice length. Throws RangeError for components outside [0, L].
std::string radar_chart(const AucVector& wave1, const AucVector& wave2,
                        const RadarOptions& options = {});

struct SeriesPlotOptions {
  int width = 1200;
  int height = 400;
  int period_length_days = 56;
  int window_length_days = 14;
  std::string title;
};

/// Line chart of prepared series with dashed rules at both restriction dates
/// and shaded bands over both wave periods.
std::string series_plot(std::span<const PreparedSeries> prepared, const LocalityConfig& locality,
                        const SeriesPlotOptions& options = {});

enum class TableFormat { Plain, Csv };

/// "Dominates(w1)", "Dominates(w2)", "Incomparable" or "Equal".
std::string relation_label(DominanceRelation r);

std::string report_table(const ComparisonReport& report, TableFormat format = TableFormat::Plain);

}  // namespace cmrwave
