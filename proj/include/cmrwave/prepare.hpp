#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cmrwave/category.hpp"
#include "cmrwave/date.hpp"
#include "cmrwave/ingest.hpp"
#include "cmrwave/stl.hpp"

namespace cmrwave {

/// Trend of one category, min-max scaled to [0, 1] within its locality.
/// 0 is the lowest mobility observed for the category, 1 the highest.
struct PreparedSeries {
  std::string locality_id;
  PlaceCategory category = PlaceCategory::Workplaces;
  std::vector<Date> dates;
  std::vector<double> values;

  // provenance
  double calibration_offset = 0.0;
  double scale_min = 0.0;
  double scale_max = 1.0;
  StlParams stl;

  /// Maps a scaled value back to calibrated-trend units.
  double unscale(double scaled) const { return scale_min + scaled * (scale_max - scale_min); }
};

struct CalibratedSeries {
  MobilitySeries series;
  double offset = 0.0;
};

/// Subtracts the mean of all values dated strictly before `wave1_restriction`.
/// Needs at least 7 such days; throws CalibrationError otherwise.
CalibratedSeries calibrate_zero_mean(const MobilitySeries& series, Date wave1_restriction);

/// STL trend of a gap-free daily series.
std::vector<double> isolate_trend(const MobilitySeries& series, const StlParams& params);

/// Calibrated trends of the five analysed categories of one locality, all on
/// the same `dates`.
struct LocalityTrends {
  std::string locality_id;
  std::vector<Date> dates;
  std::map<PlaceCategory, std::vector<double>> trends;
  std::map<PlaceCategory, double> calibration_offsets;
  StlParams stl;
};

/// Scales every category independently to [0, 1] over the full date range.
/// Output is in radar-axis order. Throws DegenerateScaleError for a flat
/// category and ValidationError if a category is missing or misaligned.
std::vector<PreparedSeries> scale_common_range(const LocalityTrends& trends);

struct CategoryDiagnostics {
  std::vector<double> raw;
  std::vector<double> calibrated;
  std::vector<double> trend;
  std::vector<double> seasonal;
  std::vector<double> remainder;
};

/// Everything `prepare_locality` derives for one locality.
struct PreparedLocality {
  std::string locality_id;
  std::vector<Date> dates;
  std::vector<PreparedSeries> series;  // radar-axis order
  std::map<PlaceCategory, CategoryDiagnostics> diagnostics;
};

/// Gap filling, alignment to the common date range of the five categories,
/// zero-mean calibration, trend isolation and scaling.
PreparedLocality prepare_locality(const LocalitySeries& raw, const LocalityConfig& locality,
                                  const StudyConfig& config);

/// CSV with columns date,category,raw,calibrated,trend,seasonal,remainder,scaled.
void write_diagnostics_csv(std::ostream& out, const PreparedLocality& prepared);

}  // namespace cmrwave
