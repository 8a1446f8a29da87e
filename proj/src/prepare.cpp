#include "cmrwave/prepare.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "cmrwave/error.hpp"

namespace cmrwave {

namespace {

constexpr std::size_t kMinCalibrationDays = 7;

void require_daily(const MobilitySeries& s) {
  if (s.dates.size() != s.values.size()) {
    throw ValidationError(fmt::format("{}/{}: {} dates for {} values", s.locality_id,
                                      key(s.category), s.dates.size(), s.values.size()));
  }
  for (std::size_t i = 1; i < s.dates.size(); ++i) {
    if (days_between(s.dates[i - 1], s.dates[i]) != 1) {
      throw ValidationError(fmt::format("{}/{}: series is not gap-free at {}", s.locality_id,
                                        key(s.category), format_date(s.dates[i])));
    }
  }
}

MobilitySeries restrict_to(const MobilitySeries& s, Date first, Date last) {
  MobilitySeries out;
  out.locality_id = s.locality_id;
  out.category = s.category;
  for (std::size_t i = 0; i < s.dates.size(); ++i) {
    if (s.dates[i] < first || s.dates[i] > last) continue;
    out.dates.push_back(s.dates[i]);
    out.values.push_back(s.values[i]);
    out.interpolated.push_back(i < s.interpolated.size() && s.interpolated[i]);
  }
  return out;
}

}  // namespace

CalibratedSeries calibrate_zero_mean(const MobilitySeries& series, Date wave1_restriction) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < series.dates.size(); ++i) {
    if (series.dates[i] < wave1_restriction) {
      sum += series.values[i];
      ++count;
    }
  }
  if (count < kMinCalibrationDays) {
    throw CalibrationError(fmt::format(
        "{}/{}: {} day(s) before {} available for calibration, need {}", series.locality_id,
        key(series.category), count, format_date(wave1_restriction), kMinCalibrationDays));
  }
  CalibratedSeries out{series, sum / static_cast<double>(count)};
  for (double& v : out.series.values) v -= out.offset;
  return out;
}

std::vector<double> isolate_trend(const MobilitySeries& series, const StlParams& params) {
  require_daily(series);
  return stl_decompose(series.values, params).trend;
}

std::vector<PreparedSeries> scale_common_range(const LocalityTrends& in) {
  std::vector<PreparedSeries> out;
  out.reserve(kAnalysisCategoryCount);
  for (PlaceCategory c : kAnalysisCategories) {
    auto it = in.trends.find(c);
    if (it == in.trends.end()) {
      throw ValidationError(fmt::format("{}: missing trend for category {}", in.locality_id,
                                        key(c)));
    }
    const std::vector<double>& trend = it->second;
    if (trend.size() != in.dates.size() || trend.empty()) {
      throw ValidationError(fmt::format("{}/{}: {} trend values for {} dates", in.locality_id,
                                        key(c), trend.size(), in.dates.size()));
    }
    const auto [lo, hi] = std::minmax_element(trend.begin(), trend.end());
    if (!(*hi > *lo)) {
      throw DegenerateScaleError(fmt::format(
          "{}/{}: trend is flat ({}), cannot scale to a common range", in.locality_id, key(c),
          *lo));
    }
    PreparedSeries p;
    p.locality_id = in.locality_id;
    p.category = c;
    p.dates = in.dates;
    p.scale_min = *lo;
    p.scale_max = *hi;
    auto off = in.calibration_offsets.find(c);
    p.calibration_offset = off == in.calibration_offsets.end() ? 0.0 : off->second;
    p.stl = in.stl;
    const double range = p.scale_max - p.scale_min;
    p.values.reserve(trend.size());
    for (double v : trend) p.values.push_back((v - p.scale_min) / range);
    out.push_back(std::move(p));
  }
  return out;
}

PreparedLocality prepare_locality(const LocalitySeries& raw, const LocalityConfig& locality,
                                  const StudyConfig& config) {
  std::map<PlaceCategory, MobilitySeries> filled;
  for (PlaceCategory c : kAnalysisCategories) {
    auto it = raw.find(c);
    if (it == raw.end()) {
      throw ValidationError(fmt::format("{}: no data for category {}", locality.id, key(c)));
    }
    filled.emplace(c, fill_gaps(it->second, config.max_gap_days));
  }

  Date first = filled.begin()->second.dates.front();
  Date last = filled.begin()->second.dates.back();
  for (const auto& [c, s] : filled) {
    first = std::max(first, s.dates.front());
    last = std::min(last, s.dates.back());
  }
  if (last < first) {
    throw DataQualityError(fmt::format("{}: categories share no common date range", locality.id));
  }

  PreparedLocality out;
  out.locality_id = locality.id;
  LocalityTrends trends;
  trends.locality_id = locality.id;
  trends.stl = config.stl;
  for (auto& [c, s] : filled) {
    MobilitySeries aligned = restrict_to(s, first, last);
    if (trends.dates.empty()) trends.dates = aligned.dates;
    CalibratedSeries cal = calibrate_zero_mean(aligned, locality.wave1_restriction);
    require_daily(cal.series);
    StlResult stl = stl_decompose(cal.series.values, config.stl);

    trends.trends[c] = stl.trend;
    trends.calibration_offsets[c] = cal.offset;
    out.diagnostics[c] = CategoryDiagnostics{aligned.values, cal.series.values,
                                             std::move(stl.trend), std::move(stl.seasonal),
                                             std::move(stl.remainder)};
  }
  out.dates = trends.dates;
  out.series = scale_common_range(trends);
  return out;
}

void write_diagnostics_csv(std::ostream& out, const PreparedLocality& p) {
  out << "date,category,raw,calibrated,trend,seasonal,remainder,scaled\n";
  for (const PreparedSeries& s : p.series) {
    const CategoryDiagnostics& d = p.diagnostics.at(s.category);
    for (std::size_t i = 0; i < s.dates.size(); ++i) {
      out << fmt::format("{},{},{},{},{},{},{},{}\n", format_date(s.dates[i]), key(s.category),
                         d.raw[i], d.calibrated[i], d.trend[i], d.seasonal[i], d.remainder[i],
                         s.values[i]);
    }
  }
}

}  // namespace cmrwave
