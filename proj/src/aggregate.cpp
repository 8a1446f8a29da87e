#include "cmrwave/aggregate.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "cmrwave/error.hpp"

namespace cmrwave {

std::string_view to_string(DominanceRelation r) {
  switch (r) {
    case DominanceRelation::Dominates: return "Dominates";
    case DominanceRelation::DominatedBy: return "DominatedBy";
    case DominanceRelation::Incomparable: return "Incomparable";
    case DominanceRelation::Equal: return "Equal";
  }
  return {};
}

DominanceRelation parse_relation(std::string_view text) {
  for (auto r : {DominanceRelation::Dominates, DominanceRelation::DominatedBy,
                 DominanceRelation::Incomparable, DominanceRelation::Equal}) {
    if (to_string(r) == text) return r;
  }
  throw ValidationError(fmt::format("unknown dominance relation '{}'", text));
}

DominanceRelation converse(DominanceRelation r) {
  switch (r) {
    case DominanceRelation::Dominates: return DominanceRelation::DominatedBy;
    case DominanceRelation::DominatedBy: return DominanceRelation::Dominates;
    default: return r;
  }
}

WaveSlice slice_wave(std::span<const PreparedSeries> prepared, Date restriction_date,
                     int length_days, int wave) {
  if (length_days <= 0) {
    throw ValidationError(fmt::format("slice length must be positive (got {})", length_days));
  }
  if (prepared.empty()) throw ValidationError("no prepared series to slice");
  const Date last = add_days(restriction_date, length_days - 1);

  WaveSlice slice;
  slice.locality_id = prepared.front().locality_id;
  slice.wave = wave;
  slice.restriction_date = restriction_date;
  slice.start_date = restriction_date;
  slice.length_days = length_days;
  for (const PreparedSeries& s : prepared) {
    const bool covered = !s.dates.empty() && s.dates.front() <= restriction_date &&
                         s.dates.back() >= last;
    if (!covered) {
      throw SlicingError(fmt::format(
          "{}/{}: wave {} needs {} .. {} but data covers {} .. {}", s.locality_id,
          key(s.category), wave, format_date(restriction_date), format_date(last),
          s.dates.empty() ? "-" : format_date(s.dates.front()),
          s.dates.empty() ? "-" : format_date(s.dates.back())));
    }
    const auto first = static_cast<std::size_t>(days_between(s.dates.front(), restriction_date));
    slice.values[s.category].assign(s.values.begin() + static_cast<long>(first),
                                    s.values.begin() + static_cast<long>(first) + length_days);
  }
  return slice;
}

std::vector<WaveSlice> split_windows(const WaveSlice& slice, int window_len) {
  if (window_len <= 0 || slice.length_days % window_len != 0) {
    throw ValidationError(fmt::format("a {}-day slice cannot be split into {}-day windows",
                                      slice.length_days, window_len));
  }
  const int count = slice.length_days / window_len;
  std::vector<WaveSlice> windows;
  windows.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    WaveSlice w;
    w.locality_id = slice.locality_id;
    w.wave = slice.wave;
    w.window_index = k + 1;
    w.restriction_date = slice.restriction_date;
    w.start_date = add_days(slice.start_date, static_cast<long>(k) * window_len);
    w.length_days = window_len;
    for (const auto& [c, v] : slice.values) {
      const auto begin = v.begin() + static_cast<long>(k) * window_len;
      w.values[c].assign(begin, begin + window_len);
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

AucVector auc(const WaveSlice& slice) {
  AucVector out;
  out.locality_id = slice.locality_id;
  out.wave = slice.wave;
  out.window_index = slice.window_index;
  out.start_date = slice.start_date;
  out.length_days = slice.length_days;
  for (const auto& [c, values] : slice.values) {
    double area = 0.0;
    for (double v : values) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw RangeError(fmt::format("{}/{}: scaled value {} outside [0, 1]",
                                     slice.locality_id, key(c), v));
      }
      area += v;
    }
    out.components[c] = area;
  }
  return out;
}

DominanceRelation dominance(std::span<const double> a, std::span<const double> b,
                            double epsilon) {
  if (a.size() != b.size()) {
    throw ComparisonError(fmt::format("cannot compare vectors of sizes {} and {}", a.size(),
                                      b.size()));
  }
  if (!(epsilon >= 0.0)) throw ValidationError("dominance epsilon must be non-negative");
  bool a_better = false;
  bool b_better = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - epsilon) a_better = true;
    else if (b[i] < a[i] - epsilon) b_better = true;
  }
  if (a_better && b_better) return DominanceRelation::Incomparable;
  if (a_better) return DominanceRelation::Dominates;
  if (b_better) return DominanceRelation::DominatedBy;
  return DominanceRelation::Equal;
}

DominanceRelation dominance(const AucVector& a, const AucVector& b, double epsilon) {
  if (a.window_index != b.window_index || a.length_days != b.length_days) {
    throw ComparisonError(fmt::format(
        "cannot compare window {} ({} days) with window {} ({} days)", a.window_index,
        a.length_days, b.window_index, b.length_days));
  }
  if (a.components.size() != b.components.size()) {
    throw ComparisonError("AUC vectors cover different category sets");
  }
  std::vector<double> va, vb;
  for (const auto& [c, v] : a.components) {
    auto it = b.components.find(c);
    if (it == b.components.end()) {
      throw ComparisonError(fmt::format("category {} missing from the second vector", key(c)));
    }
    va.push_back(v);
    vb.push_back(it->second);
  }
  return dominance(va, vb, epsilon);
}

ComparisonReport compare_waves(std::span<const PreparedSeries> prepared,
                               const LocalityConfig& locality, const StudyConfig& config) {
  const WaveSlice first =
      slice_wave(prepared, locality.wave1_restriction, config.period_length_days, 1);
  const WaveSlice second =
      slice_wave(prepared, locality.wave2_restriction, config.period_length_days, 2);

  ComparisonReport report;
  report.locality_id = locality.id;
  auto add = [&](const WaveSlice& s1, const WaveSlice& s2) {
    ComparisonRecord rec;
    rec.window_index = s1.window_index;
    rec.start_offset_days = s1.start_offset_days();
    rec.length_days = s1.length_days;
    rec.wave1 = auc(s1);
    rec.wave2 = auc(s2);
    rec.relation = dominance(rec.wave1, rec.wave2, config.epsilon);
    report.records.push_back(std::move(rec));
  };
  add(first, second);
  const auto w1 = split_windows(first, config.window_length_days);
  const auto w2 = split_windows(second, config.window_length_days);
  for (std::size_t k = 0; k < w1.size(); ++k) add(w1[k], w2[k]);
  return report;
}

}  // namespace cmrwave
