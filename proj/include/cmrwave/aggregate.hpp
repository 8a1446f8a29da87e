#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmrwave/category.hpp"
#include "cmrwave/date.hpp"
#include "cmrwave/ingest.hpp"
#include "cmrwave/prepare.hpp"

namespace cmrwave {

/// Contiguous excerpt of prepared data starting at or after a restriction
/// date. window_index 0 is the whole period; windows count from 1.
struct WaveSlice {
  std::string locality_id;
  int wave = 1;
  int window_index = 0;
  Date restriction_date;
  Date start_date;
  int length_days = 0;
  std::map<PlaceCategory, std::vector<double>> values;

  long start_offset_days() const { return days_between(restriction_date, start_date); }
};

/// Area under each category's curve for one slice.
struct AucVector {
  std::string locality_id;
  int wave = 1;
  int window_index = 0;
  Date start_date;
  int length_days = 0;
  std::map<PlaceCategory, double> components;

  bool operator==(const AucVector&) const = default;
};

enum class DominanceRelation { Dominates, DominatedBy, Incomparable, Equal };

std::string_view to_string(DominanceRelation r);
DominanceRelation parse_relation(std::string_view text);

/// The relation seen from the other side (Dominates <-> DominatedBy).
DominanceRelation converse(DominanceRelation r);

/// Days `restriction_date .. restriction_date + length_days - 1` of every
/// prepared category. Throws SlicingError when the data does not cover them.
WaveSlice slice_wave(std::span<const PreparedSeries> prepared, Date restriction_date,
                     int length_days, int wave = 1);

/// Consecutive non-overlapping windows of `window_len` days.
std::vector<WaveSlice> split_windows(const WaveSlice& slice, int window_len);

/// Unit-width rectangle rule: the sum of the daily scaled values, so a slice
/// of length L lies in [0, L].
AucVector auc(const WaveSlice& slice);

/// Compares component vectors where smaller is better. Components within
/// `epsilon` count as equal.
DominanceRelation dominance(std::span<const double> a, std::span<const double> b,
                            double epsilon = 0.0);

/// Same, for AUC vectors of the same window. Throws ComparisonError when the
/// category sets or window metadata differ.
DominanceRelation dominance(const AucVector& a, const AucVector& b, double epsilon = 0.0);

struct ComparisonRecord {
  int window_index = 0;
  long start_offset_days = 0;
  int length_days = 0;
  AucVector wave1;
  AucVector wave2;
  /// Relation of wave 1 to wave 2: Dominates means wave 1 reduced mobility more.
  DominanceRelation relation = DominanceRelation::Incomparable;
};

struct ComparisonReport {
  std::string locality_id;
  std::vector<ComparisonRecord> records;  // whole period first, then windows
};

/// Whole-period comparison followed by one comparison per window.
ComparisonReport compare_waves(std::span<const PreparedSeries> prepared,
                               const LocalityConfig& locality, const StudyConfig& config);

/// Line-oriented report serialisation; see README.md for the layout.
void write_report(std::ostream& out, const ComparisonReport& report);
std::vector<ComparisonReport> read_report(std::istream& in);

}  // namespace cmrwave
