#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cmrwave/category.hpp"
#include "cmrwave/date.hpp"
#include "cmrwave/stl.hpp"

namespace cmrwave {

/// Exact-match address of one CMR region. Empty fields must be empty in the
/// row, so "IT / Lombardy" matches the regional row and not the provinces
/// below it.
struct RegionSelector {
  std::string country_region_code;
  std::string sub_region_1;
  std::string sub_region_2;
  std::string metro_area;

  bool operator==(const RegionSelector&) const = default;
  auto operator<=>(const RegionSelector&) const = default;

  /// "IT/Lombardy", "GB/West Midlands/Birmingham", ... used as the locality id
  /// when parsing without a study configuration.
  std::string label() const;
};

/// One locality and place category: daily percent change from baseline.
/// `interpolated[i]` marks values synthesised by fill_gaps.
struct MobilitySeries {
  std::string locality_id;
  PlaceCategory category = PlaceCategory::GroceryPharmacy;
  std::vector<Date> dates;
  std::vector<double> values;
  std::vector<bool> interpolated;

  std::size_t size() const { return values.size(); }
  bool operator==(const MobilitySeries&) const = default;
};

using LocalitySeries = std::map<PlaceCategory, MobilitySeries>;

/// Parsed mobility data keyed by locality id.
using MobilityData = std::map<std::string, LocalitySeries>;

struct LocalityConfig {
  std::string id;
  std::string name;
  RegionSelector selector;
  Date wave1_restriction;
  Date wave2_restriction;

  bool operator==(const LocalityConfig&) const = default;
};

struct StudyConfig {
  std::vector<LocalityConfig> localities;
  int period_length_days = 56;
  int window_length_days = 14;
  /// Component equality tolerance for dominance classification.
  double epsilon = 1e-9;
  /// Longest run of missing days fill_gaps will interpolate across.
  int max_gap_days = 7;
  StlParams stl = default_stl_params();

  bool operator==(const StudyConfig&) const = default;
};

/// CMR columns the parser requires. Other CMR columns are optional.
std::span<const std::string_view> required_cmr_columns();

/// Reads a CMR-format CSV.
///
/// With an empty `selection`, every region in the file is kept and keyed by
/// RegionSelector::label(). Otherwise only rows whose region columns equal a
/// configured selector are kept, keyed by the locality id, and a locality
/// without any matching row raises SelectionError. Empty value cells leave
/// that day out of the series.
MobilityData parse_cmr_csv(std::istream& in, std::span<const LocalityConfig> selection = {});

/// Writes `data` back as CMR CSV rows using the selectors in `selection` for
/// the region columns.
void write_cmr_csv(std::ostream& out, const MobilityData& data,
                   std::span<const LocalityConfig> selection);

/// Reads the study configuration format documented in README.md.
StudyConfig load_study_config(std::istream& in);

/// Throws ValidationError when wave dates are out of order, lengths are not
/// positive or the period is not a multiple of the window.
void validate(const StudyConfig& config);

/// Makes `series` a contiguous daily series by linear interpolation across
/// interior gaps. A run of more than `max_gap_days` missing days raises
/// DataQualityError.
MobilitySeries fill_gaps(const MobilitySeries& series, int max_gap_days = 7);

}  // namespace cmrwave
