#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace cmrwave {

/// The six place categories published in the mobility reports.
enum class PlaceCategory {
  GroceryPharmacy,
  Parks,
  TransitStations,
  RetailRecreation,
  Workplaces,
  Residential,
};

inline constexpr std::array<PlaceCategory, 6> kAllCategories = {
    PlaceCategory::GroceryPharmacy,  PlaceCategory::Parks,
    PlaceCategory::TransitStations,  PlaceCategory::RetailRecreation,
    PlaceCategory::Workplaces,       PlaceCategory::Residential,
};

/// Categories that take part in the analysis, in radar-axis order
/// (W, G&P, P, R&R, Ts). Residential is parsed but never analysed.
inline constexpr std::array<PlaceCategory, 5> kAnalysisCategories = {
    PlaceCategory::Workplaces,       PlaceCategory::GroceryPharmacy,
    PlaceCategory::Parks,            PlaceCategory::RetailRecreation,
    PlaceCategory::TransitStations,
};

inline constexpr std::size_t kAnalysisCategoryCount = kAnalysisCategories.size();

constexpr bool is_analysis_category(PlaceCategory c) {
  return c != PlaceCategory::Residential;
}

/// `<category>_percent_change_from_baseline` column name in the CMR CSV.
std::string_view column_name(PlaceCategory c);

/// Short label used on chart axes and legends ("G&P", "Ts", ...).
std::string_view abbreviation(PlaceCategory c);

/// Identifier used in reports and diagnostics files ("grocery_pharmacy").
std::string_view key(PlaceCategory c);

std::optional<PlaceCategory> category_from_key(std::string_view k);

/// Position of `c` in kAnalysisCategories. Residential has no axis.
std::optional<std::size_t> axis_index(PlaceCategory c);

}  // namespace cmrwave
