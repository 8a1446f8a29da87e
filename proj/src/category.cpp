#include "cmrwave/category.hpp"

namespace cmrwave {

std::string_view column_name(PlaceCategory c) {
  switch (c) {
    case PlaceCategory::GroceryPharmacy:
      return "grocery_and_pharmacy_percent_change_from_baseline";
    case PlaceCategory::Parks:
      return "parks_percent_change_from_baseline";
    case PlaceCategory::TransitStations:
      return "transit_stations_percent_change_from_baseline";
    case PlaceCategory::RetailRecreation:
      return "retail_and_recreation_percent_change_from_baseline";
    case PlaceCategory::Workplaces:
      return "workplaces_percent_change_from_baseline";
    case PlaceCategory::Residential:
      return "residential_percent_change_from_baseline";
  }
  return {};
}

std::string_view abbreviation(PlaceCategory c) {
  switch (c) {
    case PlaceCategory::GroceryPharmacy: return "G&P";
    case PlaceCategory::Parks: return "P";
    case PlaceCategory::TransitStations: return "Ts";
    case PlaceCategory::RetailRecreation: return "R&R";
    case PlaceCategory::Workplaces: return "W";
    case PlaceCategory::Residential: return "Res";
  }
  return {};
}

std::string_view key(PlaceCategory c) {
  switch (c) {
    case PlaceCategory::GroceryPharmacy: return "grocery_pharmacy";
    case PlaceCategory::Parks: return "parks";
    case PlaceCategory::TransitStations: return "transit_stations";
    case PlaceCategory::RetailRecreation: return "retail_recreation";
    case PlaceCategory::Workplaces: return "workplaces";
    case PlaceCategory::Residential: return "residential";
  }
  return {};
}

std::optional<PlaceCategory> category_from_key(std::string_view k) {
  for (PlaceCategory c : kAllCategories) {
    if (key(c) == k) return c;
  }
  return std::nullopt;
}

std::optional<std::size_t> axis_index(PlaceCategory c) {
  for (std::size_t i = 0; i < kAnalysisCategories.size(); ++i) {
    if (kAnalysisCategories[i] == c) return i;
  }
  return std::nullopt;
}

}  // namespace cmrwave
