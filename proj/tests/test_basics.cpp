#include "doctest.h"

#include "cmrwave/category.hpp"
#include "cmrwave/date.hpp"
#include "cmrwave/error.hpp"

using namespace cmrwave;

TEST_SUITE("basics") {

TEST_CASE("dates parse strictly") {
  CHECK(format_date(parse_date("2020-02-29")) == "2020-02-29");
  CHECK(days_between(parse_date("2020-02-23"), parse_date("2020-11-06")) == 257);
  CHECK(add_days(parse_date("2020-12-31"), 1) == parse_date("2021-01-01"));
  for (const char* bad : {"2020-02-30", "2021-02-29", "2020-2-3", "20200223", "2020-02-23x", "",
                          " 2020-02-23", "2020-13-01"}) {
    CAPTURE(bad);
    Date d;
    CHECK_FALSE(try_parse_date(bad, d));
    CHECK_THROWS_AS(parse_date(bad), ValidationError);
  }
}

TEST_CASE("category names") {
  CHECK(kAnalysisCategoryCount == 5);
  CHECK(abbreviation(PlaceCategory::Workplaces) == "W");
  CHECK(abbreviation(PlaceCategory::GroceryPharmacy) == "G&P");
  CHECK(abbreviation(PlaceCategory::Parks) == "P");
  CHECK(abbreviation(PlaceCategory::RetailRecreation) == "R&R");
  CHECK(abbreviation(PlaceCategory::TransitStations) == "Ts");
  CHECK(column_name(PlaceCategory::RetailRecreation) ==
        "retail_and_recreation_percent_change_from_baseline");
  CHECK_FALSE(is_analysis_category(PlaceCategory::Residential));
  CHECK_FALSE(axis_index(PlaceCategory::Residential).has_value());
  for (std::size_t i = 0; i < kAnalysisCategories.size(); ++i) {
    CHECK(axis_index(kAnalysisCategories[i]) == i);
  }
  for (PlaceCategory c : kAllCategories) CHECK(category_from_key(key(c)) == c);
  CHECK_FALSE(category_from_key("beaches").has_value());
}

}
