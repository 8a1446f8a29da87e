#include "cmrwave/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "cmrwave/error.hpp"

namespace cmrwave {

namespace {

constexpr std::array<std::string_view, 4> kRegionColumns = {
    "country_region_code", "sub_region_1", "sub_region_2", "date"};

// Column order of the published CSV, used when writing.
constexpr std::array<std::string_view, 9> kLeadingColumns = {
    "country_region_code", "country_region", "sub_region_1",
    "sub_region_2",        "metro_area",     "iso_3166_2_code",
    "census_fips_code",    "place_id",       "date"};
constexpr std::array<PlaceCategory, 6> kCsvCategoryOrder = {
    PlaceCategory::RetailRecreation, PlaceCategory::GroceryPharmacy,
    PlaceCategory::Parks,            PlaceCategory::TransitStations,
    PlaceCategory::Workplaces,       PlaceCategory::Residential};

const std::vector<std::string_view>& required_columns_storage() {
  static const std::vector<std::string_view> cols = [] {
    std::vector<std::string_view> v(kRegionColumns.begin(), kRegionColumns.end());
    for (PlaceCategory c : kCsvCategoryOrder) v.push_back(column_name(c));
    return v;
  }();
  return cols;
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw RowError(line_no, "unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void strip_line_end(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

struct DayCells {
  std::array<std::optional<double>, kAllCategories.size()> values;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string RegionSelector::label() const {
  std::string out = country_region_code;
  for (const std::string* part : {&sub_region_1, &sub_region_2, &metro_area}) {
    if (!part->empty()) out += "/" + *part;
  }
  return out;
}

std::span<const std::string_view> required_cmr_columns() {
  return required_columns_storage();
}

MobilityData parse_cmr_csv(std::istream& in, std::span<const LocalityConfig> selection) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("CMR input is empty (no header row)");
  strip_line_end(line);
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);

  const auto header = split_csv_line(line, 1);
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  for (std::string_view name : required_cmr_columns()) {
    if (!column(name)) {
      throw SchemaError(fmt::format("CMR input is missing required column '{}'", name));
    }
  }
  const std::size_t col_country = *column("country_region_code");
  const std::size_t col_sub1 = *column("sub_region_1");
  const std::size_t col_sub2 = *column("sub_region_2");
  const std::size_t col_date = *column("date");
  const auto col_metro = column("metro_area");
  std::array<std::size_t, kAllCategories.size()> col_value{};
  for (std::size_t k = 0; k < kAllCategories.size(); ++k) {
    col_value[k] = *column(column_name(kAllCategories[k]));
  }

  std::map<std::string, std::map<Date, DayCells>> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_line_end(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size()) {
      throw RowError(line_no, fmt::format("expected {} fields, found {}", header.size(),
                                          fields.size()));
    }
    RegionSelector region{fields[col_country], fields[col_sub1], fields[col_sub2],
                          col_metro ? fields[*col_metro] : std::string{}};
    std::string locality;
    if (selection.empty()) {
      locality = region.label();
    } else {
      auto it = std::find_if(selection.begin(), selection.end(),
                             [&](const LocalityConfig& l) { return l.selector == region; });
      if (it == selection.end()) continue;
      locality = it->id;
    }

    Date day;
    if (!try_parse_date(fields[col_date], day)) {
      throw RowError(line_no, fmt::format("unparseable date '{}'", fields[col_date]));
    }
    DayCells row;
    for (std::size_t k = 0; k < kAllCategories.size(); ++k) {
      const std::string& cell = fields[col_value[k]];
      if (cell.empty()) continue;
      double v = 0.0;
      if (!parse_double(cell, v)) {
        throw RowError(line_no, fmt::format("unparseable value '{}' in column {}", cell,
                                            column_name(kAllCategories[k])));
      }
      row.values[k] = v;
    }
    auto [pos, inserted] = cells[locality].emplace(day, row);
    if (!inserted) {
      throw RowError(line_no, fmt::format("duplicate date {} for locality {}",
                                          format_date(day), locality));
    }
  }

  for (const LocalityConfig& l : selection) {
    if (!cells.contains(l.id)) {
      throw SelectionError(fmt::format("no CMR rows match locality '{}' (selector {})",
                                       l.id, l.selector.label()));
    }
  }

  MobilityData data;
  for (const auto& [locality, days] : cells) {
    LocalitySeries& out = data[locality];
    for (std::size_t k = 0; k < kAllCategories.size(); ++k) {
      MobilitySeries s;
      s.locality_id = locality;
      s.category = kAllCategories[k];
      for (const auto& [day, row] : days) {
        if (!row.values[k]) continue;
        s.dates.push_back(day);
        s.values.push_back(*row.values[k]);
      }
      s.interpolated.assign(s.values.size(), false);
      out.emplace(kAllCategories[k], std::move(s));
    }
  }
  return data;
}

void write_cmr_csv(std::ostream& out, const MobilityData& data,
                   std::span<const LocalityConfig> selection) {
  std::vector<std::string_view> header(kLeadingColumns.begin(), kLeadingColumns.end());
  for (PlaceCategory c : kCsvCategoryOrder) header.push_back(column_name(c));
  out << fmt::format("{}\n", fmt::join(header, ","));

  for (const auto& [locality, series] : data) {
    auto cfg = std::find_if(selection.begin(), selection.end(),
                            [&](const LocalityConfig& l) { return l.id == locality; });
    if (cfg == selection.end()) {
      throw SelectionError(fmt::format("no selector for locality '{}'", locality));
    }
    std::set<Date> days;
    for (const auto& [cat, s] : series) days.insert(s.dates.begin(), s.dates.end());
    for (Date day : days) {
      const RegionSelector& r = cfg->selector;
      out << csv_field(r.country_region_code) << ',' << ',' << csv_field(r.sub_region_1)
          << ',' << csv_field(r.sub_region_2) << ',' << csv_field(r.metro_area) << ",,,,"
          << format_date(day);
      for (PlaceCategory c : kCsvCategoryOrder) {
        out << ',';
        auto it = series.find(c);
        if (it == series.end()) continue;
        const auto& s = it->second;
        auto pos = std::lower_bound(s.dates.begin(), s.dates.end(), day);
        if (pos != s.dates.end() && *pos == day) {
          out << fmt::format("{}", s.values[static_cast<std::size_t>(pos - s.dates.begin())]);
        }
      }
      out << '\n';
    }
  }
}

namespace {

struct ConfigLine {
  std::size_t number;
  std::string key;
  std::string value;
};

[[noreturn]] void config_error(std::size_t line, const std::string& what) {
  throw ValidationError(fmt::format("study config line {}: {}", line, what));
}

int parse_int(const ConfigLine& l) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(l.value.data(), l.value.data() + l.value.size(), v);
  if (ec != std::errc{} || ptr != l.value.data() + l.value.size()) {
    config_error(l.number, fmt::format("'{}' expects an integer, got '{}'", l.key, l.value));
  }
  return v;
}

double parse_real(const ConfigLine& l) {
  double v = 0.0;
  if (!parse_double(l.value, v)) {
    config_error(l.number, fmt::format("'{}' expects a number, got '{}'", l.key, l.value));
  }
  return v;
}

bool valid_locality_id(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-';
  });
}

}  // namespace

StudyConfig load_study_config(std::istream& in) {
  StudyConfig cfg;
  enum class Section { Global, Stl, Locality } section = Section::Global;
  bool trend_span_set = false, lowpass_span_set = false;
  struct Pending {
    LocalityConfig loc;
    std::size_t line = 0;
    bool has_country = false, has_wave1 = false, has_wave2 = false, has_name = false;
  };
  std::vector<Pending> pending;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    strip_line_end(raw);
    // '#' or ';' after whitespace starts a trailing comment
    for (std::size_t i = 1; i < raw.size(); ++i) {
      if ((raw[i] == '#' || raw[i] == ';') && (raw[i - 1] == ' ' || raw[i - 1] == '\t')) {
        raw.resize(i);
        break;
      }
    }
    const std::string text = trim(raw);
    if (text.empty() || text.front() == '#' || text.front() == ';') continue;

    if (text.front() == '[') {
      if (text.back() != ']') config_error(line_no, "unterminated section header");
      const std::string name = trim(std::string_view(text).substr(1, text.size() - 2));
      if (name == "stl") {
        section = Section::Stl;
      } else if (name.starts_with("locality ") || name.starts_with("locality\t")) {
        const std::string id = trim(std::string_view(name).substr(9));
        if (!valid_locality_id(id)) {
          config_error(line_no, fmt::format("invalid locality id '{}' (use letters, digits, "
                                            "'_' or '-')", id));
        }
        for (const Pending& p : pending) {
          if (p.loc.id == id) config_error(line_no, fmt::format("duplicate locality '{}'", id));
        }
        section = Section::Locality;
        pending.push_back({});
        pending.back().loc.id = id;
        pending.back().line = line_no;
      } else {
        config_error(line_no, fmt::format("unknown section '[{}]'", name));
      }
      continue;
    }

    const auto eq = text.find('=');
    if (eq == std::string::npos) config_error(line_no, "expected 'key = value'");
    const ConfigLine l{line_no, trim(std::string_view(text).substr(0, eq)),
                       trim(std::string_view(text).substr(eq + 1))};

    switch (section) {
      case Section::Global:
        if (l.key == "period_length_days") cfg.period_length_days = parse_int(l);
        else if (l.key == "window_length_days") cfg.window_length_days = parse_int(l);
        else if (l.key == "epsilon") cfg.epsilon = parse_real(l);
        else if (l.key == "max_gap_days") cfg.max_gap_days = parse_int(l);
        else config_error(line_no, fmt::format("unknown key '{}'", l.key));
        break;
      case Section::Stl:
        if (l.key == "period") cfg.stl.period = parse_int(l);
        else if (l.key == "seasonal_span") cfg.stl.seasonal_span = parse_int(l);
        else if (l.key == "trend_span") { cfg.stl.trend_span = parse_int(l); trend_span_set = true; }
        else if (l.key == "lowpass_span") { cfg.stl.lowpass_span = parse_int(l); lowpass_span_set = true; }
        else if (l.key == "seasonal_degree") cfg.stl.seasonal_degree = parse_int(l);
        else if (l.key == "trend_degree") cfg.stl.trend_degree = parse_int(l);
        else if (l.key == "lowpass_degree") cfg.stl.lowpass_degree = parse_int(l);
        else if (l.key == "inner_iterations") cfg.stl.inner_iterations = parse_int(l);
        else if (l.key == "outer_iterations") cfg.stl.outer_iterations = parse_int(l);
        else config_error(line_no, fmt::format("unknown [stl] key '{}'", l.key));
        break;
      case Section::Locality: {
        Pending& p = pending.back();
        if (l.key == "name") { p.loc.name = l.value; p.has_name = true; }
        else if (l.key == "country_region_code") { p.loc.selector.country_region_code = l.value; p.has_country = true; }
        else if (l.key == "sub_region_1") p.loc.selector.sub_region_1 = l.value;
        else if (l.key == "sub_region_2") p.loc.selector.sub_region_2 = l.value;
        else if (l.key == "metro_area") p.loc.selector.metro_area = l.value;
        else if (l.key == "wave1" || l.key == "wave2") {
          Date d;
          if (!try_parse_date(l.value, d)) {
            config_error(line_no, fmt::format("'{}' is not an ISO-8601 date", l.value));
          }
          if (l.key == "wave1") { p.loc.wave1_restriction = d; p.has_wave1 = true; }
          else { p.loc.wave2_restriction = d; p.has_wave2 = true; }
        } else {
          config_error(line_no, fmt::format("unknown locality key '{}'", l.key));
        }
        break;
      }
    }
  }

  if (!trend_span_set) {
    cfg.stl.trend_span = default_trend_span(cfg.stl.period, cfg.stl.seasonal_span);
  }
  if (!lowpass_span_set) cfg.stl.lowpass_span = default_lowpass_span(cfg.stl.period);

  for (Pending& p : pending) {
    const char* missing = !p.has_country ? "country_region_code"
                          : !p.has_wave1 ? "wave1"
                          : !p.has_wave2 ? "wave2"
                                         : nullptr;
    if (missing) {
      config_error(p.line, fmt::format("locality '{}' lacks '{}'", p.loc.id, missing));
    }
    if (!p.has_name) p.loc.name = p.loc.id;
    cfg.localities.push_back(std::move(p.loc));
  }
  validate(cfg);
  return cfg;
}

void validate(const StudyConfig& cfg) {
  if (cfg.localities.empty()) throw ValidationError("study config defines no localities");
  for (const LocalityConfig& l : cfg.localities) {
    if (!(l.wave1_restriction < l.wave2_restriction)) {
      throw ValidationError(fmt::format(
          "locality '{}': wave1 restriction date {} must precede wave2 date {}", l.id,
          format_date(l.wave1_restriction), format_date(l.wave2_restriction)));
    }
  }
  if (cfg.period_length_days <= 0 || cfg.window_length_days <= 0) {
    throw ValidationError("period and window lengths must be positive");
  }
  if (cfg.period_length_days % cfg.window_length_days != 0) {
    throw ValidationError(fmt::format("period length {} is not a multiple of window length {}",
                                      cfg.period_length_days, cfg.window_length_days));
  }
  if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon)) {
    throw ValidationError("epsilon must be a finite non-negative number");
  }
  if (cfg.max_gap_days < 0) throw ValidationError("max_gap_days must be non-negative");
  validate(cfg.stl);
}

MobilitySeries fill_gaps(const MobilitySeries& series, int max_gap_days) {
  const std::size_t n = series.values.size();
  if (series.dates.size() != n) {
    throw ValidationError(fmt::format("{}/{}: {} dates for {} values", series.locality_id,
                                      key(series.category), series.dates.size(), n));
  }
  if (n < 2) {
    throw ValidationError(fmt::format("{}/{}: gap filling needs at least 2 points (got {})",
                                      series.locality_id, key(series.category), n));
  }
  const bool has_flags = series.interpolated.size() == n;

  MobilitySeries out;
  out.locality_id = series.locality_id;
  out.category = series.category;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const long step = days_between(series.dates[i - 1], series.dates[i]);
      if (step <= 0) {
        throw ValidationError(fmt::format("{}/{}: dates not strictly increasing at {}",
                                          series.locality_id, key(series.category),
                                          format_date(series.dates[i])));
      }
      const long missing = step - 1;
      if (missing > max_gap_days) {
        throw DataQualityError(fmt::format(
            "{}/{}: {} consecutive missing days after {} exceed the {}-day limit",
            series.locality_id, key(series.category), missing,
            format_date(series.dates[i - 1]), max_gap_days));
      }
      const double a = series.values[i - 1];
      const double b = series.values[i];
      for (long k = 1; k <= missing; ++k) {
        out.dates.push_back(add_days(series.dates[i - 1], k));
        out.values.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(step));
        out.interpolated.push_back(true);
      }
    }
    out.dates.push_back(series.dates[i]);
    out.values.push_back(series.values[i]);
    out.interpolated.push_back(has_flags && series.interpolated[i]);
  }
  return out;
}

}  // namespace cmrwave
