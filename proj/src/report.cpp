#include <charconv>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "cmrwave/aggregate.hpp"
#include "cmrwave/error.hpp"

namespace cmrwave {

namespace {

constexpr std::string_view kMagic = "# cmrwave comparison report v1";

std::string header_line() {
  std::string h = "locality,window,start_day,length_days,wave1_start,wave2_start";
  for (PlaceCategory c : kAnalysisCategories) {
    h += fmt::format(",{0}_w1,{0}_w2", key(c));
  }
  h += ",relation";
  return h;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T number(std::string_view s, std::size_t line_no) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw RowError(line_no, fmt::format("bad number '{}'", s));
  }
  return v;
}

}  // namespace

void write_report(std::ostream& out, const ComparisonReport& report) {
  out << kMagic << '\n' << header_line() << '\n';
  for (const ComparisonRecord& r : report.records) {
    out << fmt::format("{},{},{},{},{},{}", report.locality_id, r.window_index,
                       r.start_offset_days, r.length_days, format_date(r.wave1.start_date),
                       format_date(r.wave2.start_date));
    for (PlaceCategory c : kAnalysisCategories) {
      out << fmt::format(",{},{}", r.wave1.components.at(c), r.wave2.components.at(c));
    }
    out << ',' << to_string(r.relation) << '\n';
  }
}

std::vector<ComparisonReport> read_report(std::istream& in) {
  const std::string expected_header = header_line();
  constexpr std::size_t kFields = 6 + 2 * kAnalysisCategoryCount + 1;
  std::vector<ComparisonReport> reports;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line.starts_with("locality,")) {
      if (line != expected_header) throw SchemaError("unexpected report header: " + line);
      seen_header = true;
      continue;
    }
    if (!seen_header) throw SchemaError("report record before header");
    const auto f = split(line);
    if (f.size() != kFields) {
      throw RowError(line_no, fmt::format("expected {} fields, found {}", kFields, f.size()));
    }
    ComparisonRecord r;
    r.window_index = number<int>(f[1], line_no);
    r.start_offset_days = number<long>(f[2], line_no);
    r.length_days = number<int>(f[3], line_no);
    for (int wave : {1, 2}) {
      AucVector& v = wave == 1 ? r.wave1 : r.wave2;
      v.locality_id = std::string(f[0]);
      v.wave = wave;
      v.window_index = r.window_index;
      v.length_days = r.length_days;
      if (!try_parse_date(f[wave == 1 ? 4 : 5], v.start_date)) {
        throw RowError(line_no, "bad start date");
      }
    }
    for (std::size_t k = 0; k < kAnalysisCategoryCount; ++k) {
      r.wave1.components[kAnalysisCategories[k]] = number<double>(f[6 + 2 * k], line_no);
      r.wave2.components[kAnalysisCategories[k]] = number<double>(f[7 + 2 * k], line_no);
    }
    r.relation = parse_relation(f.back());
    if (reports.empty() || reports.back().locality_id != f[0]) {
      reports.push_back({std::string(f[0]), {}});
    }
    reports.back().records.push_back(std::move(r));
  }
  return reports;
}

}  // namespace cmrwave
