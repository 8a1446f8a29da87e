#include "cmrwave/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "cmrwave/error.hpp"

namespace cmrwave {

namespace {

constexpr std::string_view kWave1Colour = "#d62728";
constexpr std::string_view kWave2Colour = "#1f77b4";

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string svg_open(int width, int height, std::string_view title) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" "
      "height=\"{1}\" viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\">\n"
      "<title>{2}</title>\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n",
      width, height, xml_escape(title));
}

std::string_view category_colour(PlaceCategory c) {
  switch (c) {
    case PlaceCategory::Workplaces: return "#1b9e77";
    case PlaceCategory::GroceryPharmacy: return "#d95f02";
    case PlaceCategory::Parks: return "#7570b3";
    case PlaceCategory::RetailRecreation: return "#e7298a";
    case PlaceCategory::TransitStations: return "#66a61e";
    case PlaceCategory::Residential: return "#999999";
  }
  return "#000000";
}

struct Point {
  double x;
  double y;
};

double axis_angle(std::size_t axis) {
  return 2.0 * std::numbers::pi * static_cast<double>(axis) /
         static_cast<double>(kAnalysisCategoryCount);
}

Point polar(Point centre, double radius, std::size_t axis) {
  const double a = axis_angle(axis);
  return {centre.x + radius * std::sin(a), centre.y - radius * std::cos(a)};
}

std::string points_attr(std::span<const Point> pts) {
  std::string s;
  for (const Point& p : pts) {
    if (!s.empty()) s.push_back(' ');
    s += fmt::format("{},{}", p.x, p.y);
  }
  return s;
}

std::string window_title(const AucVector& v) {
  if (v.window_index == 0) return fmt::format("{}: whole {}-day period", v.locality_id, v.length_days);
  return fmt::format("{}: window {} (days {}-{})", v.locality_id, v.window_index,
                     (v.window_index - 1) * v.length_days, v.window_index * v.length_days - 1);
}

}  // namespace

double radar_radius(const RadarOptions& options) {
  return 0.35 * static_cast<double>(std::min(options.width, options.height));
}

std::string radar_chart(const AucVector& wave1, const AucVector& wave2,
                        const RadarOptions& options) {
  if (wave1.window_index != wave2.window_index || wave1.length_days != wave2.length_days) {
    throw ValidationError("radar chart needs two AUC vectors of the same window");
  }
  if (wave1.length_days <= 0) throw ValidationError("radar chart axis maximum must be positive");
  const double axis_max = wave1.length_days;
  for (const AucVector* v : {&wave1, &wave2}) {
    for (PlaceCategory c : kAnalysisCategories) {
      auto it = v->components.find(c);
      if (it == v->components.end()) {
        throw ValidationError(fmt::format("radar chart: wave {} lacks category {}", v->wave, key(c)));
      }
      if (!(it->second >= 0.0 && it->second <= axis_max)) {
        throw RangeError(fmt::format("radar chart: {} value {} outside [0, {}]", key(c),
                                     it->second, axis_max));
      }
    }
  }

  const std::string title = options.title.empty() ? window_title(wave1) : options.title;
  const Point centre{options.width / 2.0, options.height / 2.0 + 10.0};
  const double R = radar_radius(options);

  std::string svg = svg_open(options.width, options.height, title);
  svg += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
                     centre.x, xml_escape(title));

  svg += "<g class=\"grid\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (double frac : {0.25, 0.5, 0.75, 1.0}) {
    std::array<Point, kAnalysisCategoryCount> ring{};
    for (std::size_t k = 0; k < ring.size(); ++k) ring[k] = polar(centre, frac * R, k);
    svg += fmt::format("<polygon points=\"{}\"/>\n", points_attr(ring));
  }
  svg += "</g>\n<g class=\"axes\" stroke=\"#888888\" stroke-width=\"1\">\n";
  for (std::size_t k = 0; k < kAnalysisCategoryCount; ++k) {
    const Point end = polar(centre, R, k);
    svg += fmt::format(
        "<line class=\"axis\" data-category=\"{}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n",
        key(kAnalysisCategories[k]), centre.x, centre.y, end.x, end.y);
  }
  svg += "</g>\n<g class=\"labels\" font-size=\"14\" text-anchor=\"middle\">\n";
  for (std::size_t k = 0; k < kAnalysisCategoryCount; ++k) {
    const Point p = polar(centre, R + 22.0, k);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" dominant-baseline=\"middle\">{}</text>\n", p.x,
                       p.y, xml_escape(abbreviation(kAnalysisCategories[k])));
  }
  const Point tick = polar(centre, R, 0);
  svg += fmt::format(
      "<text class=\"tick\" x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#555555\">0</text>\n"
      "<text class=\"tick\" x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#555555\">{}</text>\n",
      centre.x + 4.0, centre.y - 4.0, tick.x + 4.0, tick.y + 12.0, wave1.length_days);
  svg += "</g>\n";

  for (const AucVector* v : {&wave1, &wave2}) {
    const std::string_view colour = v == &wave1 ? kWave1Colour : kWave2Colour;
    std::array<Point, kAnalysisCategoryCount> pts{};
    for (std::size_t k = 0; k < pts.size(); ++k) {
      pts[k] = polar(centre, v->components.at(kAnalysisCategories[k]) / axis_max * R, k);
    }
    svg += fmt::format(
        "<polygon class=\"wave\" data-wave=\"{}\" points=\"{}\" fill=\"{}\" "
        "fill-opacity=\"0.2\" stroke=\"{}\" stroke-width=\"2\"/>\n",
        v == &wave1 ? 1 : 2, points_attr(pts), colour, colour);
  }
  svg += fmt::format("<circle class=\"centre\" cx=\"{}\" cy=\"{}\" r=\"1.5\" fill=\"#555555\"/>\n",
                     centre.x, centre.y);

  const double ly = options.height - 40.0;
  svg += "<g class=\"legend\" font-size=\"13\">\n";
  for (int wave : {1, 2}) {
    const double lx = 20.0;
    const double y = ly + (wave - 1) * 18.0;
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>"
        "<text x=\"{}\" y=\"{}\">wave {} (from {})</text>\n",
        lx, y, wave == 1 ? kWave1Colour : kWave2Colour, lx + 18.0, y + 11.0, wave,
        format_date(wave == 1 ? wave1.start_date : wave2.start_date));
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

std::string series_plot(std::span<const PreparedSeries> prepared, const LocalityConfig& locality,
                        const SeriesPlotOptions& options) {
  if (prepared.empty()) throw ValidationError("series plot needs at least one category");
  const Date first = prepared.front().dates.empty() ? Date{} : prepared.front().dates.front();
  const Date last = prepared.front().dates.empty() ? Date{} : prepared.front().dates.back();
  for (const PreparedSeries& s : prepared) {
    if (s.dates.empty() || s.dates.front() != first || s.dates.back() != last ||
        s.dates.size() != s.values.size()) {
      throw ValidationError("series plot needs aligned, non-empty series");
    }
  }
  for (Date start : {locality.wave1_restriction, locality.wave2_restriction}) {
    if (start < first || add_days(start, options.period_length_days - 1) > last) {
      throw ValidationError(fmt::format("series plot: period from {} not covered by data",
                                        format_date(start)));
    }
  }

  const double left = 60.0, right = 140.0, top = 40.0, bottom = 50.0;
  const double plot_w = options.width - left - right;
  const double plot_h = options.height - top - bottom;
  const double span_days = std::max(1L, days_between(first, last));
  auto x_of = [&](Date d) { return left + plot_w * days_between(first, d) / span_days; };
  auto y_of = [&](double v) { return top + plot_h * (1.0 - v); };

  const std::string title =
      options.title.empty() ? fmt::format("{}: prepared mobility trends", locality.name)
                            : options.title;
  std::string svg = svg_open(options.width, options.height, title);
  svg += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
                     options.width / 2.0, xml_escape(title));

  svg += "<g class=\"periods\">\n";
  for (int wave : {1, 2}) {
    const Date start = wave == 1 ? locality.wave1_restriction : locality.wave2_restriction;
    const double x0 = x_of(start);
    const double x1 = x_of(add_days(start, options.period_length_days));
    svg += fmt::format(
        "<rect class=\"period\" data-wave=\"{}\" data-start=\"{}\" data-days=\"{}\" x=\"{}\" "
        "y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#bbbbbb\" fill-opacity=\"0.35\"/>\n",
        wave, format_date(start), options.period_length_days, x0, top, x1 - x0, plot_h);
    if (options.window_length_days > 0) {
      for (int d = options.window_length_days; d < options.period_length_days;
           d += options.window_length_days) {
        const double x = x_of(add_days(start, d));
        svg += fmt::format(
            "<line class=\"window-edge\" x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" "
            "stroke=\"#ffffff\" stroke-width=\"1\"/>\n",
            x, top, top + plot_h);
      }
    }
  }
  svg += "</g>\n";

  svg += fmt::format(
      "<g class=\"frame\" stroke=\"#444444\" fill=\"none\">\n"
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>\n</g>\n",
      left, top, plot_w, plot_h);
  svg += "<g class=\"y-ticks\" font-size=\"11\" text-anchor=\"end\">\n";
  for (double v : {0.0, 0.5, 1.0}) {
    svg += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", left - 6.0, y_of(v) + 4.0, v);
  }
  svg += "</g>\n<g class=\"x-ticks\" font-size=\"11\" text-anchor=\"middle\">\n";
  {
    std::chrono::year_month_day ymd{first};
    auto month = std::chrono::year_month{ymd.year(), ymd.month()};
    if (ymd.day() != std::chrono::day{1}) month += std::chrono::months{1};
    for (;; month += std::chrono::months{1}) {
      const Date d{month / std::chrono::day{1}};
      if (d > last) break;
      const double x = x_of(d);
      svg += fmt::format(
          "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#444444\"/>"
          "<text x=\"{0}\" y=\"{3}\">{4}</text>\n",
          x, top + plot_h, top + plot_h + 5.0, top + plot_h + 18.0,
          format_date(d).substr(0, 7));
    }
  }
  svg += "</g>\n";

  svg += "<g class=\"series\" fill=\"none\" stroke-width=\"1.5\">\n";
  for (const PreparedSeries& s : prepared) {
    std::string pts;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (!pts.empty()) pts.push_back(' ');
      pts += fmt::format("{},{}", x_of(s.dates[i]), y_of(s.values[i]));
    }
    svg += fmt::format("<polyline class=\"category\" data-category=\"{}\" stroke=\"{}\" points=\"{}\"/>\n",
                       key(s.category), category_colour(s.category), pts);
  }
  svg += "</g>\n";

  svg += "<g class=\"restrictions\" stroke=\"#000000\" stroke-width=\"1.2\" stroke-dasharray=\"6,4\">\n";
  for (Date d : {locality.wave1_restriction, locality.wave2_restriction}) {
    svg += fmt::format(
        "<line class=\"restriction\" data-date=\"{0}\" x1=\"{1}\" y1=\"{2}\" x2=\"{1}\" y2=\"{3}\"/>\n",
        format_date(d), x_of(d), top, top + plot_h);
  }
  svg += "</g>\n";

  svg += "<g class=\"legend\" font-size=\"13\">\n";
  double ly = top + 10.0;
  for (const PreparedSeries& s : prepared) {
    const double lx = left + plot_w + 20.0;
    svg += fmt::format(
        "<line class=\"legend-entry\" x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
        "stroke-width=\"3\"/><text x=\"{4}\" y=\"{5}\">{6}</text>\n",
        lx, ly, lx + 20.0, category_colour(s.category), lx + 26.0, ly + 4.0,
        xml_escape(abbreviation(s.category)));
    ly += 20.0;
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

std::string relation_label(DominanceRelation r) {
  switch (r) {
    case DominanceRelation::Dominates: return "Dominates(w1)";
    case DominanceRelation::DominatedBy: return "Dominates(w2)";
    case DominanceRelation::Incomparable: return "Incomparable";
    case DominanceRelation::Equal: return "Equal";
  }
  return {};
}

std::string report_table(const ComparisonReport& report, TableFormat format) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{"window", "start_day", "days"};
  for (PlaceCategory c : kAnalysisCategories) {
    head.push_back(fmt::format("{}(w1)", abbreviation(c)));
    head.push_back(fmt::format("{}(w2)", abbreviation(c)));
  }
  head.push_back("relation");
  rows.push_back(head);
  for (const ComparisonRecord& r : report.records) {
    std::vector<std::string> row{
        r.window_index == 0 ? std::string("whole-period") : fmt::format("window-{}", r.window_index),
        fmt::format("{}", r.start_offset_days), fmt::format("{}", r.length_days)};
    for (PlaceCategory c : kAnalysisCategories) {
      row.push_back(fmt::format("{:.3f}", r.wave1.components.at(c)));
      row.push_back(fmt::format("{:.3f}", r.wave2.components.at(c)));
    }
    row.push_back(relation_label(r.relation));
    rows.push_back(std::move(row));
  }

  std::string out;
  if (format == TableFormat::Csv) {
    out += "locality";
    for (const auto& h : rows.front()) out += "," + h;
    out += '\n';
    for (std::size_t i = 1; i < rows.size(); ++i) {
      out += report.locality_id;
      for (const auto& cell : rows[i]) out += "," + cell;
      out += '\n';
    }
    return out;
  }

  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : rows)
    for (std::size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], row[k].size());
  out += fmt::format("locality: {}\n", report.locality_id);
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0) line += "  ";
      // text columns left-aligned, numbers right-aligned
      if (k == 0 || k + 1 == row.size()) line += fmt::format("{:<{}}", row[k], width[k]);
      else line += fmt::format("{:>{}}", row[k], width[k]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

}  // namespace cmrwave
