#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace cmrwave {

/// Calendar day. All series in this project are daily, so a day-precision
/// time point is the only date representation used.
using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Throws
/// ValidationError on anything else, including impossible days such as
/// 2020-02-30.
Date parse_date(std::string_view text);

/// Non-throwing variant; returns false when `text` is not a valid date.
bool try_parse_date(std::string_view text, Date& out);

std::string format_date(Date d);

inline Date add_days(Date d, long n) { return d + std::chrono::days{n}; }

inline long days_between(Date from, Date to) {
  return static_cast<long>((to - from).count());
}

}  // namespace cmrwave
