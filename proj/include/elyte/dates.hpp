#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace elyte {

/// Calendar day. All day arithmetic goes through sys_days so "next day" is
/// always exactly one calendar day.
using Date = std::chrono::sys_days;

Date parse_date(std::string_view text);  // YYYY-MM-DD, throws Parse
std::string format_date(Date d);
Date today_utc();

inline Date add_days(Date d, int n) { return d + std::chrono::days{n}; }
inline int days_between(Date from, Date to) { return static_cast<int>((to - from).count()); }

struct DateRange {
  Date first;
  Date last;  // inclusive
};

}  // namespace elyte
