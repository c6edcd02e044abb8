#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace herd {

using Date = std::chrono::year_month_day;

// Strict ISO-8601 calendar date, YYYY-MM-DD.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& date);

Date add_days(const Date& date, long days);

}  // namespace herd
