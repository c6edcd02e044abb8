#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "herd/date.hpp"
#include "herd/rolling.hpp"

namespace herd::cli {

enum class OutputFormat { Csv, Json };

OutputFormat parse_format(std::string_view text);

/// Columns center_date,value[,ci_lower,ci_upper]; missing values are empty
/// cells in CSV and null in JSON. Numbers carry 17 significant digits.
void write_series(std::ostream& out, const IndexSeries& series, OutputFormat format);

/// Reads either layout written by write_series; JSON is detected by a
/// leading '['.
IndexSeries read_series(std::istream& in, const std::string& source = "<stream>");
IndexSeries load_series(const std::filesystem::path& path);

/// A named date range, inclusive at both ends. Without dates the period
/// covers the whole series; only the preset label "entire" may omit them.
struct Period {
  std::string label;
  std::optional<Date> start;
  std::optional<Date> end;
};

/// Preset labels for crisis periods. They carry no dates; callers supply them.
inline const std::vector<std::string> kPresetPeriods = {"AFC", "DBB", "GFC", "entire"};

/// LABEL=YYYY-MM-DD:YYYY-MM-DD, or the bare label "entire".
Period parse_period(std::string_view text);
/// JSON array of {"label", "start", "end"} objects.
std::vector<Period> load_periods(const std::filesystem::path& path);

struct PeriodSummary {
  std::string series;
  Period period;
  Index count = 0;
  std::optional<double> mean;  // nullopt prints as NA
  std::optional<double> sd;    // sample standard deviation, 0 for a single value
};

std::vector<PeriodSummary> summarize(const IndexSeries& series, const std::string& name,
                                     const std::vector<Period>& periods);

void write_summary(std::ostream& out, const std::vector<PeriodSummary>& rows, OutputFormat format);

}  // namespace herd::cli
