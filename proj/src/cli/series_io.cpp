#include "series_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "herd/error.hpp"

namespace herd::cli {

namespace {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    out.push_back(field);
  }
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_cell(const std::string& text, const Location& where) {
  if (text.empty() || text == "NA" || text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::UnparseableValue, "cannot parse value '" + text + "'", where);
  }
  return v;
}

Date parse_date_or_throw(const std::string& text, const Location& where) {
  const auto date = parse_date(text);
  if (!date) throw Error(ErrorCode::UnparseableDate, "cannot parse date '" + text + "'", where);
  return *date;
}

double json_number(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

IndexSeries read_series_json(std::istream& in, const std::string& source) {
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::UnparseableValue, std::string("invalid JSON series: ") + e.what(), {source});
  }
  if (!doc.is_array()) throw Error(ErrorCode::UnparseableValue, "JSON series must be an array", {source});
  IndexSeries series;
  const auto n = static_cast<Index>(doc.size());
  series.values.resize(n);
  const bool has_ci = n > 0 && doc[0].contains("ci_lower");
  if (has_ci) {
    series.ci_lower = Vector(n);
    series.ci_upper = Vector(n);
  }
  for (Index k = 0; k < n; ++k) {
    const json& rec = doc[static_cast<std::size_t>(k)];
    const Location where{source, static_cast<std::size_t>(k + 1)};
    try {
      series.centers.push_back(parse_date_or_throw(rec.at("center_date").get<std::string>(), where));
      series.values(k) = json_number(rec.at("value"));
      if (has_ci) {
        (*series.ci_lower)(k) = json_number(rec.at("ci_lower"));
        (*series.ci_upper)(k) = json_number(rec.at("ci_upper"));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::UnparseableValue, std::string("malformed series record: ") + e.what(), where);
    }
  }
  return series;
}

IndexSeries read_series_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line != "\r") header = split(line, ',');
  }
  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return c;
    }
    return std::nullopt;
  };
  const auto date_col = find("center_date");
  const auto value_col = find("value");
  if (!date_col || !value_col) {
    throw Error(ErrorCode::UnparseableValue, "series header needs center_date and value columns", {source, line_no});
  }
  const auto lo_col = find("ci_lower");
  const auto hi_col = find("ci_upper");

  std::vector<Date> centers;
  std::vector<double> values, lower, upper;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::MissingCell, "wrong field count", {source, line_no});
    }
    centers.push_back(parse_date_or_throw(fields[*date_col], {source, line_no, "center_date"}));
    values.push_back(parse_cell(fields[*value_col], {source, line_no, "value"}));
    if (lo_col && hi_col) {
      lower.push_back(parse_cell(fields[*lo_col], {source, line_no, "ci_lower"}));
      upper.push_back(parse_cell(fields[*hi_col], {source, line_no, "ci_upper"}));
    }
  }
  IndexSeries series;
  series.centers = std::move(centers);
  series.values = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
  if (lo_col && hi_col) {
    series.ci_lower = Eigen::Map<const Vector>(lower.data(), static_cast<Index>(lower.size()));
    series.ci_upper = Eigen::Map<const Vector>(upper.data(), static_cast<Index>(upper.size()));
  }
  return series;
}

std::string na_or(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

std::string date_or_na(const std::optional<Date>& d) { return d ? format_date(*d) : "NA"; }

}  // namespace

OutputFormat parse_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw Error(ErrorCode::InvalidConfig, "output format must be csv or json, got '" + std::string(text) + "'");
}

void write_series(std::ostream& out, const IndexSeries& series, OutputFormat format) {
  const bool with_ci = series.ci_lower.has_value() && series.ci_upper.has_value();
  if (format == OutputFormat::Json) {
    json doc = json::array();
    for (Index k = 0; k < series.size(); ++k) {
      json rec;
      rec["center_date"] = format_date(series.centers[static_cast<std::size_t>(k)]);
      rec["value"] = number_or_null(series.values(k));
      if (with_ci) {
        rec["ci_lower"] = number_or_null((*series.ci_lower)(k));
        rec["ci_upper"] = number_or_null((*series.ci_upper)(k));
      }
      doc.push_back(std::move(rec));
    }
    out << doc.dump(2) << '\n';
    return;
  }
  out << "center_date,value" << (with_ci ? ",ci_lower,ci_upper" : "") << '\n';
  for (Index k = 0; k < series.size(); ++k) {
    out << format_date(series.centers[static_cast<std::size_t>(k)]) << ',' << format_number(series.values(k));
    if (with_ci) out << ',' << format_number((*series.ci_lower)(k)) << ',' << format_number((*series.ci_upper)(k));
    out << '\n';
  }
}

IndexSeries read_series(std::istream& in, const std::string& source) {
  in >> std::ws;
  if (in.peek() == '[') return read_series_json(in, source);
  return read_series_csv(in, source);
}

IndexSeries load_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open series file", {path.string()});
  return read_series(in, path.string());
}

Period parse_period(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    if (text == "entire") return Period{"entire", std::nullopt, std::nullopt};
    throw Error(ErrorCode::InvalidConfig, "period '" + std::string(text) +
                                              "' needs dates: LABEL=YYYY-MM-DD:YYYY-MM-DD");
  }
  const std::string label(text.substr(0, eq));
  const std::string_view range = text.substr(eq + 1);
  const auto colon = range.find(':');
  if (label.empty() || colon == std::string_view::npos) {
    throw Error(ErrorCode::InvalidConfig, "malformed period '" + std::string(text) + "'");
  }
  const auto start = parse_date(range.substr(0, colon));
  const auto end = parse_date(range.substr(colon + 1));
  if (!start || !end) throw Error(ErrorCode::UnparseableDate, "malformed period dates in '" + std::string(text) + "'");
  if (*end < *start) throw Error(ErrorCode::InvalidConfig, "period '" + label + "' ends before it starts");
  return Period{label, start, end};
}

std::vector<Period> load_periods(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open periods file", {path.string()});
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("invalid periods JSON: ") + e.what(), {path.string()});
  }
  if (!doc.is_array()) throw Error(ErrorCode::InvalidConfig, "periods file must hold a JSON array", {path.string()});
  std::vector<Period> periods;
  for (const auto& rec : doc) {
    const std::string label = rec.value("label", "");
    if (!rec.contains("start") && !rec.contains("end")) {
      periods.push_back(parse_period(label));
    } else {
      periods.push_back(parse_period(label + "=" + rec.value("start", "") + ":" + rec.value("end", "")));
    }
  }
  return periods;
}

std::vector<PeriodSummary> summarize(const IndexSeries& series, const std::string& name,
                                     const std::vector<Period>& periods) {
  if (series.size() == 0) throw Error(ErrorCode::EmptySeries, "series '" + name + "' has no rows");
  std::vector<PeriodSummary> rows;
  for (const Period& period : periods) {
    std::vector<double> picked;
    for (Index k = 0; k < series.size(); ++k) {
      const Date& c = series.centers[static_cast<std::size_t>(k)];
      if (period.start && c < *period.start) continue;
      if (period.end && *period.end < c) continue;
      if (!std::isnan(series.values(k))) picked.push_back(series.values(k));
    }
    PeriodSummary row{name, period, static_cast<Index>(picked.size()), std::nullopt, std::nullopt};
    if (!picked.empty()) {
      const Eigen::Map<const Vector> v(picked.data(), static_cast<Index>(picked.size()));
      const double mean = v.mean();
      row.mean = mean;
      row.sd = picked.size() < 2 ? 0.0
                                 : std::sqrt((v.array() - mean).square().sum() / static_cast<double>(picked.size() - 1));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_summary(std::ostream& out, const std::vector<PeriodSummary>& rows, OutputFormat format) {
  if (format == OutputFormat::Json) {
    json doc = json::array();
    for (const auto& r : rows) {
      json rec;
      rec["series"] = r.series;
      rec["period"] = r.period.label;
      rec["start"] = r.period.start ? json(format_date(*r.period.start)) : json(nullptr);
      rec["end"] = r.period.end ? json(format_date(*r.period.end)) : json(nullptr);
      rec["n"] = r.count;
      rec["mean"] = r.mean ? json(*r.mean) : json(nullptr);
      rec["sd"] = r.sd ? json(*r.sd) : json(nullptr);
      doc.push_back(std::move(rec));
    }
    out << doc.dump(2) << '\n';
    return;
  }
  out << "series,period,start,end,n,mean,sd\n";
  for (const auto& r : rows) {
    out << r.series << ',' << r.period.label << ',' << date_or_na(r.period.start) << ',' << date_or_na(r.period.end)
        << ',' << r.count << ',' << na_or(r.mean) << ',' << na_or(r.sd) << '\n';
  }
}

}  // namespace herd::cli
