#include "herd/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "herd/error.hpp"

namespace herd {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      field += c;
    } else if (c == ',' && !quoted) {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(trim(field));
  return fields;
}

std::optional<double> parse_double(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string date_list_error(const Date& a, const Date& b) {
  return "dates " + format_date(a) + " and " + format_date(b);
}

}  // namespace

PricePanel::PricePanel(std::vector<Date> dates, std::vector<std::string> labels, Matrix values)
    : dates_(std::move(dates)), labels_(std::move(labels)), values_(std::move(values)) {
  if (values_.cols() < 2) throw Error(ErrorCode::DimensionMismatch, "a price panel needs at least 2 assets");
  if (static_cast<Index>(labels_.size()) != values_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "label count differs from column count");
  }
  if (static_cast<Index>(dates_.size()) != values_.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "date count differs from row count");
  }
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size()) {
    throw Error(ErrorCode::LabelMismatch, "asset labels must be unique");
  }
  for (std::size_t t = 1; t < dates_.size(); ++t) {
    if (dates_[t] == dates_[t - 1]) {
      throw Error(ErrorCode::DuplicateDate, "duplicate date " + format_date(dates_[t]));
    }
    if (dates_[t] < dates_[t - 1]) {
      throw Error(ErrorCode::InvalidParameter, "dates not strictly increasing: " +
                                                  date_list_error(dates_[t - 1], dates_[t]));
    }
  }
  for (Index t = 0; t < values_.rows(); ++t) {
    for (Index i = 0; i < values_.cols(); ++i) {
      const double v = values_(t, i);
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::NonPositivePrice,
                    "non-positive price " + std::to_string(v) + " on " + format_date(dates_[t]),
                    {"", std::nullopt, labels_[static_cast<std::size_t>(i)]});
      }
    }
  }
}

std::optional<Index> PricePanel::row_of(const Date& date) const {
  const auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
  if (it == dates_.end() || *it != date) return std::nullopt;
  return static_cast<Index>(it - dates_.begin());
}

std::optional<Index> PricePanel::column_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<Index>(it - labels_.begin());
}

PricePanel PricePanel::slice(Index begin, Index count) const {
  if (begin < 0 || count < 0 || begin + count > rows()) {
    throw Error(ErrorCode::InvalidParameter, "row slice out of range");
  }
  std::vector<Date> dates(dates_.begin() + begin, dates_.begin() + begin + count);
  return PricePanel(std::move(dates), labels_, values_.middleRows(begin, count));
}

PricePanel PricePanel::select(const std::vector<std::string>& labels) const {
  Matrix values(rows(), static_cast<Index>(labels.size()));
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const auto col = column_of(labels[k]);
    if (!col) throw Error(ErrorCode::LabelMismatch, "asset '" + labels[k] + "' not in panel");
    values.col(static_cast<Index>(k)) = values_.col(*col);
  }
  return PricePanel(dates_, labels, std::move(values));
}

PricePanel read_panel(std::istream& in, const PanelSchema& schema, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && static_cast<unsigned char>(line[0]) == 0xEF && line.rfind("\xEF\xBB\xBF", 0) == 0) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::Io, "empty panel file", {source});

  const auto date_it = std::find(header.begin(), header.end(), schema.date_column);
  if (date_it == header.end()) {
    throw Error(ErrorCode::InvalidConfig, "missing date column '" + schema.date_column + "'",
                {source, line_no, schema.date_column});
  }
  const std::size_t date_col = static_cast<std::size_t>(date_it - header.begin());

  std::vector<std::string> labels = schema.assets;
  if (labels.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != date_col) labels.push_back(header[c]);
    }
  }
  std::vector<std::size_t> field_of(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const auto it = std::find(header.begin(), header.end(), labels[k]);
    if (it == header.end()) {
      throw Error(ErrorCode::LabelMismatch, "asset column '" + labels[k] + "' not in header", {source, line_no});
    }
    field_of[k] = static_cast<std::size_t>(it - header.begin());
  }

  struct Row {
    Date date;
    std::size_t line;
    std::vector<std::optional<double>> cells;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::MissingCell,
                  "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()),
                  {source, line_no});
    }
    const auto date = parse_date(fields[date_col]);
    if (!date) {
      throw Error(ErrorCode::UnparseableDate, "cannot parse date '" + fields[date_col] + "'",
                  {source, line_no, schema.date_column});
    }
    Row row{*date, line_no, {}};
    row.cells.reserve(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
      const std::string& text = fields[field_of[k]];
      if (text.empty()) {
        row.cells.emplace_back(std::nullopt);
        continue;
      }
      const auto value = parse_double(text);
      if (!value) {
        throw Error(ErrorCode::UnparseableValue, "cannot parse value '" + text + "'", {source, line_no, labels[k]});
      }
      if (!(*value > 0.0)) {
        throw Error(ErrorCode::NonPositivePrice, "non-positive price " + text, {source, line_no, labels[k]});
      }
      row.cells.emplace_back(*value);
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const auto gap = std::find_if(rows.begin(), rows.end(), [&](const Row& r) { return !r.cells[k]; });
    if (gap == rows.end()) {
      keep.push_back(k);
    } else if (!schema.drop_gappy_assets) {
      throw Error(ErrorCode::MissingCell, "missing value", {source, gap->line, labels[k]});
    }
  }

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t t = 1; t < rows.size(); ++t) {
    if (rows[t].date == rows[t - 1].date) {
      throw Error(ErrorCode::DuplicateDate, "duplicate date " + format_date(rows[t].date),
                  {source, std::max(rows[t].line, rows[t - 1].line), schema.date_column});
    }
  }

  if (keep.size() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "fewer than 2 complete asset columns", {source});
  }
  std::vector<Date> dates;
  std::vector<std::string> kept_labels;
  Matrix values(static_cast<Index>(rows.size()), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) kept_labels.push_back(labels[keep[c]]);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    dates.push_back(rows[t].date);
    for (std::size_t c = 0; c < keep.size(); ++c) {
      values(static_cast<Index>(t), static_cast<Index>(c)) = *rows[t].cells[keep[c]];
    }
  }
  try {
    return PricePanel(std::move(dates), std::move(kept_labels), std::move(values));
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), {source});
  }
}

PricePanel load_panel(const std::filesystem::path& path, const PanelSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open panel file", {path.string()});
  return read_panel(in, schema, path.string());
}

void write_panel(std::ostream& out, const PricePanel& panel) {
  out << "date";
  for (const auto& label : panel.labels()) out << ',' << label;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (Index t = 0; t < panel.rows(); ++t) {
    out << format_date(panel.dates()[static_cast<std::size_t>(t)]);
    for (Index i = 0; i < panel.assets(); ++i) out << ',' << panel.values()(t, i);
    out << '\n';
  }
  out.precision(old_precision);
}

PricePanel calibrate_dollar(const PricePanel& local, const PricePanel& fx) {
  if (local.dates() != fx.dates()) {
    throw Error(ErrorCode::DateMismatch, "local and currency panels have different date grids");
  }
  const std::set<std::string> a(local.labels().begin(), local.labels().end());
  const std::set<std::string> b(fx.labels().begin(), fx.labels().end());
  if (a != b) throw Error(ErrorCode::LabelMismatch, "local and currency panels have different asset labels");
  const PricePanel rates = fx.select(local.labels());
  return PricePanel(local.dates(), local.labels(), local.values().cwiseProduct(rates.values()));
}

AggregateValues::AggregateValues(Vector v, Date date) : values(std::move(v)), as_of(date) {
  for (Index i = 0; i < values.size(); ++i) {
    if (!(values(i) > 0.0) || !std::isfinite(values(i))) {
      throw Error(ErrorCode::InvalidParameter, "aggregate value " + std::to_string(i) + " is not strictly positive");
    }
  }
}

AggregateValues load_aggregates(const std::filesystem::path& path, const PricePanel& panel, const Date& as_of) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open aggregates file", {path.string()});
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<std::optional<double>> values(panel.labels().size());
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != 2 || fields[0] != "asset" || fields[1] != "value") {
        throw Error(ErrorCode::InvalidConfig, "aggregates header must be 'asset,value'", {path.string(), line_no});
      }
      continue;
    }
    if (fields.size() != 2) throw Error(ErrorCode::MissingCell, "expected 2 fields", {path.string(), line_no});
    const auto col = panel.column_of(fields[0]);
    if (!col) continue;
    const auto value = parse_double(fields[1]);
    if (!value) {
      throw Error(ErrorCode::UnparseableValue, "cannot parse value '" + fields[1] + "'", {path.string(), line_no, "value"});
    }
    values[static_cast<std::size_t>(*col)] = *value;
  }
  Vector v(panel.assets());
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!values[k]) {
      throw Error(ErrorCode::MissingCell, "no aggregate value for asset", {path.string(), std::nullopt, panel.labels()[k]});
    }
    v(static_cast<Index>(k)) = *values[k];
  }
  return AggregateValues(std::move(v), as_of);
}

Weights weights_from_aggregates(const PricePanel& panel, const AggregateValues& agg) {
  if (agg.values.size() != panel.assets()) {
    throw Error(ErrorCode::DimensionMismatch, "aggregate values and panel differ in asset count");
  }
  const auto row = panel.row_of(agg.as_of);
  if (!row) throw Error(ErrorCode::DateNotInPanel, "reference date " + format_date(agg.as_of) + " not in panel");
  return Weights(agg.values.cwiseQuotient(panel.values().row(*row).transpose()));
}

}  // namespace herd
