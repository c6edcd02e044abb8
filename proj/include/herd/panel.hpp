#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "herd/date.hpp"
#include "herd/types.hpp"
#include "herd/weights.hpp"

namespace herd {

/// Dated T x d matrix of strictly positive asset levels, one column per asset.
class PricePanel {
 public:
  PricePanel(std::vector<Date> dates, std::vector<std::string> labels, Matrix values);

  Index rows() const noexcept { return values_.rows(); }
  Index assets() const noexcept { return values_.cols(); }
  const std::vector<Date>& dates() const noexcept { return dates_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Matrix& values() const noexcept { return values_; }

  std::optional<Index> row_of(const Date& date) const;
  std::optional<Index> column_of(const std::string& label) const;

  /// Rows [begin, begin + count).
  PricePanel slice(Index begin, Index count) const;
  /// Columns in the given label order.
  PricePanel select(const std::vector<std::string>& labels) const;

 private:
  std::vector<Date> dates_;
  std::vector<std::string> labels_;
  Matrix values_;
};

struct PanelSchema {
  std::string date_column = "date";
  /// Asset columns to keep, in order. Empty keeps every non-date column.
  std::vector<std::string> assets;
  /// Drop asset columns containing empty cells instead of rejecting the file.
  bool drop_gappy_assets = false;
};

PricePanel read_panel(std::istream& in, const PanelSchema& schema = {}, const std::string& source = "<stream>");
PricePanel load_panel(const std::filesystem::path& path, const PanelSchema& schema = {});
void write_panel(std::ostream& out, const PricePanel& panel);

/// X(t) = Y(t) * C(t) elementwise, where fx column i is the dollar price of one
/// unit of asset i's currency. fx columns are matched by label.
PricePanel calibrate_dollar(const PricePanel& local, const PricePanel& fx);

/// Aggregate market values V (dollars) of each asset at one date, in the
/// asset order of the panel they refer to.
struct AggregateValues {
  Vector values;
  Date as_of;

  AggregateValues(Vector v, Date date);
};

/// Label,value pairs (header `asset,value`) reordered to the panel's labels.
/// Rows for assets absent from the panel are ignored; every panel asset needs a row.
AggregateValues load_aggregates(const std::filesystem::path& path, const PricePanel& panel, const Date& as_of);

/// w_i = V_i / X_i(as_of), held constant over the panel.
Weights weights_from_aggregates(const PricePanel& panel, const AggregateValues& agg);

}  // namespace herd
