#pragma once

// Rolling-window herd indices. Around each centre t0 the window
// [t0 - eps, t0 + eps] holds 2 eps + 1 prices and 2 eps log-returns; the
// returns are treated as i.i.d., a local GBM is fitted to them, and the index
// is evaluated on the closed-form moments at horizon tau = 2 eps.

#include <cstdint>
#include <optional>
#include <vector>

#include "herd/core.hpp"
#include "herd/date.hpp"
#include "herd/gbm.hpp"
#include "herd/panel.hpp"
#include "herd/types.hpp"

namespace herd {

struct WindowSpec {
  Index epsilon = 25;  // half-width, in observation steps
  Index step = 1;      // stride between window centres

  void validate() const;
  Index prices_per_window() const noexcept { return 2 * epsilon + 1; }
  /// floor((rows - (2 eps + 1)) / step) + 1, or 0 when the panel is too short.
  Index window_count(Index rows) const noexcept;
};

/// Log-returns Z_i(t) = log(X_i(t+1) / X_i(t)), dated at the left endpoint.
/// `levels` keeps X(t) at each left endpoint so windows know their start level.
class ReturnPanel {
 public:
  ReturnPanel(std::vector<Date> dates, Matrix values, Matrix levels);

  Index rows() const noexcept { return values_.rows(); }
  Index assets() const noexcept { return values_.cols(); }
  const std::vector<Date>& dates() const noexcept { return dates_; }
  const Matrix& values() const noexcept { return values_; }
  const Matrix& levels() const noexcept { return levels_; }
  Vector start_level() const { return levels_.row(0).transpose(); }

  ReturnPanel slice(Index begin, Index count) const;

 private:
  std::vector<Date> dates_;
  Matrix values_;
  Matrix levels_;
};

ReturnPanel log_returns(const PricePanel& panel);

/// Per-step estimates from a window of n >= 3 returns: r = mean log-return,
/// sigma^2 = sample variance (divisor n - 1), rho = sample correlation,
/// x0 = `start_level`. Throws ZeroVariance on a constant column.
GbmParams estimate_params(const Matrix& returns, const Vector& start_level);
GbmParams estimate_params(const ReturnPanel& window);

/// Plug-in index of one window: fitted params, horizon tau = number of returns.
double window_index(const Matrix& returns, const Vector& start_level, const Weights& w, IndexKind kind);

/// Where the comonotonic covariance comes from.
enum class ComonoSource {
  Lognormal,  // closed form of the fitted local GBM
  Empirical,  // sort-coupled sample covariance of the window's levels
};

struct IndexSeries {
  IndexKind kind = IndexKind::Rhix;
  std::vector<Date> centers;
  Vector values;  // quiet NaN marks a flagged (degenerate) window
  std::optional<Vector> ci_lower;
  std::optional<Vector> ci_upper;

  Index size() const noexcept { return values.size(); }
  Index missing() const;
  /// Windows whose point estimate falls outside its own interval.
  Index ci_violations() const;
};

IndexSeries windowed_index(const PricePanel& panel, const Weights& w, const WindowSpec& spec, IndexKind kind,
                           ComonoSource source = ComonoSource::Lognormal);

/// Model-free variant on arbitrary real-valued levels (no positivity needed):
/// each window's 2 eps + 1 rows are samples of X, moments via empirical_moments.
IndexSeries windowed_index_empirical(const Matrix& levels, const std::vector<Date>& dates, const Weights& w,
                                     const WindowSpec& spec, IndexKind kind);

struct BootstrapSpec {
  Index replicates = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Interval {
  double lower;
  double upper;
};

/// Percentile bootstrap over resampled return rows. Replicate k of window
/// `window_id` draws from stream (seed, window_id, k); a replicate with a
/// constant column is redrawn, with at most 10 B draws in total.
Interval bootstrap_ci(const ReturnPanel& window, const Weights& w, IndexKind kind, const BootstrapSpec& spec,
                      std::uint64_t window_id = 0);

/// windowed_index (lognormal source) plus a bootstrap interval per window.
IndexSeries windowed_index_with_ci(const PricePanel& panel, const Weights& w, const WindowSpec& spec, IndexKind kind,
                                   const BootstrapSpec& bootstrap);

}  // namespace herd
