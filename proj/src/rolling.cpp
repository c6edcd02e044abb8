#include "herd/rolling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "herd/error.hpp"

namespace herd {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool is_numerical(const Error& e) { return category(e.code()) == ErrorCategory::Numerical; }

void require_weights(const Weights& w, Index assets) {
  if (w.size() != assets) {
    throw Error(ErrorCode::DimensionMismatch, "weight vector has " + std::to_string(w.size()) +
                                                  " entries for " + std::to_string(assets) + " assets");
  }
}

Index require_windows(const WindowSpec& spec, Index rows) {
  spec.validate();
  const Index count = spec.window_count(rows);
  if (count == 0) {
    throw Error(ErrorCode::PanelTooShort, "panel has " + std::to_string(rows) + " rows, a window needs " +
                                              std::to_string(spec.prices_per_window()));
  }
  return count;
}

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

void WindowSpec::validate() const {
  if (epsilon < 2) throw Error(ErrorCode::InvalidParameter, "window half-width epsilon must be at least 2");
  if (step < 1) throw Error(ErrorCode::InvalidParameter, "window step must be at least 1");
}

Index WindowSpec::window_count(Index rows) const noexcept {
  const Index span = prices_per_window();
  if (rows < span || step < 1) return 0;
  return (rows - span) / step + 1;
}

ReturnPanel::ReturnPanel(std::vector<Date> dates, Matrix values, Matrix levels)
    : dates_(std::move(dates)), values_(std::move(values)), levels_(std::move(levels)) {
  if (static_cast<Index>(dates_.size()) != values_.rows() || levels_.rows() != values_.rows() ||
      levels_.cols() != values_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "return panel dates, values and levels disagree in shape");
  }
  if (!values_.allFinite()) throw Error(ErrorCode::InvalidParameter, "log-returns must be finite");
}

ReturnPanel ReturnPanel::slice(Index begin, Index count) const {
  if (begin < 0 || count < 0 || begin + count > rows()) {
    throw Error(ErrorCode::InvalidParameter, "return slice out of range");
  }
  return ReturnPanel(std::vector<Date>(dates_.begin() + begin, dates_.begin() + begin + count),
                     values_.middleRows(begin, count), levels_.middleRows(begin, count));
}

ReturnPanel log_returns(const PricePanel& panel) {
  const Index n = panel.rows() - 1;
  if (n < 1) throw Error(ErrorCode::InsufficientSamples, "log-returns need at least 2 price rows");
  const Matrix& x = panel.values();
  Matrix z = (x.bottomRows(n).array() / x.topRows(n).array()).log();
  return ReturnPanel(std::vector<Date>(panel.dates().begin(), panel.dates().end() - 1), std::move(z), x.topRows(n));
}

GbmParams estimate_params(const Matrix& returns, const Vector& start_level) {
  const Index n = returns.rows();
  const Index d = returns.cols();
  if (n < 3) throw Error(ErrorCode::InsufficientSamples, "parameter estimation needs at least 3 returns");
  if (start_level.size() != d) throw Error(ErrorCode::DimensionMismatch, "start level length differs from assets");
  for (Index i = 0; i < d; ++i) {
    if ((returns.col(i).array() == returns(0, i)).all()) {
      throw Error(ErrorCode::ZeroVariance, "constant return column " + std::to_string(i));
    }
  }
  const Vector mean = returns.colwise().mean().transpose();
  const Matrix cov = sample_cov(returns);
  const Vector sd = cov.diagonal().cwiseSqrt();
  if (!(sd.array() > 0.0).all()) throw Error(ErrorCode::ZeroVariance, "zero sample variance in window");

  Matrix corr(d, d);
  for (Index i = 0; i < d; ++i) {
    corr(i, i) = 1.0;
    for (Index j = 0; j < i; ++j) corr(i, j) = corr(j, i) = std::clamp(cov(i, j) / (sd(i) * sd(j)), -1.0, 1.0);
  }
  return GbmParams{mean, sd, std::move(corr), start_level};
}

GbmParams estimate_params(const ReturnPanel& window) {
  return estimate_params(window.values(), window.start_level());
}

double window_index(const Matrix& returns, const Vector& start_level, const Weights& w, IndexKind kind) {
  const GbmParams params = estimate_params(returns, start_level);
  const auto moments = lognormal_moments(params, static_cast<double>(returns.rows()));
  return evaluate(kind, w, moments).value;
}

Index IndexSeries::missing() const { return (values.array() != values.array()).count(); }

Index IndexSeries::ci_violations() const {
  if (!ci_lower || !ci_upper) return 0;
  Index count = 0;
  for (Index k = 0; k < values.size(); ++k) {
    const double v = values(k);
    if (std::isnan(v) || std::isnan((*ci_lower)(k))) continue;
    if (v < (*ci_lower)(k) || v > (*ci_upper)(k)) ++count;
  }
  return count;
}

IndexSeries windowed_index(const PricePanel& panel, const Weights& w, const WindowSpec& spec, IndexKind kind,
                           ComonoSource source) {
  require_weights(w, panel.assets());
  if (source == ComonoSource::Empirical) {
    return windowed_index_empirical(panel.values(), panel.dates(), w, spec, kind);
  }
  const Index count = require_windows(spec, panel.rows());
  const ReturnPanel returns = log_returns(panel);

  IndexSeries series;
  series.kind = kind;
  series.values.resize(count);
  for (Index k = 0; k < count; ++k) {
    const Index center = spec.epsilon + k * spec.step;
    series.centers.push_back(panel.dates()[static_cast<std::size_t>(center)]);
    const Index begin = center - spec.epsilon;
    try {
      series.values(k) = window_index(returns.values().middleRows(begin, 2 * spec.epsilon),
                                      returns.levels().row(begin).transpose(), w, kind);
    } catch (const Error& e) {
      if (!is_numerical(e)) throw;
      series.values(k) = kMissing;
    }
  }
  return series;
}

IndexSeries windowed_index_empirical(const Matrix& levels, const std::vector<Date>& dates, const Weights& w,
                                     const WindowSpec& spec, IndexKind kind) {
  require_weights(w, levels.cols());
  if (static_cast<Index>(dates.size()) != levels.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "date count differs from row count");
  }
  const Index count = require_windows(spec, levels.rows());

  IndexSeries series;
  series.kind = kind;
  series.values.resize(count);
  for (Index k = 0; k < count; ++k) {
    const Index center = spec.epsilon + k * spec.step;
    series.centers.push_back(dates[static_cast<std::size_t>(center)]);
    try {
      const auto moments = empirical_moments(levels.middleRows(center - spec.epsilon, spec.prices_per_window()));
      series.values(k) = evaluate(kind, w, moments).value;
    } catch (const Error& e) {
      if (!is_numerical(e)) throw;
      series.values(k) = kMissing;
    }
  }
  return series;
}

void BootstrapSpec::validate() const {
  if (replicates < 100) throw Error(ErrorCode::InvalidParameter, "bootstrap needs at least 100 replicates");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidParameter, "confidence level must lie in (0, 1)");
}

Interval bootstrap_ci(const ReturnPanel& window, const Weights& w, IndexKind kind, const BootstrapSpec& spec,
                      std::uint64_t window_id) {
  spec.validate();
  require_weights(w, window.assets());
  const Index n = window.rows();
  if (n < 3) throw Error(ErrorCode::InsufficientSamples, "bootstrap needs at least 3 returns");

  const Vector start = window.start_level();
  const Matrix& z = window.values();
  const Index max_draws = 10 * spec.replicates;
  Index draws = 0;

  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(spec.replicates));
  Matrix resample(n, window.assets());
  std::uniform_int_distribution<Index> pick(0, n - 1);
  for (Index b = 0; b < spec.replicates; ++b) {
    Engine engine = make_engine(spec.seed, {window_id, static_cast<std::uint64_t>(b)});
    for (;;) {
      if (++draws > max_draws) {
        throw Error(ErrorCode::DegenerateResample,
                    "more than " + std::to_string(max_draws) + " bootstrap draws without enough usable replicates");
      }
      for (Index k = 0; k < n; ++k) resample.row(k) = z.row(pick(engine));
      try {
        stats.push_back(window_index(resample, start, w, kind));
        break;
      } catch (const Error& e) {
        if (!is_numerical(e)) throw;
      }
    }
  }
  std::sort(stats.begin(), stats.end());
  const double tail = 0.5 * (1.0 - spec.level);
  return {quantile_sorted(stats, tail), quantile_sorted(stats, 1.0 - tail)};
}

IndexSeries windowed_index_with_ci(const PricePanel& panel, const Weights& w, const WindowSpec& spec, IndexKind kind,
                                   const BootstrapSpec& bootstrap) {
  bootstrap.validate();
  IndexSeries series = windowed_index(panel, w, spec, kind, ComonoSource::Lognormal);
  const ReturnPanel returns = log_returns(panel);
  Vector lower = Vector::Constant(series.size(), kMissing);
  Vector upper = Vector::Constant(series.size(), kMissing);
  for (Index k = 0; k < series.size(); ++k) {
    if (std::isnan(series.values(k))) continue;
    const Index begin = k * spec.step;
    try {
      const Interval ci = bootstrap_ci(returns.slice(begin, 2 * spec.epsilon), w, kind, bootstrap,
                                       static_cast<std::uint64_t>(k));
      lower(k) = ci.lower;
      upper(k) = ci.upper;
    } catch (const Error& e) {
      if (!is_numerical(e)) throw;
    }
  }
  series.ci_lower = std::move(lower);
  series.ci_upper = std::move(upper);
  return series;
}

}  // namespace herd
