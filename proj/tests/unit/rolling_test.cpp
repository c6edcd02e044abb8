#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "herd/rolling.hpp"
#include "oracles.hpp"

using namespace herd;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no herd::Error thrown";
  return ErrorCode::Io;
}

PricePanel panel_of(const Matrix& values) {
  std::vector<Date> dates;
  const Date start{std::chrono::year{2000}, std::chrono::January, std::chrono::day{7}};
  for (Index t = 0; t < values.rows(); ++t) dates.push_back(add_days(start, 7 * t));
  std::vector<std::string> labels;
  for (Index i = 0; i < values.cols(); ++i) labels.push_back("a" + std::to_string(i));
  return PricePanel(dates, labels, values);
}

Matrix corr2(double rho) { return (Matrix(2, 2) << 1, rho, rho, 1).finished(); }

double nan_mean(const Vector& v) {
  double s = 0;
  Index n = 0;
  for (Index k = 0; k < v.size(); ++k) {
    if (!std::isnan(v(k))) {
      s += v(k);
      ++n;
    }
  }
  return s / static_cast<double>(n);
}

}  // namespace

TEST(LogReturns, ExponentialPrices) {
  Matrix x(3, 2);
  x << 1, 5, std::numbers::e, 5, std::numbers::e * std::numbers::e, 5;
  const auto z = log_returns(panel_of(x));
  ASSERT_EQ(z.rows(), 2);
  EXPECT_NEAR(z.values()(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(z.values()(1, 0), 1.0, 1e-15);
  EXPECT_EQ(z.values().col(1), Vector::Zero(2));
  EXPECT_EQ(z.dates()[0], panel_of(x).dates()[0]);
}

TEST(LogReturns, TwoRowPanelGivesOneReturn) {
  Matrix x(2, 2);
  x << 1, 2, 3, 4;
  const auto z = log_returns(panel_of(x));
  EXPECT_EQ(z.rows(), 1);
  EXPECT_DOUBLE_EQ(z.values()(0, 1), std::log(2.0));
  EXPECT_EQ(z.start_level(), (Vector(2) << 1, 2).finished());
}

TEST(EstimateParams, ConstantColumnIsZeroVariance) {
  Matrix z(5, 2);
  z << 0.01, 0.1, 0.01, -0.2, 0.01, 0.3, 0.01, 0.0, 0.01, 0.05;
  EXPECT_EQ(code_of([&] { estimate_params(z, Vector::Ones(2)); }), ErrorCode::ZeroVariance);
}

TEST(EstimateParams, TooFewRows) {
  EXPECT_EQ(code_of([] { estimate_params(Matrix::Random(2, 2), Vector::Ones(2)); }),
            ErrorCode::InsufficientSamples);
}

TEST(EstimateParams, LinearlyDependentColumns) {
  Matrix z(6, 3);
  z.col(0) << 0.1, -0.2, 0.05, 0.3, -0.1, 0.0;
  z.col(1) = 2.0 * z.col(0).array() + 0.01;
  z.col(2) = -0.5 * z.col(0);
  const auto p = estimate_params(z, Vector::Ones(3));
  EXPECT_NEAR(p.corr(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(p.corr(0, 2), -1.0, 1e-12);
  EXPECT_LE(std::abs(p.corr(0, 1)), 1.0);
}

TEST(EstimateParams, HandComputedWindow) {
  Matrix z(4, 2);
  z << 0.01, 0.02, -0.01, 0.00, 0.03, 0.01, 0.01, -0.01;
  const auto p = estimate_params(z, (Vector(2) << 10, 20).finished());
  EXPECT_NEAR(p.drifts(0), 0.01, 1e-15);
  EXPECT_NEAR(p.drifts(1), 0.005, 1e-15);
  EXPECT_NEAR(p.vols(0), std::sqrt(0.0008 / 3.0), 1e-15);
  EXPECT_NEAR(p.vols(1), std::sqrt(0.0005 / 3.0), 1e-15);
  EXPECT_NEAR(p.corr(0, 1), 0.0002 / std::sqrt(0.0008 * 0.0005), 1e-12);
  EXPECT_EQ(p.x0, (Vector(2) << 10, 20).finished());
}

TEST(EstimateParams, RecoversSimulationTruth) {
  const GbmParams truth{(Vector(3) << 0.002, -0.001, 0.0).finished(), (Vector(3) << 0.02, 0.03, 0.015).finished(),
                        (Matrix(3, 3) << 1, 0.5, 0.2, 0.5, 1, -0.3, 0.2, -0.3, 1).finished(), Vector::Ones(3)};
  const Index n = 10000;
  const auto z = log_returns(simulate(truth, n, 1.0, 41));
  const auto est = estimate_params(z);
  for (Index i = 0; i < 3; ++i) {
    const double s = truth.vols(i);
    EXPECT_LT(std::abs(est.drifts(i) - (truth.drifts(i) - 0.5 * s * s)), 3.0 * s / std::sqrt(double(n)));
    EXPECT_LT(std::abs(est.vols(i) - s), 3.0 * s / std::sqrt(2.0 * n));
    for (Index j = 0; j < i; ++j) {
      const double r = truth.corr(i, j);
      EXPECT_LT(std::abs(est.corr(i, j) - r), 3.0 * (1 - r * r) / std::sqrt(double(n)));
    }
  }
}

TEST(WindowSpec, CountFormula) {
  for (Index eps : {2, 5, 25}) {
    for (Index step : {1, 2, 7}) {
      const WindowSpec spec{eps, step};
      for (Index rows : {Index(2 * eps), Index(2 * eps + 1), Index(2 * eps + 2), Index(300)}) {
        const Index expected = rows < 2 * eps + 1 ? 0 : (rows - (2 * eps + 1)) / step + 1;
        EXPECT_EQ(spec.window_count(rows), expected);
      }
    }
  }
  EXPECT_EQ(code_of([] { WindowSpec{1, 1}.validate(); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([] { WindowSpec{3, 0}.validate(); }), ErrorCode::InvalidParameter);
}

TEST(WindowedIndex, CentersAndCoverage) {
  const auto panel = simulate(GbmParams::standard(Vector::Constant(2, 0.02), corr2(0.5)), 120, 1.0, 1);
  for (Index step : {1, 3, 10}) {
    const WindowSpec spec{10, step};
    const auto s = windowed_index(panel, Weights::equal(2), spec, IndexKind::Rhix);
    EXPECT_EQ(s.size(), (panel.rows() - 21) / step + 1);
    EXPECT_EQ(s.centers.front(), panel.dates()[10]);
    EXPECT_EQ(s.centers[1], panel.dates()[static_cast<std::size_t>(10 + step)]);
    EXPECT_FALSE(s.ci_lower.has_value());
  }
}

TEST(WindowedIndex, PanelTooShort) {
  const auto panel = simulate(GbmParams::standard(Vector::Constant(2, 0.02), corr2(0.5)), 49, 1.0, 1);
  EXPECT_EQ(code_of([&] { windowed_index(panel, Weights::equal(2), WindowSpec{}, IndexKind::Rhix); }),
            ErrorCode::PanelTooShort);
  EXPECT_EQ(code_of([&] { windowed_index(panel, Weights::equal(3), WindowSpec{5, 1}, IndexKind::Rhix); }),
            ErrorCode::DimensionMismatch);
}

TEST(WindowedIndex, ConstantStretchIsFlaggedNotFatal) {
  Matrix x = simulate(GbmParams::standard(Vector::Constant(2, 0.02), corr2(0.5)), 60, 1.0, 8).values();
  for (Index t = 0; t <= 20; ++t) x(t, 1) = 3.0;
  const auto s = windowed_index(panel_of(x), Weights::equal(2), WindowSpec{5, 1}, IndexKind::Rhix);
  EXPECT_TRUE(std::isnan(s.values(0)));
  EXPECT_GT(s.missing(), 0);
  EXPECT_FALSE(std::isnan(s.values(s.size() - 1)));
}

TEST(WindowedIndex, ComonotonicPanelNearOne) {
  const GbmParams p = GbmParams::standard((Vector(3) << 0.02, 0.025, 0.03).finished(), Matrix::Identity(3, 3));
  const auto panel = simulate_comonotonic(p, 2000, 1.0, 4);
  const auto s = windowed_index(panel, Weights::equal(3), WindowSpec{}, IndexKind::Rhix);
  EXPECT_GE(nan_mean(s.values), 0.9);
  EXPECT_GT(s.values.minCoeff(), 0.99);
}

TEST(WindowedIndex, IndependentPanelCentredOnZero) {
  const GbmParams p = GbmParams::standard(Vector::Constant(3, 0.02), Matrix::Identity(3, 3));
  const auto panel = simulate(p, 200 * 51, 1.0, 6);
  const auto s = windowed_index(panel, Weights::equal(3), WindowSpec{25, 51}, IndexKind::Rhix);
  EXPECT_EQ(s.size(), 200);
  EXPECT_LT(std::abs(nan_mean(s.values)), 0.05);
}

TEST(WindowedIndex, HighCorrelationCentredOnAnalyticValue) {
  const GbmParams p = GbmParams::standard(Vector::Constant(2, 0.2), corr2(0.95));
  const auto panel = simulate(p, 200 * 51, 1.0 / 50.0, 7);
  const auto s = windowed_index(panel, Weights::equal(2), WindowSpec{25, 51}, IndexKind::Rhix);
  // 50 steps of 1/50 per window: the fitted horizon covers one unit of model time.
  EXPECT_NEAR(nan_mean(s.values), two_asset_rhix(0.95, 0.2, 0.2, 1.0), 0.02);
}

TEST(WindowedIndex, PlugInIdentity) {
  const GbmParams p{(Vector(2) << 0.001, 0.002).finished(), (Vector(2) << 0.02, 0.04).finished(), corr2(0.4),
                    (Vector(2) << 1, 2).finished()};
  const auto panel = simulate(p, 400, 1.0, 9);
  const WindowSpec spec{25, 7};
  const auto s = windowed_index(panel, Weights((Vector(2) << 1, 3).finished()), spec, IndexKind::Rhix);
  const auto z = log_returns(panel);
  for (Index k = 0; k < s.size(); ++k) {
    const auto est = estimate_params(z.slice(k * spec.step, 2 * spec.epsilon));
    const double tau = 2.0 * static_cast<double>(spec.epsilon);
    const double expected = gbm_corr(est.vols(0), est.vols(1), est.corr(0, 1), tau) /
                            comono_corr(est.vols(0), est.vols(1), tau);
    EXPECT_NEAR(s.values(k), expected, 1e-12);
    EXPECT_NEAR(s.values(k), two_asset_rhix(est.corr(0, 1), est.vols(0), est.vols(1), tau), 1e-12);
  }
}

TEST(WindowedIndex, PlugInMatchesOracleMomentsForManyAssets) {
  oracle::Rng rng(10);
  const Matrix corr = oracle::random_corr(rng, 4);
  const GbmParams p{Vector::Constant(4, 0.001), (Vector(4) << 0.02, 0.03, 0.01, 0.025).finished(), corr,
                    (Vector(4) << 1, 2, 3, 4).finished()};
  const auto panel = simulate(p, 300, 1.0, 10);
  const Vector wv = (Vector(4) << 1, 0.5, 2, 0).finished();
  const WindowSpec spec{20, 13};
  const auto z = log_returns(panel);
  for (IndexKind kind : {IndexKind::Cix, IndexKind::Hix, IndexKind::Rhix}) {
    const auto s = windowed_index(panel, Weights(wv), spec, kind);
    for (Index k = 0; k < s.size(); ++k) {
      const auto est = estimate_params(z.slice(k * spec.step, 2 * spec.epsilon));
      const auto c = oracle::lognormal_case(wv, est.x0, est.drifts, est.vols, est.corr, 40.0);
      const auto ref = oracle::naive_indices(wv, c.cov, c.comono);
      const double expected = kind == IndexKind::Cix ? ref.cix : kind == IndexKind::Hix ? ref.hix : ref.rhix;
      EXPECT_NEAR(s.values(k), expected, 1e-12) << to_string(kind);
    }
  }
}

TEST(WindowedIndex, WeightScaleDualityEndToEnd) {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = rng.integer(2, 5);
    GbmParams p = GbmParams::standard(Vector::Constant(d, 0.02), oracle::random_corr(rng, d));
    p.corr = 0.7 * p.corr + 0.3 * Matrix::Identity(d, d);
    const auto panel = simulate(p, 120, 1.0, static_cast<std::uint64_t>(trial));
    Vector a(d);
    for (Index i = 0; i < d; ++i) a(i) = std::exp(rng.uniform(-4.0, 4.0));
    const Vector w = oracle::random_weights(rng, d);
    const PricePanel scaled = panel_of(panel.values() * a.asDiagonal());
    for (IndexKind kind : {IndexKind::Cix, IndexKind::Hix, IndexKind::Rhix}) {
      for (ComonoSource src : {ComonoSource::Lognormal, ComonoSource::Empirical}) {
        const auto base = windowed_index(panel, Weights(w), WindowSpec{10, 9}, kind, src);
        const auto out = windowed_index(scaled, Weights(w.cwiseQuotient(a)), WindowSpec{10, 9}, kind, src);
        for (Index k = 0; k < base.size(); ++k) EXPECT_NEAR(base.values(k), out.values(k), 1e-10);
      }
    }
  }
}

TEST(WindowedIndexEmpirical, AffineInvariance) {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = rng.integer(2, 4);
    const Matrix x = simulate(GbmParams::standard(Vector::Constant(d, 0.03), Matrix::Identity(d, d)), 80, 1.0,
                              static_cast<std::uint64_t>(trial))
                         .values();
    const double alpha = (trial % 2 ? -1.0 : 1.0) * rng.uniform(0.2, 5.0);
    Vector b(d);
    for (Index i = 0; i < d; ++i) b(i) = rng.uniform(-3.0, 3.0);
    const Matrix y = (alpha * x).rowwise() + b.transpose();
    const auto dates = panel_of(x).dates();
    const Weights w(oracle::random_weights(rng, d));
    for (IndexKind kind : {IndexKind::Cix, IndexKind::Hix, IndexKind::Rhix}) {
      const auto s0 = windowed_index_empirical(x, dates, w, WindowSpec{10, 5}, kind);
      const auto s1 = windowed_index_empirical(y, dates, w, WindowSpec{10, 5}, kind);
      for (Index k = 0; k < s0.size(); ++k) EXPECT_NEAR(s0.values(k), s1.values(k), 1e-10);
    }
  }
}

TEST(Bootstrap, DeterministicGivenSeed) {
  const auto panel = simulate(GbmParams::standard(Vector::Constant(3, 0.02), Matrix::Identity(3, 3)), 50, 1.0, 13);
  const auto z = log_returns(panel);
  const BootstrapSpec spec{200, 0.95, 99};
  const auto a = bootstrap_ci(z, Weights::equal(3), IndexKind::Rhix, spec, 4);
  const auto b = bootstrap_ci(z, Weights::equal(3), IndexKind::Rhix, spec, 4);
  EXPECT_EQ(a.lower, b.lower);
  EXPECT_EQ(a.upper, b.upper);
  EXPECT_LT(a.lower, a.upper);
  const auto c = bootstrap_ci(z, Weights::equal(3), IndexKind::Rhix, BootstrapSpec{200, 0.95, 100}, 4);
  EXPECT_NE(a.lower, c.lower);
}

TEST(Bootstrap, Validation) {
  const auto panel = simulate(GbmParams::standard(Vector::Constant(2, 0.02), corr2(0.2)), 20, 1.0, 1);
  const auto z = log_returns(panel);
  EXPECT_EQ(code_of([&] { bootstrap_ci(z, Weights::equal(2), IndexKind::Rhix, BootstrapSpec{99, 0.95, 0}); }),
            ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([&] { bootstrap_ci(z, Weights::equal(2), IndexKind::Rhix, BootstrapSpec{100, 1.0, 0}); }),
            ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([&] { bootstrap_ci(z.slice(0, 2), Weights::equal(2), IndexKind::Rhix, BootstrapSpec{}); }),
            ErrorCode::InsufficientSamples);
  EXPECT_EQ(BootstrapSpec{}.replicates, 1000);
  EXPECT_EQ(BootstrapSpec{}.level, 0.95);
}

TEST(Bootstrap, DegenerateResampleGivesUp) {
  // A constant column makes every resample degenerate.
  Matrix z = Matrix::Zero(40, 2);
  z.col(0).setLinSpaced(-0.1, 0.1);
  const ReturnPanel window(std::vector<Date>(40, Date{}), z, Matrix::Ones(40, 2));
  EXPECT_EQ(code_of([&] { bootstrap_ci(window, Weights::equal(2), IndexKind::Rhix, BootstrapSpec{100, 0.9, 1}); }),
            ErrorCode::DegenerateResample);
}

TEST(Bootstrap, IndependentWindowsContainZero) {
  const GbmParams p = GbmParams::standard(Vector::Constant(3, 0.02), Matrix::Identity(3, 3));
  int covered = 0;
  const int windows = 40;
  for (int k = 0; k < windows; ++k) {
    const auto z = log_returns(simulate(p, 50, 1.0, 1000 + static_cast<std::uint64_t>(k)));
    const auto ci = bootstrap_ci(z, Weights::equal(3), IndexKind::Rhix, BootstrapSpec{300, 0.95, 5});
    if (ci.lower <= 0.0 && 0.0 <= ci.upper) ++covered;
  }
  EXPECT_GE(covered, static_cast<int>(0.9 * windows));
}

TEST(Bootstrap, ComonotonicWindowsStayHigh) {
  const GbmParams p = GbmParams::standard((Vector(3) << 0.02, 0.03, 0.025).finished(), Matrix::Ones(3, 3));
  int high = 0;
  const int windows = 40;
  for (int k = 0; k < windows; ++k) {
    const auto z = log_returns(simulate(p, 50, 1.0, 2000 + static_cast<std::uint64_t>(k)));
    const auto ci = bootstrap_ci(z, Weights::equal(3), IndexKind::Rhix, BootstrapSpec{300, 0.95, 6});
    if (ci.lower > 0.5) ++high;
  }
  EXPECT_GE(high, static_cast<int>(0.95 * windows));
}

TEST(Bootstrap, SeriesIntervalsBracketEstimates) {
  const auto panel = simulate(GbmParams::standard(Vector::Constant(2, 0.02), corr2(0.6)), 200, 1.0, 14);
  const auto s = windowed_index_with_ci(panel, Weights::equal(2), WindowSpec{25, 10}, IndexKind::Rhix,
                                        BootstrapSpec{200, 0.95, 3});
  ASSERT_TRUE(s.ci_lower && s.ci_upper);
  EXPECT_EQ(s.ci_lower->size(), s.size());
  EXPECT_LE(s.ci_violations(), s.size() / 100 + 1);
  const auto again = windowed_index_with_ci(panel, Weights::equal(2), WindowSpec{25, 10}, IndexKind::Rhix,
                                            BootstrapSpec{200, 0.95, 3});
  EXPECT_EQ(*again.ci_lower, *s.ci_lower);
}
