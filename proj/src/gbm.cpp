#include "herd/gbm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "herd/error.hpp"

namespace herd {

namespace {

constexpr double kCorrTolerance = 1e-10;
constexpr double kPivotClip = 1e-12;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::InvalidParameter, message);
}

void check_vol_tau(double sigma_i, double sigma_j, double tau) {
  require(sigma_i > 0.0 && sigma_j > 0.0 && std::isfinite(sigma_i) && std::isfinite(sigma_j),
          "volatilities must be positive");
  require(tau > 0.0 && std::isfinite(tau), "horizon tau must be positive");
}

PanelLayout with_default_labels(PanelLayout layout, Index d) {
  if (layout.labels.empty()) {
    for (Index i = 0; i < d; ++i) layout.labels.push_back("asset" + std::to_string(i + 1));
  }
  return layout;
}

PricePanel to_panel(Matrix levels, const PanelLayout& layout) {
  std::vector<Date> dates;
  dates.reserve(static_cast<std::size_t>(levels.rows()));
  for (Index t = 0; t < levels.rows(); ++t) dates.push_back(add_days(layout.start, layout.days_per_step * t));
  return PricePanel(std::move(dates), layout.labels, std::move(levels));
}

}  // namespace

void GbmParams::validate() const {
  const Index d = vols.size();
  require(d >= 1, "at least one asset required");
  require(drifts.size() == d && x0.size() == d, "drifts, vols and x0 must have equal length");
  require(corr.rows() == d && corr.cols() == d, "corr must be d x d");
  require(drifts.allFinite() && vols.allFinite() && x0.allFinite() && corr.allFinite(), "parameters must be finite");
  require((vols.array() > 0.0).all(), "volatilities must be positive");
  require((x0.array() > 0.0).all(), "initial levels must be positive");
  for (Index i = 0; i < d; ++i) {
    require(std::abs(corr(i, i) - 1.0) <= kCorrTolerance, "corr must have a unit diagonal");
    for (Index j = 0; j < i; ++j) {
      require(std::abs(corr(i, j) - corr(j, i)) <= kCorrTolerance, "corr must be symmetric");
      require(std::abs(corr(i, j)) <= 1.0 + kCorrTolerance, "corr entries must lie in [-1, 1]");
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(corr, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -kCorrTolerance) {
    throw Error(ErrorCode::NonPsdCorrelation, "correlation matrix is not positive semidefinite");
  }
}

GbmParams GbmParams::standard(const Vector& vols, const Matrix& corr) {
  return GbmParams{Vector::Zero(vols.size()), vols, corr, Vector::Ones(vols.size())};
}

double lognormal_mean(double x0, double r, double tau) {
  require(x0 > 0.0, "x0 must be positive");
  require(tau >= 0.0, "tau must be nonnegative");
  return x0 * std::exp(r * tau);
}

double lognormal_sd(double x0, double r, double sigma, double tau) {
  require(x0 > 0.0 && std::isfinite(x0), "x0 must be positive");
  check_vol_tau(sigma, sigma, tau);
  return x0 * std::exp(r * tau) * std::sqrt(std::expm1(sigma * sigma * tau));
}

double gbm_corr(double sigma_i, double sigma_j, double rho, double tau) {
  check_vol_tau(sigma_i, sigma_j, tau);
  require(rho >= -1.0 && rho <= 1.0, "rho must lie in [-1, 1]");
  return std::expm1(rho * sigma_i * sigma_j * tau) /
         std::sqrt(std::expm1(sigma_i * sigma_i * tau) * std::expm1(sigma_j * sigma_j * tau));
}

double comono_corr(double sigma_i, double sigma_j, double tau) { return gbm_corr(sigma_i, sigma_j, 1.0, tau); }

double two_asset_rhix(double rho, double sigma1, double sigma2, double tau) {
  check_vol_tau(sigma1, sigma2, tau);
  require(rho >= -1.0 && rho <= 1.0, "rho must lie in [-1, 1]");
  return std::expm1(rho * sigma1 * sigma2 * tau) / std::expm1(sigma1 * sigma2 * tau);
}

double two_asset_hix(const TwoAssetModel& m) {
  require(m.w1 > 0.0 && m.w2 > 0.0, "weights must be positive");
  const double s1 = lognormal_sd(m.x0_1, m.r1, m.sigma1, m.tau);
  const double s2 = lognormal_sd(m.x0_2, m.r2, m.sigma2, m.tau);
  const double own = m.w1 * m.w1 * s1 * s1 + m.w2 * m.w2 * s2 * s2;
  const double cross = 2.0 * m.w1 * m.w2 * s1 * s2;
  return (own + cross * gbm_corr(m.sigma1, m.sigma2, m.rho, m.tau)) /
         (own + cross * comono_corr(m.sigma1, m.sigma2, m.tau));
}

double two_asset_cix(const TwoAssetModel& m) { return gbm_corr(m.sigma1, m.sigma2, m.rho, m.tau); }

MomentSummary<double> lognormal_moments(const GbmParams& params, double tau) {
  params.validate();
  require(tau > 0.0, "tau must be positive");
  const Index d = params.dim();
  Vector means(d), sd(d);
  for (Index i = 0; i < d; ++i) {
    means(i) = lognormal_mean(params.x0(i), params.drifts(i), tau);
    sd(i) = lognormal_sd(params.x0(i), params.drifts(i), params.vols(i), tau);
  }
  Matrix cov(d, d), comono(d, d);
  for (Index i = 0; i < d; ++i) {
    cov(i, i) = comono(i, i) = sd(i) * sd(i);
    for (Index j = 0; j < i; ++j) {
      const double rho = std::clamp(params.corr(i, j), -1.0, 1.0);
      cov(i, j) = cov(j, i) = sd(i) * sd(j) * gbm_corr(params.vols(i), params.vols(j), rho, tau);
      comono(i, j) = comono(j, i) = sd(i) * sd(j) * comono_corr(params.vols(i), params.vols(j), tau);
    }
  }
  return MomentSummary<double>(std::move(means), std::move(cov), std::move(comono));
}

Matrix correlation_factor(const Matrix& corr) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(corr, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -kCorrTolerance) {
    throw Error(ErrorCode::NonPsdCorrelation, "correlation matrix is not positive semidefinite");
  }
  Eigen::LLT<Matrix> llt(corr);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  Eigen::LDLT<Matrix> ldlt(corr);
  Vector pivots = ldlt.vectorD();
  for (Index i = 0; i < pivots.size(); ++i) pivots(i) = pivots(i) < kPivotClip ? 0.0 : std::sqrt(pivots(i));
  const Matrix lower = ldlt.matrixL();
  Matrix factor = lower * pivots.asDiagonal();
  return ldlt.transpositionsP().transpose() * factor;
}

Matrix simulate_levels(const GbmParams& params, Index n_steps, double dt, Engine& engine) {
  params.validate();
  require(n_steps >= 1, "n_steps must be at least 1");
  require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
  const Index d = params.dim();
  const Matrix factor = correlation_factor(params.corr);
  const Vector drift = (params.drifts.array() - 0.5 * params.vols.array().square()) * dt;
  const Vector scale = params.vols * std::sqrt(dt);

  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix levels(n_steps + 1, d);
  levels.row(0) = params.x0.transpose();
  Vector log_level = params.x0.array().log();
  Vector z(d);
  for (Index t = 1; t <= n_steps; ++t) {
    for (Index i = 0; i < d; ++i) z(i) = normal(engine);
    log_level.array() += drift.array() + scale.array() * (factor * z).array();
    levels.row(t) = log_level.array().exp().transpose();
  }
  return levels;
}

PricePanel simulate(const GbmParams& params, Index n_steps, double dt, std::uint64_t seed, const PanelLayout& layout) {
  Engine engine = make_engine(seed);
  return to_panel(simulate_levels(params, n_steps, dt, engine), with_default_labels(layout, params.dim()));
}

PricePanel simulate_comonotonic(const GbmParams& params, Index n_steps, double dt, std::uint64_t seed,
                                const PanelLayout& layout) {
  GbmParams coupled = params;
  coupled.corr = Matrix::Ones(params.dim(), params.dim());
  return simulate(coupled, n_steps, dt, seed, layout);
}

std::vector<Matrix> simulate_replicates(const GbmParams& params, Index n_steps, double dt, std::uint64_t seed,
                                        Index count) {
  std::vector<Matrix> paths;
  paths.reserve(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) {
    Engine engine = make_engine(seed, {static_cast<std::uint64_t>(k)});
    paths.push_back(simulate_levels(params, n_steps, dt, engine));
  }
  return paths;
}

}  // namespace herd
