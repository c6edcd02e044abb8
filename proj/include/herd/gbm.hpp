#pragma once

// Multivariate geometric Brownian motion
//
//   dX_i(t) / X_i(t) = r_i dt + sigma_i dB_i(t),   corr(dB_i, dB_j) = rho_ij,
//
// its closed-form lognormal moments at horizon tau, and exact simulation.
// Time is measured in weeks unless the caller rescales.

#include <cstdint>
#include <string>
#include <vector>

#include "herd/core.hpp"
#include "herd/date.hpp"
#include "herd/panel.hpp"
#include "herd/rng.hpp"
#include "herd/types.hpp"

namespace herd {

struct GbmParams {
  Vector drifts;  // r, per unit time
  Vector vols;    // sigma > 0, per sqrt(unit time)
  Matrix corr;    // rho, symmetric PSD with unit diagonal
  Vector x0;      // X(0) > 0

  Index dim() const noexcept { return vols.size(); }

  /// Throws InvalidParameter, or NonPsdCorrelation when corr fails the
  /// eigenvalue test at tolerance 1e-10.
  void validate() const;

  /// Unit initial levels, zero drifts.
  static GbmParams standard(const Vector& vols, const Matrix& corr);
};

/// E[X(t+tau) | X(t) = x0] = x0 exp(r tau).
double lognormal_mean(double x0, double r, double tau);

/// sd[X(t+tau) | X(t) = x0] = x0 exp(r tau) sqrt(exp(sigma^2 tau) - 1).
double lognormal_sd(double x0, double r, double sigma, double tau);

/// corr(X_i(tau), X_j(tau)) = (exp(rho s_i s_j tau) - 1) /
///                            sqrt((exp(s_i^2 tau) - 1)(exp(s_j^2 tau) - 1)).
double gbm_corr(double sigma_i, double sigma_j, double rho, double tau);

/// Correlation of the comonotonic coupling, gbm_corr at rho = 1.
double comono_corr(double sigma_i, double sigma_j, double tau);

/// Two-asset RHIX, (exp(rho s1 s2 tau) - 1) / (exp(s1 s2 tau) - 1). Free of
/// weights, drifts and initial levels.
double two_asset_rhix(double rho, double sigma1, double sigma2, double tau);

struct TwoAssetModel {
  double rho = 0.0;
  double sigma1 = 0.2;
  double sigma2 = 0.2;
  double w1 = 1.0;
  double w2 = 1.0;
  double r1 = 0.03;
  double r2 = 0.03;
  double x0_1 = 1.0;
  double x0_2 = 1.0;
  double tau = 1.0;
};

double two_asset_hix(const TwoAssetModel& model);

/// CIX of two assets is their correlation whatever the weights.
double two_asset_cix(const TwoAssetModel& model);

/// Means, covariance and comonotonic covariance of X(tau) under the model,
/// built as sd_i sd_j corr_ij from the closed forms above.
MomentSummary<double> lognormal_moments(const GbmParams& params, double tau);

/// F with F F' = corr. Cholesky when corr is positive definite, otherwise a
/// pivoted LDL' with pivots below 1e-12 clipped to zero, so that a rank-one
/// correlation drives every asset from a single normal.
Matrix correlation_factor(const Matrix& corr);

/// (n_steps + 1) x d levels, row 0 = x0, exact lognormal stepping:
/// X(t+dt) = X(t) exp((r - sigma^2/2) dt + sigma sqrt(dt) eps), eps ~ N(0, corr).
Matrix simulate_levels(const GbmParams& params, Index n_steps, double dt, Engine& engine);

struct PanelLayout {
  Date start = Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{7}};
  long days_per_step = 7;
  std::vector<std::string> labels;  // defaults to asset1..assetd
};

PricePanel simulate(const GbmParams& params, Index n_steps, double dt, std::uint64_t seed,
                    const PanelLayout& layout = {});

/// simulate with corr replaced by the all-ones matrix: one shared driver.
PricePanel simulate_comonotonic(const GbmParams& params, Index n_steps, double dt, std::uint64_t seed,
                                const PanelLayout& layout = {});

/// Independent replicate paths; replicate k draws from stream (seed, k).
std::vector<Matrix> simulate_replicates(const GbmParams& params, Index n_steps, double dt, std::uint64_t seed,
                                        Index count);

}  // namespace herd
