#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "herd/gbm.hpp"
#include "herd/panel.hpp"
#include "herd/rolling.hpp"
#include "series_io.hpp"

namespace herd::cli {

struct ComputeConfig {
  std::string input;
  std::string fx;
  std::string aggregates;
  std::string ref_date;  // defaults to the last panel date
  std::vector<double> weights;
  Index epsilon = 25;
  Index step = 1;
  std::vector<std::string> indices{"rhix"};
  bool bootstrap = false;
  Index replicates = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "csv";
  std::string comono = "lognormal";
  bool drop_gappy_assets = false;
};

/// Loads, dollar-calibrates and weights the panel named by the config.
PricePanel prepare_panel(const ComputeConfig& config);
Weights resolve_weights(const ComputeConfig& config, const PricePanel& panel);

/// One series per requested index kind.
std::vector<IndexSeries> cmd_compute(const ComputeConfig& config);

/// `base` when a single series is written, otherwise `stem_<kind>.ext`.
std::filesystem::path series_path(const std::filesystem::path& base, IndexKind kind, bool several);

struct SimulateConfig {
  std::string params;
  Index steps = 520;
  double dt = 1.0;
  std::uint64_t seed = 0;
  bool comonotonic = false;
  std::string start_date = "2000-01-07";
  std::string output;
};

struct SimulationSpec {
  GbmParams params;
  std::vector<std::string> labels;
};

/// JSON object with vols and corr, optional drifts (default 0), x0 (default 1)
/// and labels.
SimulationSpec load_simulation_spec(const std::filesystem::path& path);
PricePanel cmd_simulate(const SimulateConfig& config);

struct FiguresConfig {
  std::string output_dir = ".";
  double sigma1 = 0.2;
  double drift = 0.03;
  double tau = 1.0;
  double sigma_min = 0.2;
  double sigma_max = 3.0;
  double sigma_step = 0.05;
  double w_max = 20.0;
  double w_step = 0.5;
};

struct CurveTable {
  std::string name;
  std::vector<std::string> columns;
  Matrix rows;
};

/// hix_rhix_volatility (w1 = w2, sigma2 varies), hix_rhix_weight
/// (sigma2 = sigma1, w2 varies) and cix_rhix_volatility, each at rho 0 and 0.95.
std::vector<CurveTable> cmd_figures(const FiguresConfig& config);
void write_curve(std::ostream& out, const CurveTable& table);

struct SummarizeConfig {
  std::vector<std::string> series;
  std::vector<std::string> periods;
  std::string periods_file;
  std::string output;
  std::string format = "csv";
};

std::vector<PeriodSummary> cmd_summarize(const SummarizeConfig& config);

/// Full command-line entry point. Returns the process exit code: 0 success,
/// 1 I/O, 2 validation, 3 numerical degeneracy. Errors go to `err` as JSON.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace herd::cli
