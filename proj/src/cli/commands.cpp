#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "herd/error.hpp"
#include "json_config.hpp"

namespace herd::cli {

namespace {

using nlohmann::json;

Date parse_date_arg(const std::string& text, const std::string& what) {
  const auto date = parse_date(text);
  if (!date) throw Error(ErrorCode::UnparseableDate, "cannot parse " + what + " '" + text + "'");
  return *date;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open output file", {path.string()});
  return out;
}

template <typename Writer>
void emit(const std::string& output, std::ostream& fallback, Writer&& write) {
  if (output.empty()) {
    write(fallback);
    return;
  }
  auto file = open_output(output);
  write(file);
  if (!file) throw Error(ErrorCode::Io, "write failed", {output});
}

Vector json_vector(const json& doc, const char* key, Index d, double fallback) {
  if (!doc.contains(key)) return Vector::Constant(d, fallback);
  const auto values = doc.at(key).get<std::vector<double>>();
  if (static_cast<Index>(values.size()) != d) {
    throw Error(ErrorCode::DimensionMismatch, std::string("'") + key + "' must have " + std::to_string(d) + " entries");
  }
  return Eigen::Map<const Vector>(values.data(), d);
}

void add_compute_options(CLI::App* sub, ComputeConfig& c) {
  sub->add_option("--input", c.input, "Price panel CSV (date column plus one column per asset)")->required();
  sub->add_option("--fx", c.fx, "Currency panel CSV: dollar price of each asset's currency");
  sub->add_option("--aggregates", c.aggregates, "Aggregate market values CSV with header asset,value");
  sub->add_option("--ref-date", c.ref_date, "Reference date for --aggregates (default: last panel date)");
  sub->add_option("--weights", c.weights, "Explicit weights, comma separated")->delimiter(',');
  sub->add_option("--epsilon", c.epsilon, "Window half-width in observations")->capture_default_str();
  sub->add_option("--step", c.step, "Stride between window centres")->capture_default_str();
  sub->add_option("--indices", c.indices, "Index kinds: cix,hix,rhix")->delimiter(',')->capture_default_str();
  sub->add_flag("--bootstrap", c.bootstrap, "Add percentile bootstrap confidence intervals");
  sub->add_option("--replicates", c.replicates, "Bootstrap replicates")->capture_default_str();
  sub->add_option("--level", c.level, "Bootstrap confidence level")->capture_default_str();
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--output", c.output, "Output path; several indices get a _<kind> suffix");
  sub->add_option("--format", c.format, "csv or json")->capture_default_str();
  sub->add_option("--comono", c.comono, "Comonotonic covariance: lognormal or empirical")->capture_default_str();
  sub->add_flag("--drop-gappy-assets", c.drop_gappy_assets, "Drop asset columns with missing cells");
}

void write_error(std::ostream& err, const Error& e) {
  json doc;
  doc["error"] = std::string(to_string(e.code()));
  switch (category(e.code())) {
    case ErrorCategory::Io: doc["category"] = "io"; break;
    case ErrorCategory::Validation: doc["category"] = "validation"; break;
    case ErrorCategory::Numerical: doc["category"] = "numerical"; break;
  }
  doc["message"] = e.what();
  if (!e.where().file.empty()) doc["file"] = e.where().file;
  if (e.where().row) doc["row"] = *e.where().row;
  if (e.where().column) doc["column"] = *e.where().column;
  err << doc.dump() << '\n';
}

void write_error(std::ostream& err, const std::string& code, const std::string& category, const std::string& message) {
  json doc;
  doc["error"] = code;
  doc["category"] = category;
  doc["message"] = message;
  err << doc.dump() << '\n';
}

std::vector<double> grid(double from, double to, double step) {
  if (!(step > 0.0) || to < from) throw Error(ErrorCode::InvalidParameter, "invalid grid specification");
  std::vector<double> points;
  const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  for (long k = 0; k <= n; ++k) points.push_back(from + static_cast<double>(k) * step);
  return points;
}

void write_series_outputs(const ComputeConfig& config, const std::vector<IndexSeries>& all, std::ostream& out) {
  const OutputFormat format = parse_format(config.format);
  const bool several = all.size() > 1;
  if (several && config.output.empty()) {
    throw Error(ErrorCode::InvalidConfig, "--output is required when several indices are requested");
  }
  for (const auto& series : all) {
    const std::string path = config.output.empty() ? "" : series_path(config.output, series.kind, several).string();
    emit(path, out, [&](std::ostream& os) { write_series(os, series, format); });
  }
}

}  // namespace

PricePanel prepare_panel(const ComputeConfig& config) {
  PanelSchema schema;
  schema.drop_gappy_assets = config.drop_gappy_assets;
  PricePanel panel = load_panel(config.input, schema);
  if (!config.fx.empty()) {
    PricePanel fx = load_panel(config.fx);
    if (config.drop_gappy_assets) {
      for (const auto& label : panel.labels()) {
        if (!fx.column_of(label)) {
          throw Error(ErrorCode::LabelMismatch, "currency panel lacks asset '" + label + "'", {config.fx});
        }
      }
      fx = fx.select(panel.labels());
    }
    panel = calibrate_dollar(panel, fx);
  }
  return panel;
}

Weights resolve_weights(const ComputeConfig& config, const PricePanel& panel) {
  const bool from_aggregates = !config.aggregates.empty();
  const bool explicit_weights = !config.weights.empty();
  if (from_aggregates == explicit_weights) {
    throw Error(ErrorCode::InvalidConfig, "give exactly one weight source: --aggregates or --weights");
  }
  if (explicit_weights) {
    if (static_cast<Index>(config.weights.size()) != panel.assets()) {
      throw Error(ErrorCode::DimensionMismatch, std::to_string(config.weights.size()) + " weights for " +
                                                    std::to_string(panel.assets()) + " assets");
    }
    return Weights(Eigen::Map<const Vector>(config.weights.data(), panel.assets()));
  }
  const Date as_of = config.ref_date.empty() ? panel.dates().back() : parse_date_arg(config.ref_date, "--ref-date");
  return weights_from_aggregates(panel, load_aggregates(config.aggregates, panel, as_of));
}

std::vector<IndexSeries> cmd_compute(const ComputeConfig& config) {
  const WindowSpec spec{config.epsilon, config.step};
  spec.validate();
  std::vector<IndexKind> kinds;
  for (const auto& name : config.indices) kinds.push_back(parse_index_kind(name));
  if (kinds.empty()) throw Error(ErrorCode::InvalidConfig, "no index kinds requested");
  ComonoSource source;
  if (config.comono == "lognormal") {
    source = ComonoSource::Lognormal;
  } else if (config.comono == "empirical") {
    source = ComonoSource::Empirical;
  } else {
    throw Error(ErrorCode::InvalidConfig, "--comono must be lognormal or empirical");
  }
  if (config.bootstrap && source != ComonoSource::Lognormal) {
    throw Error(ErrorCode::InvalidConfig, "bootstrap intervals use the lognormal model; drop --comono empirical");
  }
  parse_format(config.format);

  const PricePanel panel = prepare_panel(config);
  const Weights w = resolve_weights(config, panel);
  const BootstrapSpec bootstrap{config.replicates, config.level, config.seed};

  std::vector<IndexSeries> all;
  for (IndexKind kind : kinds) {
    all.push_back(config.bootstrap ? windowed_index_with_ci(panel, w, spec, kind, bootstrap)
                                   : windowed_index(panel, w, spec, kind, source));
  }
  return all;
}

std::filesystem::path series_path(const std::filesystem::path& base, IndexKind kind, bool several) {
  if (!several) return base;
  std::filesystem::path path = base;
  path.replace_filename(base.stem().string() + "_" + std::string(to_string(kind)) + base.extension().string());
  return path;
}

SimulationSpec load_simulation_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open simulation parameters", {path.string()});
  try {
    json doc;
    in >> doc;
    const auto vols = doc.at("vols").get<std::vector<double>>();
    const auto d = static_cast<Index>(vols.size());
    const auto rows = doc.at("corr").get<std::vector<std::vector<double>>>();
    Matrix corr(d, d);
    if (static_cast<Index>(rows.size()) != d) throw Error(ErrorCode::DimensionMismatch, "corr must be d x d");
    for (Index i = 0; i < d; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (static_cast<Index>(row.size()) != d) throw Error(ErrorCode::DimensionMismatch, "corr must be d x d");
      for (Index j = 0; j < d; ++j) corr(i, j) = row[static_cast<std::size_t>(j)];
    }
    SimulationSpec spec{GbmParams{json_vector(doc, "drifts", d, 0.0), Eigen::Map<const Vector>(vols.data(), d), corr,
                                  json_vector(doc, "x0", d, 1.0)},
                        doc.value("labels", std::vector<std::string>{})};
    if (!spec.labels.empty() && static_cast<Index>(spec.labels.size()) != d) {
      throw Error(ErrorCode::DimensionMismatch, "labels must have one entry per asset");
    }
    spec.params.validate();
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed simulation parameters: ") + e.what(), {path.string()});
  }
}

PricePanel cmd_simulate(const SimulateConfig& config) {
  if (config.params.empty()) throw Error(ErrorCode::InvalidConfig, "--params is required");
  const SimulationSpec spec = load_simulation_spec(config.params);
  PanelLayout layout;
  layout.start = parse_date_arg(config.start_date, "--start-date");
  layout.labels = spec.labels;
  return config.comonotonic ? simulate_comonotonic(spec.params, config.steps, config.dt, config.seed, layout)
                            : simulate(spec.params, config.steps, config.dt, config.seed, layout);
}

std::vector<CurveTable> cmd_figures(const FiguresConfig& c) {
  const std::vector<double> sigmas = grid(c.sigma_min, c.sigma_max, c.sigma_step);
  const std::vector<double> weights = grid(1.0, c.w_max, c.w_step);
  const double rhos[2] = {0.0, 0.95};

  auto model = [&](double rho, double sigma2, double w2) {
    TwoAssetModel m;
    m.rho = rho;
    m.sigma1 = c.sigma1;
    m.sigma2 = sigma2;
    m.w1 = 1.0;
    m.w2 = w2;
    m.r1 = m.r2 = c.drift;
    m.tau = c.tau;
    return m;
  };

  CurveTable volatility{"hix_rhix_volatility", {"sigma2", "hix_rho0", "rhix_rho0", "hix_rho095", "rhix_rho095"}, {}};
  CurveTable weight{"hix_rhix_weight", {"w2", "hix_rho0", "rhix_rho0", "hix_rho095", "rhix_rho095"}, {}};
  CurveTable correlation{"cix_rhix_volatility", {"sigma2", "cix_rho0", "rhix_rho0", "cix_rho095", "rhix_rho095"}, {}};
  volatility.rows.resize(static_cast<Index>(sigmas.size()), 5);
  correlation.rows.resize(static_cast<Index>(sigmas.size()), 5);
  weight.rows.resize(static_cast<Index>(weights.size()), 5);

  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    const auto row = static_cast<Index>(k);
    volatility.rows(row, 0) = correlation.rows(row, 0) = sigmas[k];
    for (int r = 0; r < 2; ++r) {
      const TwoAssetModel m = model(rhos[r], sigmas[k], 1.0);
      const double rhix = two_asset_rhix(m.rho, m.sigma1, m.sigma2, m.tau);
      volatility.rows(row, 1 + 2 * r) = two_asset_hix(m);
      volatility.rows(row, 2 + 2 * r) = rhix;
      correlation.rows(row, 1 + 2 * r) = two_asset_cix(m);
      correlation.rows(row, 2 + 2 * r) = rhix;
    }
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const auto row = static_cast<Index>(k);
    weight.rows(row, 0) = weights[k];
    for (int r = 0; r < 2; ++r) {
      const TwoAssetModel m = model(rhos[r], c.sigma1, weights[k]);
      weight.rows(row, 1 + 2 * r) = two_asset_hix(m);
      weight.rows(row, 2 + 2 * r) = two_asset_rhix(m.rho, m.sigma1, m.sigma2, m.tau);
    }
  }
  return {volatility, weight, correlation};
}

void write_curve(std::ostream& out, const CurveTable& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  char buf[32];
  for (Index r = 0; r < table.rows.rows(); ++r) {
    for (Index c = 0; c < table.rows.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", table.rows(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

std::vector<PeriodSummary> cmd_summarize(const SummarizeConfig& config) {
  if (config.series.empty()) throw Error(ErrorCode::InvalidConfig, "at least one --series file is required");
  std::vector<Period> periods;
  if (!config.periods_file.empty()) periods = load_periods(config.periods_file);
  for (const auto& text : config.periods) periods.push_back(parse_period(text));
  if (periods.empty()) periods.push_back(parse_period("entire"));

  std::vector<PeriodSummary> rows;
  for (const auto& file : config.series) {
    const IndexSeries series = load_series(file);
    const auto part = summarize(series, std::filesystem::path(file).stem().string(), periods);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"herdix: herd-behaviour indices (CIX, HIX, RHIX) on multi-asset price panels", "herdix"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");
  app.require_subcommand(1);

  ComputeConfig compute_cfg;
  ComputeConfig bootstrap_cfg;
  bootstrap_cfg.bootstrap = true;
  SimulateConfig simulate_cfg;
  FiguresConfig figures_cfg;
  SummarizeConfig summarize_cfg;

  auto* compute = app.add_subcommand("compute", "Rolling-window indices for a price panel");
  add_compute_options(compute, compute_cfg);
  auto* bootstrap = app.add_subcommand("bootstrap", "compute with bootstrap confidence intervals");
  add_compute_options(bootstrap, bootstrap_cfg);

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a multivariate GBM price panel");
  simulate_cmd->add_option("--params", simulate_cfg.params, "JSON with vols, corr and optional drifts, x0, labels")
      ->required();
  simulate_cmd->add_option("--steps", simulate_cfg.steps, "Number of steps")->capture_default_str();
  simulate_cmd->add_option("--dt", simulate_cfg.dt, "Step length in parameter time units (weeks)")
      ->capture_default_str();
  simulate_cmd->add_option("--seed", simulate_cfg.seed, "Random seed")->capture_default_str();
  simulate_cmd->add_flag("--comonotonic", simulate_cfg.comonotonic, "Drive every asset by one shared normal");
  simulate_cmd->add_option("--start-date", simulate_cfg.start_date, "First date; rows are 7 days apart")
      ->capture_default_str();
  simulate_cmd->add_option("--output", simulate_cfg.output, "Output CSV (default stdout)");

  auto* figures = app.add_subcommand("figures", "Two-asset analytic HIX/CIX/RHIX curves");
  figures->add_option("--output-dir", figures_cfg.output_dir, "Directory for the curve CSVs")->capture_default_str();
  figures->add_option("--sigma1", figures_cfg.sigma1, "Volatility of asset 1")->capture_default_str();
  figures->add_option("--drift", figures_cfg.drift, "Common drift r1 = r2")->capture_default_str();
  figures->add_option("--tau", figures_cfg.tau, "Horizon t")->capture_default_str();
  figures->add_option("--sigma-min", figures_cfg.sigma_min, "Smallest sigma2")->capture_default_str();
  figures->add_option("--sigma-max", figures_cfg.sigma_max, "Largest sigma2")->capture_default_str();
  figures->add_option("--sigma-step", figures_cfg.sigma_step, "sigma2 grid step")->capture_default_str();
  figures->add_option("--w-max", figures_cfg.w_max, "Largest w2 (w1 = 1)")->capture_default_str();
  figures->add_option("--w-step", figures_cfg.w_step, "w2 grid step")->capture_default_str();

  auto* summarize_cmd = app.add_subcommand("summarize", "Mean and standard deviation of series over periods");
  summarize_cmd->add_option("--series", summarize_cfg.series, "Series files written by compute")->required();
  summarize_cmd->add_option("--period", summarize_cfg.periods, "LABEL=YYYY-MM-DD:YYYY-MM-DD, or 'entire'");
  summarize_cmd->add_option("--periods", summarize_cfg.periods_file, "JSON array of {label, start, end}");
  summarize_cmd->add_option("--output", summarize_cfg.output, "Output path (default stdout)");
  summarize_cmd->add_option("--format", summarize_cfg.format, "csv or json")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    write_error(err, "InvalidConfig", "validation", e.what());
    return static_cast<int>(ErrorCategory::Validation);
  }

  try {
    if (compute->parsed() || bootstrap->parsed()) {
      const ComputeConfig& config = compute->parsed() ? compute_cfg : bootstrap_cfg;
      write_series_outputs(config, cmd_compute(config), out);
    } else if (simulate_cmd->parsed()) {
      const PricePanel panel = cmd_simulate(simulate_cfg);
      emit(simulate_cfg.output, out, [&](std::ostream& os) { write_panel(os, panel); });
    } else if (figures->parsed()) {
      for (const auto& table : cmd_figures(figures_cfg)) {
        const auto path = std::filesystem::path(figures_cfg.output_dir) / (table.name + ".csv");
        emit(path.string(), out, [&](std::ostream& os) { write_curve(os, table); });
      }
    } else if (summarize_cmd->parsed()) {
      const OutputFormat format = parse_format(summarize_cfg.format);
      const auto rows = cmd_summarize(summarize_cfg);
      emit(summarize_cfg.output, out, [&](std::ostream& os) { write_summary(os, rows, format); });
    }
  } catch (const Error& e) {
    write_error(err, e);
    return static_cast<int>(category(e.code()));
  } catch (const std::exception& e) {
    write_error(err, "Io", "io", e.what());
    return static_cast<int>(ErrorCategory::Io);
  }
  return 0;
}

}  // namespace herd::cli
