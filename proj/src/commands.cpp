// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>

#include "tailscore/error.hpp"
#include "tailscore/eval.hpp"
#include "tailscore/json_io.hpp"

namespace tailscore {

namespace {

constexpr double kNormalQuantile99 = 2.3263478740408408;  // standard normal 0.99 quantile
constexpr double kLaplaceQuantile99 = 3.912023005428146;  // log(50)
constexpr double kTailLevel = 0.99;

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_qq(const std::filesystem::path& path, const QqTable& table) {
  auto out = open_out(path);
  write_qq_csv(out, table);
  finish(out, path);
  validate_qq_csv(path);
}

void write_bands(const std::filesystem::path& path, const ConditionBandTable& table) {
  auto out = open_out(path);
  write_bands_csv(out, table);
  finish(out, path);
  validate_bands_csv(path);
}

void write_loss(const std::filesystem::path& path, std::span<const double> loss) {
  auto out = open_out(path);
  write_loss_csv(out, loss);
  finish(out, path);
}

std::vector<double> column_x(std::span<const DataPoint> pairs) {
  std::vector<double> xs(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) xs[i] = pairs[i].x;
  return xs;
}

std::vector<double> percentile_grid(std::span<const DataPoint> pairs, std::span<const double> percentiles) {
  const auto xs = column_x(pairs);
  std::vector<double> grid;
  for (double p : percentiles) grid.push_back(empirical_quantile(xs, p / 100.0));
  return grid;
}

double sample_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  const double m = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Analytic conditional law of a synthetic experiment at a raw condition.
struct Oracle {
  std::function<double(double, Rng&)> draw;
  std::function<double(double)> mean;
  double std = 1.0;
  std::function<double(double)> q99;
};

Oracle oracle_for(const RunConfig& config) {
  if (config.data.dataset.kind == DatasetKind::mean_shift_laplace) {
    return {[](double x, Rng& rng) { return 10.0 / x + laplace_quantile(rng.uniform_open()); },
            [](double x) { return 10.0 / x; }, std::sqrt(2.0),
            [](double x) { return 10.0 / x + kLaplaceQuantile99; }};
  }
  if (config.data.dataset.kind == DatasetKind::correlated_gaussian) {
    const double rho = config.data.dataset.rho;
    const double sd = std::sqrt(1.0 - rho * rho);
    return {[rho, sd](double x, Rng& rng) { return rho * x + sd * rng.normal(); },
            [rho](double x) { return rho * x; }, sd,
            [rho, sd](double x) { return rho * x + sd * kNormalQuantile99; }};
  }
  throw ConfigError("repro needs a synthetic dataset kind");
}

double elapsed_seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

PipelineConfig baseline_of(const PipelineConfig& proposed) {
  PipelineConfig b = proposed;
  b.mode = PipelineMode::baseline_gaussian;
  b.drift = DriftSpec::gaussian();
  return b;
}

LoadedData load_data(const RunConfig& config) {
  const auto& spec = config.data.dataset;
  LoadedData out;
  if (spec.kind != DatasetKind::csv) {
    Rng rng = Rng::substream(config.seed, "data");
    out.train = generate(spec, rng);
    return out;
  }
  if (config.data.date_column.empty()) {
    auto csv = ingest_csv(spec.csv_path, spec.x_column, spec.y_column);
    out.train = std::move(csv.pairs);
    out.skipped_rows = csv.skipped;
    return out;
  }
  auto dated = ingest_dated_csv(spec.csv_path, config.data.date_column, spec.x_column, spec.y_column);
  auto split = date_range_split(dated.rows, *config.data.train_range, *config.data.test_range);
  out.train = std::move(split.train);
  out.test = std::move(split.test);
  out.skipped_rows = dated.skipped;
  if (out.train.empty()) throw InsufficientData("no rows fall in the training date range");
  return out;
}

void cmd_gen_data(const RunConfig& config, const std::filesystem::path& out_dir) {
  if (config.data.dataset.kind == DatasetKind::csv) throw ConfigError("gen-data needs a synthetic dataset kind");
  ensure_dir(out_dir);
  const auto data = load_data(config);
  write_pairs_csv(out_dir / "data.csv", data.train);
  nlohmann::json provenance = {{"seed", config.seed},
                               {"substream", "data"},
                               {"data", to_json(config)["data"]},
                               {"rows", data.train.size()}};
  write_json_file(out_dir / "provenance.json", provenance);
}

FittedPipeline cmd_fit(const RunConfig& config, const std::filesystem::path& out_dir) {
  const auto data = load_data(config);
  Rng rng = Rng::substream(config.seed, "train");
  FittedPipeline p = fit(data.train, config.pipeline, rng);
  save_bundle(p, out_dir);
  write_loss(out_dir / "loss.csv", p.loss_history);
  if (!config.data.date_column.empty()) write_pairs_csv(out_dir / "test.csv", data.test);
  return p;
}

void cmd_sample(const std::filesystem::path& bundle, std::span<const double> conditions, std::size_t n,
                std::uint64_t seed, const std::filesystem::path& out_csv) {
  const FittedPipeline p = load_bundle(bundle);
  Rng rng = Rng::substream(seed, "sample");
  auto out = open_out(out_csv);
  out << "x,y_sample\n";
  out.precision(17);
  for (double x : conditions) {
    for (double y : sample_conditional(p, x, n, rng)) out << x << ',' << y << '\n';
  }
  finish(out, out_csv);
}

nlohmann::json cmd_eval(const std::filesystem::path& bundle, const std::filesystem::path& test_csv,
                        const EvalConfig& eval, std::uint64_t seed, const std::filesystem::path& out_dir) {
  const FittedPipeline p = load_bundle(bundle);
  const auto test = ingest_csv(test_csv, "x", "y");
  ensure_dir(out_dir);
  Rng rng = Rng::substream(seed, "sample");

  // One model draw per test condition, pooled against the test responses.
  const auto xs = column_x(test.pairs);
  std::vector<double> ys(test.pairs.size());
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = test.pairs[i].y;
  const auto model = sample_conditional(p, xs, rng);
  write_qq(out_dir / "qq.csv", qq_table(model, ys, eval.qq_levels));

  const auto grid = eval.conditions.empty() ? percentile_grid(test.pairs, eval.condition_percentiles)
                                            : eval.conditions;
  ConditionBandTable bands;
  bands.levels.assign(kBandLevels.begin(), kBandLevels.end());
  nlohmann::json per_condition = nlohmann::json::array();
  for (double c : grid) {
    const auto window = reference_window(test.pairs, c);
    nlohmann::json entry = {{"condition", c}, {"n_ref", window.size()}};
    try {
      const auto draws = sample_conditional(p, c, eval.samples_per_condition, rng);
      bands.rows.push_back(band_row(c, draws, bands.levels, window.size()));
      entry["failed"] = false;
      entry["ks_window"] = window.empty() ? nlohmann::json(nullptr) : nlohmann::json(ks_statistic(draws, window));
    } catch (const Error& e) {
      BandRow row{c, std::vector<double>(bands.levels.size(), std::nan("")), window.size(), true};
      bands.rows.push_back(row);
      entry["failed"] = true;
      entry["error"] = e.what();
    }
    per_condition.push_back(entry);
  }
  write_bands(out_dir / "bands.csv", bands);

  const auto failed = static_cast<std::size_t>(
      std::count_if(bands.rows.begin(), bands.rows.end(), [](const BandRow& r) { return r.failed; }));
  nlohmann::json diag = {{"mode", to_string(p.mode)},
                         {"n_test", test.pairs.size()},
                         {"skipped_rows", test.skipped},
                         {"ks_pooled", ks_statistic(model, ys)},
                         {"wasserstein1_pooled", wasserstein1(model, ys)},
                         {"conditions", per_condition},
                         {"failed_bins", failed}};
  write_json_file(out_dir / "diagnostics.json", diag);
  return diag;
}

void cmd_paths(const std::filesystem::path& bundle, const std::filesystem::path& data_csv, std::size_t n_chains,
               int stride, std::uint64_t seed, const std::filesystem::path& out_csv) {
  const FittedPipeline p = load_bundle(bundle);
  const auto data = ingest_csv(data_csv, "x", "y");
  std::vector<double> starts;
  for (std::size_t i = 0; i < std::min(n_chains, data.pairs.size()); ++i) {
    starts.push_back(p.encode_response(data.pairs[i].x, data.pairs[i].y));
  }
  Rng rng = Rng::substream(seed, "paths");
  const auto points = forward_trajectories(p.drift, p.schedule, starts, stride, rng);
  auto out = open_out(out_csv);
  write_trajectory_csv(out, points);
  finish(out, out_csv);
}

nlohmann::json cmd_repro(std::string_view experiment, const RunConfig& config,
                         const std::filesystem::path& out_dir, std::ostream* log) {
  if (experiment != "mean_shift" && experiment != "corr_gauss") {
    throw ConfigError("unknown experiment '" + std::string(experiment) + "' (expected mean_shift or corr_gauss)");
  }
  const auto start = std::chrono::steady_clock::now();
  auto note = [&](const std::string& msg) {
    if (log) *log << "[" << static_cast<long>(elapsed_seconds(start)) << "s] " << msg << std::endl;
  };
  ensure_dir(out_dir);
  const Oracle oracle = oracle_for(config);
  const auto data = load_data(config);
  write_pairs_csv(out_dir / "data.csv", data.train);
  note("generated " + std::to_string(data.train.size()) + " pairs");

  std::vector<double> grid = config.eval.conditions.empty()
                                 ? percentile_grid(data.train, config.eval.condition_percentiles)
                                 : config.eval.conditions;
  if (grid.empty()) throw ConfigError("repro needs at least one condition");
  // The tail condition where quantile errors are compared.
  const double focus = experiment == "mean_shift" ? 10.0 : empirical_quantile(column_x(data.train), 0.99);
  if (std::find(grid.begin(), grid.end(), focus) == grid.end()) grid.push_back(focus);

  // Oracle draws per condition, shared by both modes.
  std::vector<std::vector<double>> reference;
  Rng oracle_rng = Rng::substream(config.seed, "oracle");
  for (double c : grid) {
    std::vector<double> r(config.eval.oracle_samples);
    for (auto& v : r) v = oracle.draw(c, oracle_rng);
    reference.push_back(std::move(r));
  }

  nlohmann::json modes = nlohmann::json::object();
  nlohmann::json tail_error = nlohmann::json::object();
  const std::pair<std::string, PipelineConfig> runs[] = {{"baseline", baseline_of(config.pipeline)},
                                                         {"proposed", config.pipeline}};
  std::optional<FittedPipeline> proposed;
  for (const auto& [name, pcfg] : runs) {
    Rng train_rng = Rng::substream(config.seed, "train/" + name);
    FittedPipeline p = fit(data.train, pcfg, train_rng);
    note(name + " (" + to_string(p.mode) + ") trained");
    save_bundle(p, out_dir / ("bundle_" + name));
    write_loss(out_dir / ("loss_" + name + ".csv"), p.loss_history);

    Rng sample_rng = Rng::substream(config.seed, "sample/" + name);
    ConditionBandTable bands;
    bands.levels.assign(kBandLevels.begin(), kBandLevels.end());
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double c = grid[i];
      const auto draws = sample_conditional(p, c, config.eval.samples_per_condition, sample_rng);
      const double n = static_cast<double>(draws.size());
      const double mean = sample_mean(draws);
      const double sd = sample_std(draws);
      const double q99 = empirical_quantile(draws, kTailLevel);
      const double mean_se = sd / std::sqrt(n);
      const double std_se = sd / std::sqrt(2.0 * (n - 1.0));
      rows.push_back({{"condition", c},
                      {"ks", ks_statistic(draws, reference[i])},
                      {"mean", mean},
                      {"true_mean", oracle.mean(c)},
                      {"mean_z", (mean - oracle.mean(c)) / mean_se},
                      {"std", sd},
                      {"true_std", oracle.std},
                      {"std_z", (sd - oracle.std) / std_se},
                      {"q99", q99},
                      {"true_q99", oracle.q99(c)},
                      {"q99_abs_error", std::abs(q99 - oracle.q99(c))}});
      bands.rows.push_back(band_row(c, draws, bands.levels, reference_window(data.train, c).size()));
      if (c == focus) {
        write_qq(out_dir / ("qq_" + name + ".csv"), qq_table(draws, reference[i], config.eval.qq_levels));
        tail_error[name] = std::abs(q99 - oracle.q99(c));
      }
    }
    write_bands(out_dir / ("bands_" + name + ".csv"), bands);
    note(name + " sampled");

    std::vector<double> starts;
    for (std::size_t i = 0; i < std::min<std::size_t>(50, data.train.size()); ++i) {
      starts.push_back(p.encode_response(data.train[i].x, data.train[i].y));
    }
    Rng paths_rng = Rng::substream(config.seed, "paths/" + name);
    auto paths_out = open_out(out_dir / ("paths_" + name + ".csv"));
    write_trajectory_csv(paths_out, forward_trajectories(p.drift, p.schedule, starts, 5, paths_rng));
    finish(paths_out, out_dir / ("paths_" + name + ".csv"));

    modes[name] = {{"mode", to_string(p.mode)},
                   {"drift", p.drift},
                   {"final_loss", p.loss_history.empty() ? 0.0 : p.loss_history.back()},
                   {"conditions", rows}};
    if (name == "proposed") proposed = std::move(p);
  }

  nlohmann::json result = {{"experiment", experiment},
                           {"seed", config.seed},
                           {"n_train", data.train.size()},
                           {"focus_condition", focus},
                           {"tail_quantile_level", kTailLevel},
                           {"tail_quantile_error", tail_error},
                           {"modes", modes},
                           {"config", to_json(config)}};
  if (proposed && proposed->cevt) {
    const auto& params = *proposed->cevt;
    std::vector<DataPoint> laplace(data.train.size());
    for (std::size_t i = 0; i < data.train.size(); ++i) {
      laplace[i] = {proposed->condition_feature(data.train[i].x),
                    laplace_quantile(proposed->response_cdf->evaluate(data.train[i].y))};
    }
    const auto tail = tail_pairs(laplace, params.threshold_x);
    const auto diag = residual_diagnostics(params, tail);
    nlohmann::json residuals = {{"count", diag.count},
                                {"mean", diag.mean},
                                {"variance", diag.variance},
                                {"skewness", diag.skewness},
                                {"ks_gaussian", diag.ks_gaussian},
                                {"ks_gumbel", diag.ks_gumbel},
                                {"ks_laplace", diag.ks_laplace},
                                {"degenerate", diag.degenerate},
                                {"warnings", diag.warnings}};
    if (diag.suggested) residuals["suggested_family"] = to_string(*diag.suggested);
    result["cevt"] = {{"params", params}, {"residuals", residuals}};
  }
  write_json_file(out_dir / "comparison.json", result);
  note("wrote comparison.json");
  return result;
}

}  // namespace tailscore
