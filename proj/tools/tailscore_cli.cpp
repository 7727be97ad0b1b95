// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: gen-data, fit, sample, eval, paths, repro.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tailscore/commands.hpp"
#include "tailscore/config.hpp"
#include "tailscore/error.hpp"

namespace {

using namespace tailscore;

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kIo = 3, kInsufficient = 4 };

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

RunConfig resolve(const Common& c, const RunConfig& base = {}) {
  RunConfig cfg = c.config.empty() ? base : load_run_config(c.config, base);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output = c.out;
  return cfg;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output location");
  cmd->add_option("--seed", c.seed, "Root 64-bit seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail-adaptive conditional score-based diffusion"};
  app.require_subcommand(1);

  Common gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  add_common(gen_cmd, gen);

  Common fitc;
  std::string mode;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a pipeline and write its bundle");
  add_common(fit_cmd, fitc);
  fit_cmd->add_option("--mode", mode, "baseline_gaussian | nonlinear_no_transform | nonlinear_cevt");

  Common samp;
  std::string sample_bundle;
  std::vector<double> xs;
  std::size_t n = 1000;
  auto* sample_cmd = app.add_subcommand("sample", "Draw conditional samples from a bundle");
  sample_cmd->add_option("bundle", sample_bundle, "Bundle directory")->required();
  sample_cmd->add_option("--x", xs, "Raw condition value(s)")->required();
  sample_cmd->add_option("--n", n, "Samples per condition");
  add_common(sample_cmd, samp);

  Common evalc;
  std::string eval_bundle;
  std::string test_csv;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a bundle against held-out pairs");
  eval_cmd->add_option("bundle", eval_bundle, "Bundle directory")->required();
  eval_cmd->add_option("test", test_csv, "Test CSV with columns x,y")->required();
  add_common(eval_cmd, evalc);

  Common pathc;
  std::string paths_bundle;
  std::string paths_data;
  std::size_t chains = 50;
  int stride = 5;
  auto* paths_cmd = app.add_subcommand("paths", "Write forward particle paths");
  paths_cmd->add_option("bundle", paths_bundle, "Bundle directory")->required();
  paths_cmd->add_option("data", paths_data, "CSV with columns x,y")->required();
  paths_cmd->add_option("--n", chains, "Number of chains");
  paths_cmd->add_option("--stride", stride, "Record every stride-th step")->check(CLI::PositiveNumber);
  add_common(paths_cmd, pathc);

  Common repc;
  std::string experiment;
  auto* repro_cmd = app.add_subcommand("repro", "Run a synthetic experiment end to end");
  repro_cmd->add_option("experiment", experiment, "mean_shift | corr_gauss")->required();
  add_common(repro_cmd, repc);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      const auto cfg = resolve(gen);
      cmd_gen_data(cfg, cfg.output);
    } else if (*fit_cmd) {
      auto cfg = resolve(fitc);
      if (!mode.empty()) {
        cfg.pipeline.mode = parse_pipeline_mode(mode);
        if (cfg.pipeline.mode == PipelineMode::baseline_gaussian) cfg.pipeline = baseline_of(cfg.pipeline);
      }
      const auto p = cmd_fit(cfg, cfg.output);
      std::cerr << "fitted " << to_string(p.mode) << " pipeline into " << cfg.output << '\n';
    } else if (*sample_cmd) {
      const auto cfg = resolve(samp);
      const std::string out = samp.out.empty() ? "samples.csv" : samp.out;
      cmd_sample(sample_bundle, xs, n, cfg.seed, out);
    } else if (*eval_cmd) {
      const auto cfg = resolve(evalc);
      const auto diag = cmd_eval(eval_bundle, test_csv, cfg.eval, cfg.seed, cfg.output);
      std::cout << diag.dump(2) << '\n';
    } else if (*paths_cmd) {
      const auto cfg = resolve(pathc);
      const std::string out = pathc.out.empty() ? "paths.csv" : pathc.out;
      cmd_paths(paths_bundle, paths_data, chains, stride, cfg.seed, out);
    } else if (*repro_cmd) {
      const auto cfg = resolve(repc, experiment_defaults(experiment));
      const auto result = cmd_repro(experiment, cfg, cfg.output, &std::cerr);
      std::cout << result["tail_quantile_error"].dump() << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const InsufficientData& e) {
    std::cerr << "insufficient data: " << e.what() << '\n';
    return kInsufficient;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
