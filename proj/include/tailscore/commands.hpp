// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <span>
#include <string_view>
#include <vector>

#include "tailscore/config.hpp"
#include "tailscore/pipeline.hpp"

namespace tailscore {

/// Training and held-out pairs for a config. Synthetic kinds draw from the
/// "data" substream and have no test part; csv with a date column is split by
/// the configured date ranges.
struct LoadedData {
  std::vector<DataPoint> train;
  std::vector<DataPoint> test;
  std::size_t skipped_rows = 0;
};

LoadedData load_data(const RunConfig& config);

/// Writes data.csv (`x,y`) and provenance.json (config + seed) into out_dir.
void cmd_gen_data(const RunConfig& config, const std::filesystem::path& out_dir);

/// Fits the configured pipeline and writes its bundle plus loss.csv into
/// out_dir; with a date split the held-out pairs go to test.csv.
FittedPipeline cmd_fit(const RunConfig& config, const std::filesystem::path& out_dir);

/// n draws per condition from a bundle, written as `x,y_sample`.
void cmd_sample(const std::filesystem::path& bundle, std::span<const double> conditions, std::size_t n,
                std::uint64_t seed, const std::filesystem::path& out_csv);

/// Writes qq.csv, bands.csv and diagnostics.json for a bundle against a test
/// CSV with columns x and y; returns the diagnostics document.
nlohmann::json cmd_eval(const std::filesystem::path& bundle, const std::filesystem::path& test_csv,
                        const EvalConfig& eval, std::uint64_t seed, const std::filesystem::path& out_dir);

/// Forward particle paths (`chain,t,z`) started from the first n_chains pairs
/// of a data CSV, encoded by the bundle.
void cmd_paths(const std::filesystem::path& bundle, const std::filesystem::path& data_csv, std::size_t n_chains,
               int stride, std::uint64_t seed, const std::filesystem::path& out_csv);

/// Synthetic experiment: generate, fit the Gaussian baseline and the proposed
/// model, sample, compare against the analytic conditional, and write
/// comparison.json with per-mode CSVs. Progress lines go to `log` if given.
nlohmann::json cmd_repro(std::string_view experiment, const RunConfig& config,
                         const std::filesystem::path& out_dir, std::ostream* log = nullptr);

/// The baseline twin of a config: same schedule, network and data, Gaussian
/// drift and standardized response.
PipelineConfig baseline_of(const PipelineConfig& proposed);

}  // namespace tailscore
