// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tailscore/data.hpp"
#include "tailscore/eval.hpp"
#include "tailscore/pipeline.hpp"

namespace tailscore {

struct DataConfig {
  DatasetSpec dataset;
  /// With a date column, csv rows are split into train / test date ranges.
  std::string date_column;
  std::optional<DateRange> train_range;
  std::optional<DateRange> test_range;
};

struct EvalConfig {
  std::vector<double> qq_levels = default_qq_levels();
  /// Raw-x band grid. When empty, the grid is taken at condition_percentiles
  /// of the conditions at hand.
  std::vector<double> conditions;
  std::vector<double> condition_percentiles = {50.0, 90.0, 99.0};
  std::size_t samples_per_condition = 5000;
  std::size_t oracle_samples = 10000;
};

/// One JSON document driving every command. Unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 0;
  DataConfig data;
  PipelineConfig pipeline;
  EvalConfig eval;
  std::string output = "out";
};

/// Defaults for the two synthetic experiments ("mean_shift", "corr_gauss").
/// Throws ConfigError for any other name.
RunConfig experiment_defaults(std::string_view experiment);

/// Parses a config document on top of `base`; sections and keys left out keep
/// their base values. Throws SchemaError / ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc, const RunConfig& base = {});
RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& base = {});

nlohmann::json to_json(const RunConfig& config);

}  // namespace tailscore
