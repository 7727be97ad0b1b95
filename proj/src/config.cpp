// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/config.hpp"

#include "tailscore/error.hpp"
#include "tailscore/json_io.hpp"

namespace tailscore {

namespace {

template <typename T>
void read_optional(const nlohmann::json& j, const char* key, T& value) {
  if (j.contains(key)) value = j.at(key).get<T>();
}

DateRange parse_range(const nlohmann::json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 2) throw SchemaError("'" + name + "' must be [first, last]");
  const DateRange r{IsoDate::parse(j[0].get<std::string>()), IsoDate::parse(j[1].get<std::string>())};
  if (r.last < r.first) throw ConfigError("'" + name + "' ends before it starts");
  return r;
}

void parse_data(const nlohmann::json& j, DataConfig& d) {
  reject_unknown_keys(j, {"kind", "n", "rho", "csv_path", "x_column", "y_column", "date_column", "train_range",
                          "test_range"},
                      "data");
  if (j.contains("kind")) d.dataset.kind = parse_dataset_kind(j.at("kind").get<std::string>());
  read_optional(j, "n", d.dataset.n);
  read_optional(j, "rho", d.dataset.rho);
  read_optional(j, "csv_path", d.dataset.csv_path);
  read_optional(j, "x_column", d.dataset.x_column);
  read_optional(j, "y_column", d.dataset.y_column);
  read_optional(j, "date_column", d.date_column);
  if (j.contains("train_range")) d.train_range = parse_range(j.at("train_range"), "train_range");
  if (j.contains("test_range")) d.test_range = parse_range(j.at("test_range"), "test_range");
  d.dataset.validate();
  if (!d.date_column.empty() && (!d.train_range || !d.test_range)) {
    throw ConfigError("a date column needs both train_range and test_range");
  }
}

void parse_eval(const nlohmann::json& j, EvalConfig& e) {
  reject_unknown_keys(j, {"qq_levels", "conditions", "condition_percentiles", "samples_per_condition",
                          "oracle_samples"},
                      "eval");
  read_optional(j, "qq_levels", e.qq_levels);
  read_optional(j, "conditions", e.conditions);
  read_optional(j, "condition_percentiles", e.condition_percentiles);
  read_optional(j, "samples_per_condition", e.samples_per_condition);
  read_optional(j, "oracle_samples", e.oracle_samples);
  for (double p : e.condition_percentiles) {
    if (!(p >= 0.0 && p <= 100.0)) throw ConfigError("condition percentiles must lie in [0, 100]");
  }
  if (e.samples_per_condition == 0) throw ConfigError("samples_per_condition must be positive");
  if (e.oracle_samples == 0) throw ConfigError("oracle_samples must be positive");
}

}  // namespace

RunConfig experiment_defaults(std::string_view experiment) {
  RunConfig c;
  auto& p = c.pipeline;
  p.schedule = DiffusionSchedule{};
  p.schedule.eta = 0.01;
  p.schedule.num_steps = 500;
  if (experiment == "mean_shift") {
    c.data.dataset.kind = DatasetKind::mean_shift_laplace;
    c.data.dataset.n = 20000;
    p.mode = PipelineMode::nonlinear_no_transform;
    p.drift = DriftSpec::laplace();
    c.eval.conditions = {2.0, 10.0, 100.0};
  } else if (experiment == "corr_gauss") {
    c.data.dataset.kind = DatasetKind::correlated_gaussian;
    c.data.dataset.n = 50000;
    c.data.dataset.rho = 0.4;
    p.mode = PipelineMode::nonlinear_cevt;
    p.drift = DriftSpec::gumbel(2.0, 1.0, 0.0, 0.4);
  } else {
    throw ConfigError("unknown experiment '" + std::string(experiment) + "' (expected mean_shift or corr_gauss)");
  }
  c.output = "out/" + std::string(experiment);
  return c;
}

RunConfig parse_run_config(const nlohmann::json& doc, const RunConfig& base) {
  reject_unknown_keys(doc, {"seed", "data", "mode", "drift", "schedule", "train", "cevt", "eval", "output"},
                      "config");
  RunConfig c = base;
  try {
    read_optional(doc, "seed", c.seed);
    if (doc.contains("data")) parse_data(doc.at("data"), c.data);
    if (doc.contains("mode")) c.pipeline.mode = parse_pipeline_mode(doc.at("mode").get<std::string>());
    if (doc.contains("drift")) c.pipeline.drift = doc.at("drift").get<DriftSpec>();
    if (doc.contains("schedule")) {
      // Partial schedule sections override the base field by field.
      nlohmann::json merged = c.pipeline.schedule;
      merged.merge_patch(doc.at("schedule"));
      c.pipeline.schedule = merged.get<DiffusionSchedule>();
    }
    if (doc.contains("train")) {
      nlohmann::json merged = c.pipeline.train;
      merged.merge_patch(doc.at("train"));
      c.pipeline.train = merged.get<TrainConfig>();
    }
    if (doc.contains("cevt")) {
      nlohmann::json merged = c.pipeline.cevt;
      merged.merge_patch(doc.at("cevt"));
      c.pipeline.cevt = merged.get<CevtFitOptions>();
    }
    if (doc.contains("eval")) parse_eval(doc.at("eval"), c.eval);
    read_optional(doc, "output", c.output);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  if (c.pipeline.mode == PipelineMode::baseline_gaussian && c.pipeline.drift.family != DriftFamily::gaussian) {
    throw ConfigError("mode baseline_gaussian requires drift family gaussian");
  }
  c.pipeline.schedule.validate_for(c.pipeline.drift);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& base) {
  return parse_run_config(read_json_file(path), base);
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json data = {{"kind", to_string(c.data.dataset.kind)},
                         {"n", c.data.dataset.n},
                         {"rho", c.data.dataset.rho},
                         {"csv_path", c.data.dataset.csv_path},
                         {"x_column", c.data.dataset.x_column},
                         {"y_column", c.data.dataset.y_column},
                         {"date_column", c.data.date_column}};
  if (c.data.train_range) data["train_range"] = {c.data.train_range->first.str(), c.data.train_range->last.str()};
  if (c.data.test_range) data["test_range"] = {c.data.test_range->first.str(), c.data.test_range->last.str()};
  return {{"seed", c.seed},
          {"data", data},
          {"mode", to_string(c.pipeline.mode)},
          {"drift", c.pipeline.drift},
          {"schedule", c.pipeline.schedule},
          {"train", c.pipeline.train},
          {"cevt", c.pipeline.cevt},
          {"eval",
           {{"qq_levels", c.eval.qq_levels},
            {"conditions", c.eval.conditions},
            {"condition_percentiles", c.eval.condition_percentiles},
            {"samples_per_condition", c.eval.samples_per_condition},
            {"oracle_samples", c.eval.oracle_samples}}},
          {"output", c.output}};
}

}  // namespace tailscore
