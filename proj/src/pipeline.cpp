// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "tailscore/error.hpp"
#include "tailscore/json_io.hpp"

namespace tailscore {

namespace {

constexpr const char* kBundleFormat = "tailscore.pipeline";
constexpr int kBundleVersion = 1;

double laplace_feature(const EmpiricalCdf& cdf, double v) { return laplace_quantile(cdf.evaluate(v)); }

// Bulk points below the tail threshold are normalized as if they sat at it,
// which keeps (x*)^b defined and the map continuous in x*.
double effective_condition(const CevtParams& params, double x_star) {
  return std::max(x_star, params.threshold_x);
}

}  // namespace

std::string to_string(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::baseline_gaussian:
      return "baseline_gaussian";
    case PipelineMode::nonlinear_no_transform:
      return "nonlinear_no_transform";
    case PipelineMode::nonlinear_cevt:
      return "nonlinear_cevt";
  }
  return "unknown";
}

PipelineMode parse_pipeline_mode(std::string_view name) {
  if (name == "baseline_gaussian" || name == "baseline") return PipelineMode::baseline_gaussian;
  if (name == "nonlinear_no_transform" || name == "no_transform") return PipelineMode::nonlinear_no_transform;
  if (name == "nonlinear_cevt" || name == "cevt") return PipelineMode::nonlinear_cevt;
  throw ConfigError("unknown pipeline mode '" + std::string(name) + "'");
}

double FittedPipeline::condition_feature(double x_raw) const {
  if (!std::isfinite(x_raw)) throw InvalidInput("condition must be finite");
  return laplace_feature(condition_cdf, x_raw);
}

double FittedPipeline::encode_response(double x_raw, double y_raw) const {
  switch (mode) {
    case PipelineMode::baseline_gaussian:
      return (y_raw - response_center) / response_scale;
    case PipelineMode::nonlinear_no_transform:
      return y_raw;
    case PipelineMode::nonlinear_cevt: {
      const double x_star = condition_feature(x_raw);
      const double y_star = laplace_feature(*response_cdf, y_raw);
      return normalize(*cevt, effective_condition(*cevt, x_star), y_star);
    }
  }
  throw ConfigError("unknown pipeline mode");
}

double FittedPipeline::decode_response(double x_raw, double z) const {
  switch (mode) {
    case PipelineMode::baseline_gaussian:
      return response_center + response_scale * z;
    case PipelineMode::nonlinear_no_transform:
      return z;
    case PipelineMode::nonlinear_cevt: {
      const double x_star = condition_feature(x_raw);
      const double y_star = denormalize(*cevt, effective_condition(*cevt, x_star), z);
      return response_cdf->inverse(laplace_cdf(y_star));
    }
  }
  throw ConfigError("unknown pipeline mode");
}

std::optional<MarginalTransform> FittedPipeline::marginal_transform() const {
  if (!response_cdf) return std::nullopt;
  return MarginalTransform(condition_cdf, *response_cdf);
}

FittedPipeline fit(std::span<const DataPoint> data, const PipelineConfig& config, Rng& rng) {
  config.drift.validate();
  config.schedule.validate_for(config.drift);
  config.train.validate();
  if (config.mode == PipelineMode::baseline_gaussian && config.drift.family != DriftFamily::gaussian) {
    throw ConfigError("the Gaussian baseline requires the gaussian drift family");
  }
  if (config.mode == PipelineMode::nonlinear_cevt && data.size() < kMinCevtPairs) {
    throw InsufficientData("tail normalization needs at least " + std::to_string(kMinCevtPairs) +
                           " pairs, got " + std::to_string(data.size()));
  }
  std::vector<double> xs(data.size());
  std::vector<double> ys(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    xs[i] = data[i].x;
    ys[i] = data[i].y;
  }

  FittedPipeline p{.mode = config.mode,
                   .condition_cdf = EmpiricalCdf::fit(xs),
                   .response_cdf = std::nullopt,
                   .cevt = std::nullopt,
                   .drift = config.drift,
                   .schedule = config.schedule,
                   .train = config.train,
                   .model = ScoreModel({2, 1}, {}),
                   .response_center = 0.0,
                   .response_scale = 1.0,
                   .loss_history = {}};

  if (config.mode == PipelineMode::nonlinear_cevt) {
    p.response_cdf = EmpiricalCdf::fit(ys);
    std::vector<DataPoint> laplace(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      laplace[i] = {laplace_feature(p.condition_cdf, xs[i]), laplace_feature(*p.response_cdf, ys[i])};
    }
    p.cevt = fit_tail_params(laplace, config.cevt);
    if (config.cevt.fit_drift_to_tail) {
      const auto residuals = residual_diagnostics(*p.cevt, tail_pairs(laplace, p.cevt->threshold_x));
      if (residuals.degenerate) throw InvalidInput("tail residuals are degenerate; cannot fit the drift to them");
      DriftSpec matched = moment_matched_drift(config.drift.family, residuals.mean, residuals.variance);
      matched.smooth_b = config.drift.smooth_b;
      matched.smooth_c = config.drift.smooth_c;
      p.drift = matched;
      p.schedule.validate_for(p.drift);
    }
  } else if (config.mode == PipelineMode::baseline_gaussian) {
    double mean = 0.0;
    for (double y : ys) mean += y;
    mean /= static_cast<double>(ys.size());
    double ss = 0.0;
    for (double y : ys) ss += (y - mean) * (y - mean);
    const double sd = std::sqrt(ss / static_cast<double>(ys.size() - 1));
    if (!(sd > 0.0)) throw InvalidInput("response has zero variance");
    p.response_center = mean;
    p.response_scale = sd;
  }

  std::vector<DataPoint> features(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    features[i] = {p.condition_feature(xs[i]), p.encode_response(xs[i], ys[i])};
  }
  TrainResult trained = train(features, p.drift, p.schedule, config.train, rng);
  p.model = std::move(trained.model);
  p.loss_history = std::move(trained.loss_history);
  return p;
}

std::vector<double> sample_conditional(const FittedPipeline& pipeline, double x_raw, std::size_t n, Rng& rng) {
  std::vector<double> conditions(n, x_raw);
  return sample_conditional(pipeline, conditions, rng);
}

std::vector<double> sample_conditional(const FittedPipeline& pipeline, std::span<const double> x_raw, Rng& rng) {
  std::vector<double> features(x_raw.size());
  for (std::size_t i = 0; i < x_raw.size(); ++i) features[i] = pipeline.condition_feature(x_raw[i]);
  std::vector<double> z = reverse_sample(pipeline.drift, pipeline.schedule,
                                         model_score(pipeline.model, pipeline.schedule.num_steps), features, rng);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = pipeline.decode_response(x_raw[i], z[i]);
  return z;
}

void save_bundle(const FittedPipeline& p, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create bundle directory " + dir.string() + ": " + ec.message());
  nlohmann::json meta = {{"format", kBundleFormat},
                         {"version", kBundleVersion},
                         {"mode", to_string(p.mode)},
                         {"drift", p.drift},
                         {"schedule", p.schedule},
                         {"train", p.train},
                         {"response_center", p.response_center},
                         {"response_scale", p.response_scale},
                         {"loss_history", p.loss_history}};
  write_json_file(dir / "pipeline.json", meta);
  write_json_file(dir / "condition.json", {{"sorted_values", p.condition_cdf.sorted_values()}});
  if (p.response_cdf) {
    write_json_file(dir / "transform.json", {{"y_sorted_values", p.response_cdf->sorted_values()}});
  }
  if (p.cevt) write_json_file(dir / "cevt.json", *p.cevt);
  save_model(p.model, dir / "model.json");
}

FittedPipeline load_bundle(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("bundle directory not found: " + dir.string());
  const nlohmann::json meta = read_json_file(dir / "pipeline.json");
  try {
    if (meta.at("format") != kBundleFormat) throw SchemaError("not a pipeline bundle: " + dir.string());
    if (meta.at("version") != kBundleVersion) throw SchemaError("unsupported bundle version");
    FittedPipeline p{.mode = parse_pipeline_mode(meta.at("mode").get<std::string>()),
                     .condition_cdf = EmpiricalCdf::from_sorted(
                         read_json_file(dir / "condition.json").at("sorted_values").get<std::vector<double>>()),
                     .response_cdf = std::nullopt,
                     .cevt = std::nullopt,
                     .drift = meta.at("drift").get<DriftSpec>(),
                     .schedule = meta.at("schedule").get<DiffusionSchedule>(),
                     .train = meta.at("train").get<TrainConfig>(),
                     .model = load_model(dir / "model.json"),
                     .response_center = meta.at("response_center").get<double>(),
                     .response_scale = meta.at("response_scale").get<double>(),
                     .loss_history = meta.at("loss_history").get<std::vector<double>>()};
    if (p.mode == PipelineMode::nonlinear_cevt) {
      p.response_cdf = EmpiricalCdf::from_sorted(
          read_json_file(dir / "transform.json").at("y_sorted_values").get<std::vector<double>>());
      p.cevt = read_json_file(dir / "cevt.json").get<CevtParams>();
    }
    p.schedule.validate_for(p.drift);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("malformed bundle " + dir.string() + ": " + e.what());
  }
}

}  // namespace tailscore
