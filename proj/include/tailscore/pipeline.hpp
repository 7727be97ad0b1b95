// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tailscore/cevt.hpp"
#include "tailscore/drift.hpp"
#include "tailscore/marginals.hpp"
#include "tailscore/scorenet.hpp"
#include "tailscore/sde.hpp"
#include "tailscore/training.hpp"

namespace tailscore {

enum class PipelineMode { baseline_gaussian, nonlinear_no_transform, nonlinear_cevt };

std::string to_string(PipelineMode mode);
PipelineMode parse_pipeline_mode(std::string_view name);

inline constexpr std::size_t kMinCevtPairs = 500;

struct PipelineConfig {
  PipelineMode mode = PipelineMode::nonlinear_cevt;
  DriftSpec drift = DriftSpec::gumbel(2.0, 1.0, 0.0, 0.4);
  DiffusionSchedule schedule;
  TrainConfig train;
  CevtFitOptions cevt;
};

/// A trained conditional sampler plus every transform needed to map raw
/// conditions in and samples out.
///
/// The condition fed to the network is always the Laplace-scale x* of the
/// training conditions' empirical CDF. In cevt mode the response goes through
/// the Laplace marginal and the tail normalization; in baseline mode it is
/// standardized; in no-transform mode it is used as is.
struct FittedPipeline {
  PipelineMode mode = PipelineMode::nonlinear_cevt;
  EmpiricalCdf condition_cdf;
  std::optional<EmpiricalCdf> response_cdf;  // cevt mode only
  std::optional<CevtParams> cevt;            // cevt mode only
  DriftSpec drift;
  DiffusionSchedule schedule;
  TrainConfig train;
  ScoreModel model;
  double response_center = 0.0;  // baseline standardization
  double response_scale = 1.0;
  std::vector<double> loss_history;

  /// Network condition input for a raw condition value.
  double condition_feature(double x_raw) const;

  /// Training-space response for a raw (x, y) pair.
  double encode_response(double x_raw, double y_raw) const;

  /// Raw response for a diffusion output at a raw condition.
  double decode_response(double x_raw, double z) const;

  /// Full marginal transform (cevt mode only).
  std::optional<MarginalTransform> marginal_transform() const;
};

/// Runs the preprocessing for the mode, then trains the score model. In cevt
/// mode the drift location/scale may be refit to the tail residuals (see
/// CevtFitOptions::fit_drift_to_tail); the fitted drift is stored.
///
/// Throws InsufficientData for cevt mode with fewer than 500 pairs, ConfigError
/// for baseline mode with a non-Gaussian drift, plus any module error.
FittedPipeline fit(std::span<const DataPoint> data, const PipelineConfig& config, Rng& rng);

/// n samples of Y | X = x_raw.
std::vector<double> sample_conditional(const FittedPipeline& pipeline, double x_raw, std::size_t n, Rng& rng);

/// One sample per raw condition.
std::vector<double> sample_conditional(const FittedPipeline& pipeline, std::span<const double> x_raw, Rng& rng);

/// Directory bundle: pipeline.json, condition.json, model.json, and in cevt mode
/// transform.json + cevt.json. Reloads bit for bit.
void save_bundle(const FittedPipeline& pipeline, const std::filesystem::path& dir);
FittedPipeline load_bundle(const std::filesystem::path& dir);

}  // namespace tailscore
