// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tailscore/drift.hpp"
#include "tailscore/marginals.hpp"
#include "tailscore/scorenet.hpp"
#include "tailscore/sde.hpp"

namespace tailscore {

struct TrainConfig {
  int epochs = 60;
  int batch_size = 256;
  double learning_rate = 1e-3;
  /// Cosine decay from learning_rate down to this fraction of it at the
  /// last step; 1 keeps the rate constant.
  double final_lr_fraction = 0.02;
  bool use_taylor = true;
  std::vector<int> hidden = {64, 64};
  std::vector<double> frequencies = default_fourier_frequencies();

  /// Throws ConfigError on non-positive epochs / batch size / learning rate.
  void validate() const;
};

/// Regression target of the shifted denoising score-matching loss: the score
/// of the Gaussian transition that produced z_t, plus the drift gradient.
/// Throws DomainError for a zero-variance transition.
double dsm_target(const ForwardDraw& draw, const DriftSpec& drift);

struct TrainResult {
  ScoreModel model;
  std::vector<double> loss_history;  // mean weighted loss per epoch
  std::size_t dropped = 0;           // divergent forward draws
  std::size_t draws = 0;
};

/// Fits s(z; x, t) on (x, z) pairs. Each item gets t ~ U{1..T} and a forward
/// draw z_t | z_0 (Euler or Taylor-accelerated); the loss is the
/// lambda(t)-weighted squared error against dsm_target. If the data holds fewer
/// points than batch_size, the whole set forms one batch.
///
/// Throws TrainingError when more than 1% of forward draws diverge.
TrainResult train(std::span<const DataPoint> data, const DriftSpec& drift, const DiffusionSchedule& schedule,
                  const TrainConfig& config, Rng& rng);

/// Batched score callback backed by a model, for reverse_sample().
BatchScoreFn model_score(const ScoreModel& model, int horizon);

/// CSV with header `epoch,loss` (epochs counted from 1).
void write_loss_csv(std::ostream& out, std::span<const double> loss_history);

}  // namespace tailscore
