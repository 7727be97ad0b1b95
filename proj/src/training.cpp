// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/training.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "tailscore/error.hpp"

namespace tailscore {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(final_lr_fraction > 0.0 && final_lr_fraction <= 1.0)) {
    throw ConfigError("final_lr_fraction must lie in (0, 1]");
  }
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden layer widths must be positive");
  }
  for (double f : frequencies) {
    if (!(f > 0.0)) throw ConfigError("Fourier frequencies must be positive");
  }
}

double dsm_target(const ForwardDraw& draw, const DriftSpec& drift) {
  if (!(draw.noise_std > 0.0)) throw DomainError("degenerate forward transition (zero noise)");
  const double var = draw.noise_std * draw.noise_std;
  return -(draw.z_t - draw.transition_mean) / var + grad(drift, draw.z_t);
}

TrainResult train(std::span<const DataPoint> data, const DriftSpec& drift, const DiffusionSchedule& schedule,
                  const TrainConfig& config, Rng& rng) {
  config.validate();
  drift.validate();
  schedule.validate_for(drift);
  if (data.empty()) throw InvalidInput("training data is empty");
  for (const auto& p : data) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput("training data contains non-finite values");
  }

  TrainResult result{ScoreModel::initialized(config.hidden, config.frequencies, rng), {}, 0, 0};
  ScoreModel& model = result.model;
  AdamOptimizer adam(model, AdamConfig{config.learning_rate});
  const auto normal = normal_source(rng);
  const int horizon = schedule.num_steps;
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), data.size());
  const auto dim = model.input_dim();

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Eigen::MatrixXd features(dim, static_cast<Eigen::Index>(batch));
  std::vector<double> targets(batch);
  std::vector<double> weights(batch);

  const double total_steps =
      static_cast<double>(config.epochs) * std::ceil(static_cast<double>(data.size()) / static_cast<double>(batch));
  double step = 0.0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      Eigen::Index filled = 0;
      for (std::size_t i = start; i < stop; ++i) {
        const DataPoint& p = data[order[i]];
        const int t = static_cast<int>(rng.uniform_int(1, horizon));
        ++result.draws;
        ForwardDraw draw;
        try {
          draw = config.use_taylor ? forward_sample_accelerated(drift, schedule, p.y, t, normal)
                                   : forward_sample_euler(drift, schedule, p.y, t, normal);
        } catch (const DivergenceError&) {
          ++result.dropped;
          continue;
        }
        embed_into(draw.z_t, p.x, t, horizon, model.frequencies(),
                   std::span<double>(features.col(filled).data(), static_cast<std::size_t>(dim)));
        targets[static_cast<std::size_t>(filled)] = dsm_target(draw, drift);
        weights[static_cast<std::size_t>(filled)] = schedule.lambda_weight(t);
        ++filled;
      }
      if (filled == 0) continue;
      const Eigen::MatrixXd x = features.leftCols(filled);
      const auto cache = forward_cached(model, x);
      Eigen::RowVectorXd upstream(filled);
      double batch_loss = 0.0;
      for (Eigen::Index j = 0; j < filled; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const double r = cache.output(j) - targets[ju];
        batch_loss += weights[ju] * r * r;
        upstream(j) = 2.0 * weights[ju] * r / static_cast<double>(filled);
      }
      const auto g = backward(model, cache, upstream);
      const double progress = std::min(1.0, step++ / std::max(1.0, total_steps - 1.0));
      const double f = config.final_lr_fraction;
      adam.set_learning_rate(config.learning_rate * (f + (1.0 - f) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress))));
      adam.step(model, g.parameters);
      loss_sum += batch_loss;
      loss_count += static_cast<std::size_t>(filled);
    }
    result.loss_history.push_back(loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0);
    if (static_cast<double>(result.dropped) > 0.01 * static_cast<double>(result.draws)) {
      throw TrainingError("too many divergent forward draws: " + std::to_string(result.dropped) + " of " +
                          std::to_string(result.draws));
    }
  }
  return result;
}

BatchScoreFn model_score(const ScoreModel& model, int horizon) {
  return [&model, horizon](std::span<const double> z, std::span<const double> x, int t, std::span<double> out) {
    const auto dim = model.input_dim();
    Eigen::MatrixXd features(dim, static_cast<Eigen::Index>(z.size()));
    // time features are shared by every column
    const auto time_col = embed(0.0, 0.0, t, horizon, model.frequencies());
    for (Eigen::Index i = 0; i < features.cols(); ++i) {
      const auto iu = static_cast<std::size_t>(i);
      features(0, i) = z[iu];
      features(1, i) = x[iu];
      for (Eigen::Index r = 2; r < dim; ++r) features(r, i) = time_col[static_cast<std::size_t>(r)];
    }
    const Eigen::RowVectorXd s = model.forward_batch(features);
    for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s(i);
  };
}

void write_loss_csv(std::ostream& out, std::span<const double> loss_history) {
  out << "epoch,loss\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < loss_history.size(); ++i) out << i + 1 << ',' << loss_history[i] << '\n';
  out.precision(old);
}

}  // namespace tailscore
