// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "tailscore/random.hpp"

namespace tailscore {

/// Frequencies of the sin/cos time features.
std::vector<double> default_fourier_frequencies();

/// [z, x, sin(2 pi f t / T), cos(2 pi f t / T) for each f].
std::vector<double> embed(double z, double x, int t, int horizon, std::span<const double> frequencies);

/// Writes the embedding into a preallocated column of length 2 + 2 * |frequencies|.
void embed_into(double z, double x, int t, int horizon, std::span<const double> frequencies,
                std::span<double> out);

/// Feed-forward conditional score network s(z; x, t): tanh hidden layers,
/// affine scalar output.
///
/// Parameters live in one flat buffer, layer by layer, each layer as a
/// row-major (out x in) weight matrix followed by its bias vector.
class ScoreModel {
 public:
  using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using WeightMap = Eigen::Map<RowMajorMatrix>;
  using ConstWeightMap = Eigen::Map<const RowMajorMatrix>;

  /// All-zero parameters. layer_sizes runs input -> hidden... -> 1.
  ScoreModel(std::vector<int> layer_sizes, std::vector<double> frequencies);

  /// Glorot-uniform weights, zero biases.
  static ScoreModel initialized(std::span<const int> hidden, std::vector<double> frequencies, Rng& rng);

  const std::vector<int>& layer_sizes() const noexcept { return sizes_; }
  const std::vector<double>& frequencies() const noexcept { return freqs_; }
  int input_dim() const noexcept { return sizes_.front(); }
  std::size_t num_layers() const noexcept { return sizes_.size() - 1; }
  std::size_t num_parameters() const noexcept { return params_.size(); }

  std::vector<double>& parameters() noexcept { return params_; }
  const std::vector<double>& parameters() const noexcept { return params_; }

  WeightMap weights(std::size_t layer);
  ConstWeightMap weights(std::size_t layer) const;
  Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;

  /// Single feature vector. Throws ConfigError on a length mismatch.
  double forward(std::span<const double> features) const;

  /// Column-per-sample batch; returns one output per column.
  Eigen::RowVectorXd forward_batch(const Eigen::MatrixXd& features) const;

  friend bool operator==(const ScoreModel&, const ScoreModel&) = default;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

  std::vector<int> sizes_;
  std::vector<double> freqs_;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;
};

/// Activations kept from a forward pass for backpropagation.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> activations;  // activations[0] is the input
  Eigen::RowVectorXd output;
};

ForwardCache forward_cached(const ScoreModel& model, const Eigen::MatrixXd& features);

struct Gradients {
  std::vector<double> parameters;  // same layout as ScoreModel::parameters()
  Eigen::MatrixXd input;           // d(sum upstream * output)/d(features), input_dim x batch

  /// d output / d z for sample i (first input feature).
  double dz(Eigen::Index i = 0) const { return input(0, i); }
};

/// Reverse-mode gradients of sum_i upstream_i * output_i.
Gradients backward(const ScoreModel& model, const ForwardCache& cache, const Eigen::RowVectorXd& upstream);

/// Single-sample convenience.
Gradients backward(const ScoreModel& model, std::span<const double> features, double upstream);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adaptive-moment optimizer state for one model.
class AdamOptimizer {
 public:
  AdamOptimizer(const ScoreModel& model, AdamConfig config = {});

  /// Applies one update. A gradient with non-finite entries is skipped and
  /// counted; returns false in that case.
  bool step(ScoreModel& model, std::span<const double> gradient);

  void set_learning_rate(double lr) noexcept { config_.learning_rate = lr; }

  long steps() const noexcept { return steps_; }
  long skipped() const noexcept { return skipped_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  long steps_ = 0;
  long skipped_ = 0;
};

/// JSON checkpoint; load(save(m)) == m bit for bit.
void save_model(const ScoreModel& model, const std::filesystem::path& path);
ScoreModel load_model(const std::filesystem::path& path);

}  // namespace tailscore
