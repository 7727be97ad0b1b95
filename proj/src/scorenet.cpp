// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/scorenet.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>

#include "tailscore/error.hpp"

namespace tailscore {

namespace {

constexpr int kCheckpointVersion = 1;

}  // namespace

std::vector<double> default_fourier_frequencies() { return {1, 2, 4, 8, 16, 32, 64, 128}; }

void embed_into(double z, double x, int t, int horizon, std::span<const double> frequencies,
                std::span<double> out) {
  out[0] = z;
  out[1] = x;
  const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(horizon);
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    out[2 + 2 * i] = std::sin(frequencies[i] * phase);
    out[3 + 2 * i] = std::cos(frequencies[i] * phase);
  }
}

std::vector<double> embed(double z, double x, int t, int horizon, std::span<const double> frequencies) {
  std::vector<double> out(2 + 2 * frequencies.size());
  embed_into(z, x, t, horizon, frequencies, out);
  return out;
}

ScoreModel::ScoreModel(std::vector<int> layer_sizes, std::vector<double> frequencies)
    : sizes_(std::move(layer_sizes)), freqs_(std::move(frequencies)) {
  if (sizes_.size() < 2) throw ConfigError("score model needs at least an input and an output layer");
  for (int s : sizes_) {
    if (s < 1) throw ConfigError("layer sizes must be positive");
  }
  if (sizes_.back() != 1) throw ConfigError("score model output must be scalar");
  if (sizes_.front() != static_cast<int>(2 + 2 * freqs_.size())) {
    throw ConfigError("input size must equal 2 + 2 * number of frequencies");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l + 1]) * static_cast<std::size_t>(sizes_[l] + 1);
  }
  params_.assign(total, 0.0);
}

ScoreModel ScoreModel::initialized(std::span<const int> hidden, std::vector<double> frequencies, Rng& rng) {
  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(2 + 2 * frequencies.size()));
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  ScoreModel model(std::move(sizes), std::move(frequencies));
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    auto w = model.weights(l);
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng.engine());
    }
  }
  return model;
}

ScoreModel::WeightMap ScoreModel::weights(std::size_t layer) {
  return WeightMap(params_.data() + weight_offset(layer), sizes_[layer + 1], sizes_[layer]);
}

ScoreModel::ConstWeightMap ScoreModel::weights(std::size_t layer) const {
  return ConstWeightMap(params_.data() + weight_offset(layer), sizes_[layer + 1], sizes_[layer]);
}

Eigen::Map<Eigen::VectorXd> ScoreModel::bias(std::size_t layer) {
  const auto off = weight_offset(layer) + static_cast<std::size_t>(sizes_[layer + 1] * sizes_[layer]);
  return Eigen::Map<Eigen::VectorXd>(params_.data() + off, sizes_[layer + 1]);
}

Eigen::Map<const Eigen::VectorXd> ScoreModel::bias(std::size_t layer) const {
  const auto off = weight_offset(layer) + static_cast<std::size_t>(sizes_[layer + 1] * sizes_[layer]);
  return Eigen::Map<const Eigen::VectorXd>(params_.data() + off, sizes_[layer + 1]);
}

double ScoreModel::forward(std::span<const double> features) const {
  if (features.size() != static_cast<std::size_t>(input_dim())) {
    throw ConfigError("feature length " + std::to_string(features.size()) + " does not match input dimension " +
                      std::to_string(input_dim()));
  }
  Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(features.data(), input_dim());
  return forward_batch(x)(0);
}

Eigen::RowVectorXd ScoreModel::forward_batch(const Eigen::MatrixXd& features) const {
  if (features.rows() != input_dim()) throw ConfigError("feature rows do not match input dimension");
  Eigen::MatrixXd a = features;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weights(l) * a;
    z.colwise() += bias(l);
    if (l + 1 < num_layers()) {
      a = z.array().tanh().matrix();
    } else {
      a = std::move(z);
    }
  }
  return a.row(0);
}

ForwardCache forward_cached(const ScoreModel& model, const Eigen::MatrixXd& features) {
  if (features.rows() != model.input_dim()) throw ConfigError("feature rows do not match input dimension");
  ForwardCache cache;
  cache.activations.reserve(model.num_layers());
  cache.activations.push_back(features);
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    Eigen::MatrixXd z = model.weights(l) * cache.activations.back();
    z.colwise() += model.bias(l);
    if (l + 1 < model.num_layers()) {
      cache.activations.push_back(z.array().tanh().matrix());
    } else {
      cache.output = z.row(0);
    }
  }
  return cache;
}

Gradients backward(const ScoreModel& model, const ForwardCache& cache, const Eigen::RowVectorXd& upstream) {
  Gradients g;
  g.parameters.assign(model.num_parameters(), 0.0);
  ScoreModel grad_view(model.layer_sizes(), model.frequencies());
  // delta: d(objective)/d(pre-activation) of the current layer, rows x batch
  Eigen::MatrixXd delta = upstream;
  for (std::size_t l = model.num_layers(); l-- > 0;) {
    const Eigen::MatrixXd& input = cache.activations[l];
    grad_view.weights(l) = delta * input.transpose();
    grad_view.bias(l) = delta.rowwise().sum();
    Eigen::MatrixXd back = model.weights(l).transpose() * delta;
    if (l > 0) {
      delta = back.array() * (1.0 - input.array().square());
    } else {
      g.input = std::move(back);
    }
  }
  g.parameters = std::move(grad_view.parameters());
  return g;
}

Gradients backward(const ScoreModel& model, std::span<const double> features, double upstream) {
  if (features.size() != static_cast<std::size_t>(model.input_dim())) {
    throw ConfigError("feature length does not match input dimension");
  }
  Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(features.data(), model.input_dim());
  const auto cache = forward_cached(model, x);
  Eigen::RowVectorXd up(1);
  up(0) = upstream;
  return backward(model, cache, up);
}

AdamOptimizer::AdamOptimizer(const ScoreModel& model, AdamConfig config)
    : config_(config), m_(model.num_parameters(), 0.0), v_(model.num_parameters(), 0.0) {}

bool AdamOptimizer::step(ScoreModel& model, std::span<const double> gradient) {
  auto& p = model.parameters();
  if (gradient.size() != p.size() || m_.size() != p.size()) {
    throw ConfigError("gradient shape does not match model parameters");
  }
  for (double g : gradient) {
    if (!std::isfinite(g)) {
      ++skipped_;
      return false;
    }
  }
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double g = gradient[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    p[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
  return true;
}

void save_model(const ScoreModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "tailscore.score_model";
  j["version"] = kCheckpointVersion;
  j["activation"] = "tanh";
  j["layer_sizes"] = model.layer_sizes();
  j["fourier_frequencies"] = model.frequencies();
  j["parameters"] = model.parameters();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model checkpoint " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw IoError("failed writing model checkpoint " + path.string());
}

ScoreModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("model checkpoint is not valid JSON: " + std::string(e.what()));
  }
  try {
    if (j.at("format") != "tailscore.score_model") throw SchemaError("not a tailscore model checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion) throw SchemaError("unsupported checkpoint version");
    ScoreModel model(j.at("layer_sizes").get<std::vector<int>>(),
                     j.at("fourier_frequencies").get<std::vector<double>>());
    auto params = j.at("parameters").get<std::vector<double>>();
    if (params.size() != model.num_parameters()) throw SchemaError("parameter count does not match layer sizes");
    model.parameters() = std::move(params);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("malformed model checkpoint: " + std::string(e.what()));
  }
}

}  // namespace tailscore
