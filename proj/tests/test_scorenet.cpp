// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "tailscore/error.hpp"
#include "tailscore/random.hpp"
#include "tailscore/scorenet.hpp"

using namespace tailscore;

namespace {

double max_relative_fd_error(ScoreModel model, const std::vector<double>& features, double upstream) {
  const auto g = backward(model, features, upstream);
  double worst = 0.0;
  auto& p = model.parameters();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    const double h = 1e-5;
    p[i] = saved + h;
    const double up = model.forward(features);
    p[i] = saved - h;
    const double down = model.forward(features);
    p[i] = saved;
    const double fd = upstream * (up - down) / (2 * h);
    const double err = std::abs(fd - g.parameters[i]) / std::max(1.0, std::abs(fd));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace

TEST_CASE("embedding layout") {
  const auto f = default_fourier_frequencies();
  CHECK(f == std::vector<double>{1, 2, 4, 8, 16, 32, 64, 128});
  const auto e0 = embed(0.3, -1.2, 0, 500, f);
  REQUIRE(e0.size() == 18);
  CHECK(e0[0] == 0.3);
  CHECK(e0[1] == -1.2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(e0[2 + 2 * i] == 0.0);
    CHECK(e0[3 + 2 * i] == 1.0);
  }
  const std::vector<double> one = {1.0};
  const auto eT = embed(0.0, 0.0, 500, 500, one);
  CHECK(std::abs(eT[2]) < 1e-12);
  CHECK(eT[3] == doctest::Approx(1.0));
  const auto mid = embed(0.0, 0.0, 125, 500, one);
  CHECK(mid[2] == doctest::Approx(1.0));
}

TEST_CASE("forward basics") {
  const ScoreModel zero({18, 64, 64, 1}, default_fourier_frequencies());
  Rng rng(1);
  for (int i = 0; i < 10; ++i) CHECK(zero.forward(embed(rng.normal(), rng.normal(), 3, 10, zero.frequencies())) == 0.0);

  ScoreModel linear({18, 1}, default_fourier_frequencies());
  linear.weights(0)(0, 0) = 1.0;
  CHECK(linear.forward(embed(0.77, 3.0, 4, 10, linear.frequencies())) == doctest::Approx(0.77));
  CHECK(backward(linear, embed(0.77, 3.0, 4, 10, linear.frequencies()), 1.0).dz() == 1.0);

  CHECK_THROWS_AS(linear.forward(std::vector<double>(5, 0.0)), ConfigError);
  CHECK_THROWS_AS(ScoreModel({7, 1}, default_fourier_frequencies()), ConfigError);
}

TEST_CASE("random model outputs are finite") {
  Rng rng(2);
  const std::vector<int> hidden = {64, 64};
  const auto m = ScoreModel::initialized(hidden, default_fourier_frequencies(), rng);
  Eigen::MatrixXd batch(18, 1000);
  for (int i = 0; i < 1000; ++i) {
    const auto e = embed(5 * rng.normal(), 5 * rng.normal(), static_cast<int>(i % 500), 500, m.frequencies());
    for (int r = 0; r < 18; ++r) batch(r, i) = e[static_cast<std::size_t>(r)];
  }
  const auto out = m.forward_batch(batch);
  for (int i = 0; i < out.size(); ++i) CHECK(std::isfinite(out(i)));
  // batch and single evaluation agree
  std::vector<double> col(18);
  for (int r = 0; r < 18; ++r) col[static_cast<std::size_t>(r)] = batch(r, 7);
  CHECK(m.forward(col) == doctest::Approx(out(7)).epsilon(1e-14));
}

TEST_CASE("glorot initialization bounds and zero biases") {
  Rng rng(3);
  const std::vector<int> hidden = {64, 64};
  const auto m = ScoreModel::initialized(hidden, default_fourier_frequencies(), rng);
  const std::vector<int> sizes = {18, 64, 64, 1};
  for (std::size_t l = 0; l < m.num_layers(); ++l) {
    const double limit = std::sqrt(6.0 / (sizes[l] + sizes[l + 1]));
    CHECK(m.weights(l).cwiseAbs().maxCoeff() <= limit);
    CHECK(m.bias(l).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("backprop matches central finite differences") {
  Rng rng(4);
  const std::vector<int> hidden = {16, 16};
  for (int fixture = 0; fixture < 10; ++fixture) {
    auto m = ScoreModel::initialized(hidden, {1.0, 2.0, 4.0}, rng);
    for (auto& p : m.parameters()) p += 0.1 * rng.normal();
    const auto f = embed(rng.normal(), rng.normal(), fixture, 10, m.frequencies());
    CHECK(max_relative_fd_error(m, f, 1.0 + fixture * 0.1) < 1e-5);
  }
}

TEST_CASE("input gradient matches finite differences in z") {
  Rng rng(5);
  const std::vector<int> hidden = {32};
  const auto m = ScoreModel::initialized(hidden, default_fourier_frequencies(), rng);
  for (int i = 0; i < 10; ++i) {
    const double z = rng.normal();
    const double x = rng.normal();
    const double h = 1e-6;
    const double fd = (m.forward(embed(z + h, x, 3, 10, m.frequencies())) - m.forward(embed(z - h, x, 3, 10, m.frequencies()))) / (2 * h);
    CHECK(backward(m, embed(z, x, 3, 10, m.frequencies()), 1.0).dz() == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("zero upstream gives zero gradients") {
  Rng rng(6);
  const std::vector<int> hidden = {8};
  const auto m = ScoreModel::initialized(hidden, {1.0}, rng);
  const auto g = backward(m, embed(0.4, 0.1, 1, 2, m.frequencies()), 0.0);
  for (double v : g.parameters) CHECK(v == 0.0);
}

TEST_CASE("adam first step and zero gradient") {
  // First Adam step moves every parameter by lr * sign(g).
  ScoreModel m({4, 1}, {0.5});
  m.parameters() = {0.1, 0.2, 0.3, 0.4, 0.5};
  AdamOptimizer opt(m);
  const std::vector<double> g = {2.0, -3.0, 0.5, -0.01, 1e-4};
  REQUIRE(opt.step(m, g));
  const std::vector<double> expected = {0.1 - 1e-3, 0.2 + 1e-3, 0.3 - 1e-3, 0.4 + 1e-3, 0.5 - 1e-3};
  for (std::size_t i = 0; i < 5; ++i) CHECK(m.parameters()[i] == doctest::Approx(expected[i]).epsilon(1e-5));

  ScoreModel still({4, 1}, {0.5});
  still.parameters() = {0.1, 0.2, 0.3, 0.4, 0.5};
  AdamOptimizer opt2(still);
  opt2.step(still, std::vector<double>(5, 0.0));
  CHECK(still.parameters() == std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5});

  const std::vector<double> bad = {1.0, NAN, 0.0, 0.0, 0.0};
  CHECK_FALSE(opt2.step(still, bad));
  CHECK(opt2.skipped() == 1);
  CHECK(still.parameters() == std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5});
}

TEST_CASE("identical runs give bit-identical parameters") {
  auto run = [] {
    Rng rng(10);
    const std::vector<int> hidden = {8};
    auto m = ScoreModel::initialized(hidden, {1.0}, rng);
    AdamOptimizer opt(m);
    for (int i = 0; i < 20; ++i) {
      const auto g = backward(m, embed(rng.normal(), 0.0, 1, 2, m.frequencies()), 1.0);
      opt.step(m, g.parameters);
    }
    return m.parameters();
  };
  CHECK(run() == run());
}

TEST_CASE("capacity: fits s(z) = -z") {
  Rng rng(7);
  const std::vector<int> hidden = {64, 64};
  auto m = ScoreModel::initialized(hidden, default_fourier_frequencies(), rng);
  AdamOptimizer opt(m, {1e-2});
  Eigen::MatrixXd x(18, 1000);
  Eigen::RowVectorXd y(1000);
  for (int i = 0; i < 1000; ++i) {
    const double z = 2.0 * rng.uniform_open() - 1.0;
    const auto e = embed(z, rng.normal(), static_cast<int>(rng.uniform_int(1, 100)), 100, m.frequencies());
    for (int r = 0; r < 18; ++r) x(r, i) = e[static_cast<std::size_t>(r)];
    y(i) = -z;
  }
  double mse = 1.0;
  for (int step = 0; step < 2000 && mse >= 1e-3; ++step) {
    const auto cache = forward_cached(m, x);
    const Eigen::RowVectorXd r = cache.output - y;
    mse = r.squaredNorm() / 1000.0;
    opt.step(m, backward(m, cache, 2.0 * r / 1000.0).parameters);
  }
  CHECK(mse < 1e-3);
}

TEST_CASE("checkpoint round trip is bit exact") {
  Rng rng(8);
  const std::vector<int> hidden = {5, 4};
  const auto m = ScoreModel::initialized(hidden, {1.0, 3.0}, rng);
  const auto path = std::filesystem::temp_directory_path() / "tailscore_model_test.json";
  save_model(m, path);
  const auto back = load_model(path);
  CHECK(back == m);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_model(path), IoError);
}
