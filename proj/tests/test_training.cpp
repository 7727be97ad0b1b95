// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "tailscore/error.hpp"
#include "tailscore/random.hpp"
#include "tailscore/training.hpp"

using namespace tailscore;

TEST_CASE("dsm target examples") {
  const auto drift = DriftSpec::gaussian();
  ForwardDraw d;
  d.z_t = 0.4;
  d.transition_mean = 0.4;
  d.noise_std = 0.3;
  CHECK(dsm_target(d, drift) == doctest::Approx(grad(drift, 0.4)));

  const auto sched = DiffusionSchedule::create(drift, 0.01, 100);
  const double eps = 0.83;
  const auto e = forward_euler_step(drift, sched, 1.2, 0, [&] { return eps; });
  CHECK(dsm_target(e, drift) == doctest::Approx(-eps / std::sqrt(0.02) + e.z_t).epsilon(1e-12));

  d.noise_std = 0.0;
  CHECK_THROWS_AS(dsm_target(d, drift), DomainError);
}

TEST_CASE("dsm target averages to the marginal score shift on OU") {
  // z0 ~ N(0, s0^2); after t Euler steps p_t = N(0, v_t); E[target | z_t] = z_t - z_t / v_t.
  const auto drift = DriftSpec::gaussian();
  const auto sched = DiffusionSchedule::create(drift, 0.01, 200);
  const double s0 = 0.5;
  const int t = 50;
  const auto mom = oracle::ou_recursion(1.0, 0.01, t);
  const double decay = mom.mean;  // (1 - eta)^t
  const double vt = decay * decay * s0 * s0 + mom.var;
  Rng rng(3);
  std::vector<double> bin;
  const double lo = 0.45;
  const double hi = 0.55;
  std::vector<double> zs;
  for (int i = 0; i < 100000; ++i) {
    const auto d = forward_sample_accelerated(drift, sched, s0 * rng.normal(), t, normal_source(rng));
    if (d.z_t > lo && d.z_t < hi) {
      bin.push_back(dsm_target(d, drift));
      zs.push_back(d.z_t);
    }
  }
  const double zbar = oracle::mean(zs);
  const double expect = zbar - zbar / vt;
  const double se = std::sqrt(oracle::variance(bin) / bin.size());
  CHECK(std::abs(oracle::mean(bin) - expect) < 3 * se + 0.01);
}

TEST_CASE("training smoke: single point and loss decrease") {
  const auto drift = DriftSpec::gaussian();
  const auto sched = DiffusionSchedule::create(drift, 0.01, 100);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.hidden = {16};
  Rng rng(4);
  const std::vector<DataPoint> one = {{0.0, 0.5}};
  const auto r1 = train(one, drift, sched, cfg, rng);
  CHECK(r1.loss_history.size() == 3);
  for (double l : r1.loss_history) CHECK(std::isfinite(l));

  std::vector<DataPoint> data(2000);
  for (auto& p : data) {
    p.x = rng.normal();
    p.y = 0.3 * p.x + 0.2 * rng.normal();
  }
  cfg.epochs = 15;
  cfg.hidden = {32, 32};
  const auto r = train(data, drift, sched, cfg, rng);
  CHECK(r.loss_history.back() <= r.loss_history.front());
  for (double l : r.loss_history) CHECK(l >= 0.0);
  std::ostringstream out;
  write_loss_csv(out, r.loss_history);
  CHECK(out.str().rfind("epoch,loss\n1,", 0) == 0);
}

TEST_CASE("training is reproducible") {
  const auto drift = DriftSpec::laplace();
  const auto sched = DiffusionSchedule::create(drift, 0.01, 50);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.hidden = {8};
  std::vector<DataPoint> data;
  for (int i = 0; i < 300; ++i) data.push_back({0.01 * i, std::sin(0.1 * i)});
  Rng a(5);
  Rng b(5);
  const auto ra = train(data, drift, sched, cfg, a);
  const auto rb = train(data, drift, sched, cfg, b);
  CHECK(ra.loss_history == rb.loss_history);
  CHECK(ra.model == rb.model);
}

TEST_CASE("invalid training configs") {
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.learning_rate = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  for (double f : {0.0, -0.1, 1.5, double(NAN)}) {
    cfg = TrainConfig{};
    cfg.final_lr_fraction = f;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  cfg.final_lr_fraction = 1.0;
  CHECK_NOTHROW(cfg.validate());
  const auto drift = DriftSpec::gaussian();
  const auto sched = DiffusionSchedule::create(drift, 0.01, 50);
  Rng rng(1);
  CHECK_THROWS_AS(train(std::vector<DataPoint>{}, drift, sched, TrainConfig{}, rng), InvalidInput);
  const std::vector<DataPoint> bad = {{0.0, NAN}};
  CHECK_THROWS_AS(train(bad, drift, sched, TrainConfig{}, rng), InvalidInput);
}

TEST_CASE("trained OU score matches the closed form" * doctest::timeout(600)) {
  // Gaussian data N(0, s0^2) with Gaussian drift: B_t(z) = z (1 - 1/v_t).
  // Pointwise on z in [-2, 2]. For t < 100 the box edge sits well outside
  // p_t, and t near T is skipped because its time features wrap around to
  // those of t = 0.
  const auto drift = DriftSpec::gaussian();
  const auto sched = DiffusionSchedule::create(drift, 0.01, 500);
  const double s0 = 0.5;
  Rng rng(6);
  std::vector<DataPoint> data(20000);
  for (auto& p : data) p = {rng.normal(), s0 * rng.normal()};
  const auto r = train(data, drift, sched, TrainConfig{}, rng);
  const auto score = model_score(r.model, sched.num_steps);
  double worst = 0.0;
  for (int t : {100, 200, 300, 400, 475}) {
    const auto mom = oracle::ou_recursion(1.0, 0.01, t);
    const double vt = mom.mean * mom.mean * s0 * s0 + mom.var;
    std::vector<double> z;
    for (double u = -2.0; u <= 2.0 + 1e-9; u += 0.25) z.push_back(u);
    const std::vector<double> x(z.size(), 0.0);
    std::vector<double> out(z.size());
    score(z, x, t, out);
    for (std::size_t i = 0; i < z.size(); ++i) worst = std::max(worst, std::abs(out[i] - z[i] * (1 - 1 / vt)));
  }
  CHECK(worst < 0.15);
}
