// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailscore/drift.hpp"
#include "tailscore/random.hpp"

namespace tailscore {

/// Standard normal draws; the samplers accept any source so tests can inject
/// fixed noise sequences.
using NormalSource = std::function<double()>;

inline NormalSource normal_source(Rng& rng) {
  return [&rng] { return rng.normal(); };
}

enum class LambdaWeighting {
  transition_variance,  // 2*eta*min(1, t)
  uniform,              // 1
};

std::string to_string(LambdaWeighting w);
LambdaWeighting parse_lambda_weighting(const std::string& name);

/// Law of the reverse chain's starting points.
enum class ReverseInit {
  smoothed,  // exp(-f) of the smoothed potential (sample_smoothed_equilibrium)
  family,    // the unsmoothed family (sample_equilibrium)
};

std::string to_string(ReverseInit init);
ReverseInit parse_reverse_init(const std::string& name);

/// Time discretization of the forward Langevin chain.
///
/// Build with create(), which rejects step sizes with eta * sup f'' >= 1 for
/// the drift the schedule will be used with.
struct DiffusionSchedule {
  double eta = 0.01;
  int num_steps = 500;
  int taylor_k = 10;
  LambdaWeighting lambda = LambdaWeighting::transition_variance;
  ReverseInit reverse_init = ReverseInit::smoothed;

  static DiffusionSchedule create(const DriftSpec& drift, double eta, int num_steps, int taylor_k = 10,
                                  LambdaWeighting lambda = LambdaWeighting::transition_variance);

  /// Throws ConfigError if the schedule is unusable for the drift.
  void validate_for(const DriftSpec& drift) const;

  /// Taylor horizon K(t) at time index t, never past num_steps.
  int taylor_horizon(int t) const;

  /// Loss weight lambda(t) > 0.
  double lambda_weight(int t) const;

  friend bool operator==(const DiffusionSchedule&, const DiffusionSchedule&) = default;
};

/// One forward draw z_t together with the Gaussian transition that produced it
/// from z_prev.
struct ForwardDraw {
  double z_t = 0.0;
  int t = 0;
  double z_prev = 0.0;
  double noise_std = 0.0;
  double transition_mean = 0.0;
};

/// Linearization of the drift around a point: a k-step OU transition.
struct OuLocalParams {
  double alpha = 0.0;
  double mu_eff = 0.0;
  double var_k = 0.0;
  int k = 1;

  double mean_from(double z) const;
};

/// z' = z - eta*grad(z) + sqrt(2 eta) * eps. `t` is the index of z; the draw
/// carries t + 1. Throws DivergenceError when the new state is not finite.
ForwardDraw forward_euler_step(const DriftSpec& drift, const DiffusionSchedule& schedule, double z, int t,
                               const NormalSource& normal);

/// Plain Euler-Maruyama path from z0 to t_star; the last increment is reported.
ForwardDraw forward_sample_euler(const DriftSpec& drift, const DiffusionSchedule& schedule, double z0,
                                 int t_star, const NormalSource& normal);

/// Local OU parameters around z for a k-step segment. Returns nullopt when the
/// curvature is not positive or alpha falls outside (0, 1); the caller must then
/// take Euler steps.
std::optional<OuLocalParams> taylor_segment(const DriftSpec& drift, const DiffusionSchedule& schedule,
                                            double z, int k);

/// Taylor-accelerated ancestral sampling of z_{t_star} given z0.
///
/// The path is cut into segments of at most K(t) steps, each sampled in one
/// shot from its linearized OU transition. A shorter remainder segment, if any,
/// is taken first so the final segment has full length; the final segment's
/// mean and standard deviation are reported in the draw.
ForwardDraw forward_sample_accelerated(const DriftSpec& drift, const DiffusionSchedule& schedule, double z0,
                                       int t_star, const NormalSource& normal);

/// Batched score evaluation s(z_i; x_i, t) written into `out`.
using BatchScoreFn =
    std::function<void(std::span<const double> z, std::span<const double> x, int t, std::span<double> out)>;

/// Per-point score s(z; x, t).
using ScoreFn = std::function<double(double z, double x, int t)>;

BatchScoreFn batch_score(ScoreFn score);

inline constexpr double kDivergenceThreshold = 1e6;

/// Reverse-time Euler-Maruyama: z <- z + eta*(2 s(z, x, t) - grad(z)) + sqrt(2 eta) eps
/// for t = T..1, one chain per entry of `conditions`, started from the
/// unsmoothed equilibrium law.
std::vector<double> reverse_sample(const DriftSpec& drift, const DiffusionSchedule& schedule,
                                   const BatchScoreFn& score, std::span<const double> conditions, Rng& rng);

/// n chains at a single condition.
std::vector<double> reverse_sample(const DriftSpec& drift, const DiffusionSchedule& schedule,
                                   const BatchScoreFn& score, double x, std::size_t n, Rng& rng);

struct TrajectoryPoint {
  std::size_t chain;
  int t;
  double z;
};

/// Forward Euler particle paths from the given starting points, recording every
/// `stride`-th step (t = 0 and t = T always included).
std::vector<TrajectoryPoint> forward_trajectories(const DriftSpec& drift, const DiffusionSchedule& schedule,
                                                  std::span<const double> starts, int stride, Rng& rng);

/// CSV with header `chain,t,z`.
void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryPoint> points);

}  // namespace tailscore
