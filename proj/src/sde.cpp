// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/sde.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tailscore/error.hpp"

namespace tailscore {

std::string to_string(LambdaWeighting w) {
  switch (w) {
    case LambdaWeighting::transition_variance:
      return "transition_variance";
    case LambdaWeighting::uniform:
      return "uniform";
  }
  return "unknown";
}

LambdaWeighting parse_lambda_weighting(const std::string& name) {
  if (name == "transition_variance") return LambdaWeighting::transition_variance;
  if (name == "uniform") return LambdaWeighting::uniform;
  throw ConfigError("unknown lambda weighting '" + name + "'");
}

std::string to_string(ReverseInit init) {
  return init == ReverseInit::smoothed ? "smoothed" : "family";
}

ReverseInit parse_reverse_init(const std::string& name) {
  if (name == "smoothed") return ReverseInit::smoothed;
  if (name == "family") return ReverseInit::family;
  throw ConfigError("unknown reverse init '" + name + "' (expected smoothed or family)");
}

DiffusionSchedule DiffusionSchedule::create(const DriftSpec& drift, double eta, int num_steps, int taylor_k,
                                            LambdaWeighting lambda) {
  DiffusionSchedule s{eta, num_steps, taylor_k, lambda};
  s.validate_for(drift);
  return s;
}

void DiffusionSchedule::validate_for(const DriftSpec& drift) const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("step size eta must be positive");
  if (num_steps < 1) throw ConfigError("num_steps must be at least 1");
  if (taylor_k < 1) throw ConfigError("Taylor horizon must be at least 1");
  const double sup = curvature_bounds(drift).upper;
  if (!(eta * sup < 1.0)) {
    throw ConfigError("step size too large for drift: eta * sup f'' = " + std::to_string(eta * sup) +
                      " must be < 1");
  }
}

int DiffusionSchedule::taylor_horizon(int t) const {
  return std::max(1, std::min(taylor_k, num_steps - t));
}

double DiffusionSchedule::lambda_weight(int t) const {
  switch (lambda) {
    case LambdaWeighting::transition_variance:
      return 2.0 * eta * std::min(1.0, static_cast<double>(t));
    case LambdaWeighting::uniform:
      return 1.0;
  }
  return 1.0;
}

double OuLocalParams::mean_from(double z) const {
  const double ak = std::pow(alpha, k);
  return ak * z + (1.0 - ak) * mu_eff;
}

ForwardDraw forward_euler_step(const DriftSpec& drift, const DiffusionSchedule& schedule, double z, int t,
                               const NormalSource& normal) {
  const double mean = z - schedule.eta * grad(drift, z);
  const double sd = std::sqrt(2.0 * schedule.eta);
  const double next = mean + sd * normal();
  if (!std::isfinite(next)) throw DivergenceError("forward Euler step diverged", t + 1, next);
  return {next, t + 1, z, sd, mean};
}

ForwardDraw forward_sample_euler(const DriftSpec& drift, const DiffusionSchedule& schedule, double z0,
                                 int t_star, const NormalSource& normal) {
  if (t_star < 0 || t_star > schedule.num_steps) throw DomainError("t_star outside [0, num_steps]");
  ForwardDraw draw{z0, 0, z0, 0.0, z0};
  for (int t = 0; t < t_star; ++t) draw = forward_euler_step(drift, schedule, draw.z_t, t, normal);
  return draw;
}

std::optional<OuLocalParams> taylor_segment(const DriftSpec& drift, const DiffusionSchedule& schedule,
                                            double z, int k) {
  if (k < 1) throw DomainError("Taylor segment length must be positive");
  const double h = hessian(drift, z);
  if (!(h > 0.0)) return std::nullopt;
  const double alpha = 1.0 - schedule.eta * h;
  if (!(alpha > 0.0 && alpha < 1.0)) return std::nullopt;
  OuLocalParams p;
  p.alpha = alpha;
  p.mu_eff = z - grad(drift, z) / h;
  p.k = k;
  const double a2 = alpha * alpha;
  p.var_k = 2.0 * schedule.eta * (1.0 - std::pow(a2, k)) / (1.0 - a2);
  return p;
}

ForwardDraw forward_sample_accelerated(const DriftSpec& drift, const DiffusionSchedule& schedule, double z0,
                                       int t_star, const NormalSource& normal) {
  if (t_star < 0 || t_star > schedule.num_steps) throw DomainError("t_star outside [0, num_steps]");
  ForwardDraw draw{z0, 0, z0, 0.0, z0};
  int t = 0;
  while (t < t_star) {
    const int full = schedule.taylor_horizon(t);
    const int remaining = t_star - t;
    // Remainder first: the last segment is the longest available.
    int k = remaining % full;
    if (k == 0) k = std::min(full, remaining);
    const auto seg = taylor_segment(drift, schedule, draw.z_t, k);
    if (!seg) {
      draw = forward_euler_step(drift, schedule, draw.z_t, t, normal);
      ++t;
      continue;
    }
    const double mean = seg->mean_from(draw.z_t);
    const double sd = std::sqrt(seg->var_k);
    const double next = mean + sd * normal();
    if (!std::isfinite(next)) throw DivergenceError("accelerated forward sampling diverged", t + k, next);
    draw = {next, t + k, draw.z_t, sd, mean};
    t += k;
  }
  return draw;
}

BatchScoreFn batch_score(ScoreFn score) {
  return [score = std::move(score)](std::span<const double> z, std::span<const double> x, int t,
                                    std::span<double> out) {
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = score(z[i], x[i], t);
  };
}

std::vector<double> reverse_sample(const DriftSpec& drift, const DiffusionSchedule& schedule,
                                   const BatchScoreFn& score, std::span<const double> conditions, Rng& rng) {
  const std::size_t n = conditions.size();
  std::vector<double> z = schedule.reverse_init == ReverseInit::smoothed
                              ? sample_smoothed_equilibrium(drift, rng, n)
                              : sample_equilibrium(drift, rng, n);
  if (n == 0) return z;
  std::vector<double> s(n);
  const double eta = schedule.eta;
  const double sd = std::sqrt(2.0 * eta);
  for (int t = schedule.num_steps; t >= 1; --t) {
    score(z, conditions, t, s);
    for (std::size_t i = 0; i < n; ++i) {
      const double next = z[i] + eta * (2.0 * s[i] - grad(drift, z[i])) + sd * rng.normal();
      if (!std::isfinite(next) || std::abs(next) > kDivergenceThreshold) {
        throw DivergenceError("reverse sampling diverged in chain " + std::to_string(i) + " at condition " +
                                  std::to_string(conditions[i]),
                              t, next);
      }
      z[i] = next;
    }
  }
  return z;
}

std::vector<double> reverse_sample(const DriftSpec& drift, const DiffusionSchedule& schedule,
                                   const BatchScoreFn& score, double x, std::size_t n, Rng& rng) {
  const std::vector<double> conditions(n, x);
  return reverse_sample(drift, schedule, score, conditions, rng);
}

std::vector<TrajectoryPoint> forward_trajectories(const DriftSpec& drift, const DiffusionSchedule& schedule,
                                                  std::span<const double> starts, int stride, Rng& rng) {
  if (stride < 1) throw ConfigError("trajectory stride must be at least 1");
  std::vector<TrajectoryPoint> out;
  const auto normal = normal_source(rng);
  for (std::size_t c = 0; c < starts.size(); ++c) {
    double z = starts[c];
    out.push_back({c, 0, z});
    for (int t = 0; t < schedule.num_steps; ++t) {
      z = forward_euler_step(drift, schedule, z, t, normal).z_t;
      if ((t + 1) % stride == 0 || t + 1 == schedule.num_steps) out.push_back({c, t + 1, z});
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryPoint> points) {
  out << "chain,t,z\n";
  const auto old = out.precision(17);
  for (const auto& p : points) out << p.chain << ',' << p.t << ',' << p.z << '\n';
  out.precision(old);
}

}  // namespace tailscore
