// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/cevt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tailscore/error.hpp"
#include "tailscore/eval.hpp"
#include "tailscore/optimize.hpp"

namespace tailscore {

namespace {

constexpr double kVarianceFloor = 1e-24;
constexpr double kEulerGamma = 0.57721566490153286;

void project_box(std::vector<double>& p) {
  p[0] = std::clamp(p[0], -1.0, 1.0);
  p[1] = std::min(p[1], kMaxTailExponent);
}

struct ResidualMoments {
  double mean;
  double variance;  // maximum-likelihood (divide by n)
};

ResidualMoments residual_moments(std::span<const DataPoint> tail, double a, double b) {
  double sum = 0.0;
  for (const auto& p : tail) sum += (p.y - a * p.x) / std::pow(p.x, b);
  const double mean = sum / static_cast<double>(tail.size());
  double ss = 0.0;
  for (const auto& p : tail) {
    const double d = (p.y - a * p.x) / std::pow(p.x, b) - mean;
    ss += d * d;
  }
  return {mean, ss / static_cast<double>(tail.size())};
}

}  // namespace

std::vector<DataPoint> tail_pairs(std::span<const DataPoint> laplace_pairs, double threshold_x) {
  std::vector<DataPoint> out;
  for (const auto& p : laplace_pairs) {
    if (p.x > threshold_x) out.push_back(p);
  }
  return out;
}

double tail_negative_log_likelihood(std::span<const DataPoint> tail, double a, double b, double mu_z,
                                    double sigma_z) {
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  double nll = 0.0;
  for (const auto& p : tail) {
    const double xb = std::pow(p.x, b);
    const double sd = sigma_z * xb;
    const double r = (p.y - a * p.x - mu_z * xb) / sd;
    nll += std::log(sd) + 0.5 * r * r + half_log_2pi;
  }
  return nll;
}

double profile_negative_log_likelihood(std::span<const DataPoint> tail, double a, double b) {
  const auto m = residual_moments(tail, a, b);
  const auto n = static_cast<double>(tail.size());
  double sum_log_x = 0.0;
  for (const auto& p : tail) sum_log_x += std::log(p.x);
  const double var = std::max(m.variance, kVarianceFloor);
  return b * sum_log_x + 0.5 * n * std::log(var) + 0.5 * n * (1.0 + std::log(2.0 * std::numbers::pi));
}

CevtParams fit_tail_params(std::span<const DataPoint> laplace_pairs, const CevtFitOptions& options) {
  if (!(options.threshold_q > 0.0 && options.threshold_q < 1.0)) {
    throw ConfigError("threshold quantile must lie in (0, 1)");
  }
  CevtParams params;
  params.threshold_q = options.threshold_q;
  params.threshold_x = laplace_quantile(options.threshold_q);
  const auto tail = tail_pairs(laplace_pairs, params.threshold_x);
  if (tail.size() < kMinTailSamples) {
    throw InsufficientData("tail fit needs at least " + std::to_string(kMinTailSamples) + " samples above x* = " +
                           std::to_string(params.threshold_x) + ", got " + std::to_string(tail.size()));
  }
  for (const auto& p : tail) {
    if (!(p.x > 0.0)) throw InvalidInput("tail samples must have positive x*");
    if (!std::isfinite(p.y)) throw InvalidInput("tail samples must be finite");
  }
  params.tail_count = tail.size();

  const bool fixed = options.fix_standard_normal;
  auto grid_value = [&](double a, double b) {
    return fixed ? tail_negative_log_likelihood(tail, a, b, 0.0, 1.0) : profile_negative_log_likelihood(tail, a, b);
  };

  // coarse 9x9 grid over the box
  double best_a = 0.0;
  double best_b = 0.0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 9; ++i) {
    const double a = -1.0 + 2.0 * i / 8.0;
    for (int j = 0; j < 9; ++j) {
      const double b = -1.0 + (kMaxTailExponent + 1.0) * j / 8.0;
      const double v = grid_value(a, b);
      if (v < best_v) {
        best_v = v;
        best_a = a;
        best_b = b;
      }
    }
  }

  std::vector<double> start{best_a, best_b};
  std::function<double(const std::vector<double>&)> objective;
  if (fixed) {
    objective = [&](const std::vector<double>& p) { return tail_negative_log_likelihood(tail, p[0], p[1], 0.0, 1.0); };
  } else {
    const auto m = residual_moments(tail, best_a, best_b);
    start.push_back(m.mean);
    start.push_back(0.5 * std::log(std::max(m.variance, kVarianceFloor)));
    objective = [&](const std::vector<double>& p) {
      return tail_negative_log_likelihood(tail, p[0], p[1], p[2], std::exp(p[3]));
    };
  }

  NelderMeadOptions nm;
  nm.max_evaluations = options.max_evaluations;
  auto result = nelder_mead(objective, start, nm, project_box);
  if (result.converged) {
    // restart from the optimum with a fresh simplex to escape premature collapse
    nm.initial_step = 0.02;
    auto polished = nelder_mead(objective, result.x, nm, project_box);
    if (polished.value <= result.value) result = std::move(polished);
  }
  if (!result.converged) {
    throw ConvergenceError("tail-parameter likelihood did not converge within " +
                               std::to_string(options.max_evaluations) + " evaluations",
                           result.x, result.value);
  }
  params.a = result.x[0];
  params.b = result.x[1];
  if (!fixed) {
    params.mu_z = result.x[2];
    params.sigma_z = std::exp(result.x[3]);
  }
  params.nll = result.value;
  return params;
}

double normalize(const CevtParams& params, double x_star, double y_star) {
  if (!(x_star > 0.0)) throw DomainError("normalize needs x* > 0");
  return (y_star - params.a * x_star) / std::pow(x_star, params.b);
}

double denormalize(const CevtParams& params, double x_star, double z) {
  if (!(x_star > 0.0)) throw DomainError("denormalize needs x* > 0");
  return params.a * x_star + std::pow(x_star, params.b) * z;
}

DriftSpec moment_matched_drift(DriftFamily family, double mean, double variance) {
  const double sd = std::sqrt(variance);
  switch (family) {
    case DriftFamily::gaussian:
      return DriftSpec::gaussian(mean, sd);
    case DriftFamily::laplace_smoothed:
      return DriftSpec::laplace(0.5, 0.1, mean, sd / std::numbers::sqrt2);
    case DriftFamily::gumbel_smoothed: {
      const double scale = sd * std::sqrt(6.0) / std::numbers::pi;
      return DriftSpec::gumbel(2.0, 1.0, mean - kEulerGamma * scale, scale);
    }
  }
  return DriftSpec::gaussian();
}

ResidualSummary residual_diagnostics(const CevtParams& params, std::span<const DataPoint> tail) {
  if (tail.size() < kMinTailSamples) {
    throw InsufficientData("residual diagnostics need at least " + std::to_string(kMinTailSamples) + " pairs");
  }
  std::vector<double> z;
  z.reserve(tail.size());
  for (const auto& p : tail) z.push_back(normalize(params, p.x, p.y));

  ResidualSummary s;
  s.count = z.size();
  const auto n = static_cast<double>(z.size());
  double sum = 0.0;
  for (double v : z) sum += v;
  s.mean = sum / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : z) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  s.variance = m2 / (n - 1.0);
  const double pop_var = m2 / n;
  if (!(s.variance > 1e-12 * std::max(1.0, s.mean * s.mean))) {
    s.degenerate = true;
    s.warnings.push_back("degenerate residual variance; no drift family suggested");
    return s;
  }
  s.skewness = (m3 / n) / std::pow(pop_var, 1.5);

  const double sd = std::sqrt(s.variance);
  const double mean = s.mean;
  s.ks_gaussian = ks_statistic_cdf(z, [&](double v) { return 0.5 * std::erfc(-(v - mean) / (sd * std::numbers::sqrt2)); });
  const double lap_scale = sd / std::numbers::sqrt2;
  s.ks_laplace = ks_statistic_cdf(z, [&](double v) { return laplace_cdf((v - mean) / lap_scale); });
  const double gum_scale = sd * std::sqrt(6.0) / std::numbers::pi;
  const double gum_loc = mean - kEulerGamma * gum_scale;
  s.ks_gumbel = ks_statistic_cdf(z, [&](double v) { return std::exp(-std::exp(-(v - gum_loc) / gum_scale)); });

  s.suggested = DriftFamily::gaussian;
  double best = s.ks_gaussian;
  if (s.ks_laplace < best) {
    best = s.ks_laplace;
    s.suggested = DriftFamily::laplace_smoothed;
  }
  if (s.ks_gumbel < best) s.suggested = DriftFamily::gumbel_smoothed;
  return s;
}

}  // namespace tailscore
