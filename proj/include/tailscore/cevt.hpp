// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailscore/drift.hpp"
#include "tailscore/marginals.hpp"

namespace tailscore {

/// Heffernan-Tawn normalization Y* = a*X* + (X*)^b * Z on Laplace margins,
/// with residual nuisance Z ~ Normal(mu_z, sigma_z^2) in the working likelihood.
struct CevtParams {
  double a = 0.0;
  double b = 0.0;
  double mu_z = 0.0;
  double sigma_z = 1.0;
  double threshold_q = 0.95;
  double threshold_x = 0.0;      // Laplace-scale threshold, laplace_quantile(threshold_q)
  double nll = 0.0;              // achieved negative log-likelihood on the tail set
  std::size_t tail_count = 0;

  friend bool operator==(const CevtParams&, const CevtParams&) = default;
};

inline constexpr double kMaxTailExponent = 1.0 - 1e-6;
inline constexpr std::size_t kMinTailSamples = 30;

struct CevtFitOptions {
  double threshold_q = 0.95;
  /// Hold mu_z = 0, sigma_z = 1 instead of fitting them.
  bool fix_standard_normal = false;
  /// Set the drift location and scale from the moments of the fitted tail
  /// residuals (family and smoothing stay as configured).
  bool fit_drift_to_tail = true;
  int max_evaluations = 20000;
};

/// Pairs whose x* lies strictly above threshold_x.
std::vector<DataPoint> tail_pairs(std::span<const DataPoint> laplace_pairs, double threshold_x);

/// Gaussian working negative log-likelihood of the tail set.
double tail_negative_log_likelihood(std::span<const DataPoint> tail, double a, double b, double mu_z,
                                    double sigma_z);

/// Negative log-likelihood at (a, b) with (mu_z, sigma_z) at their closed-form
/// maximizers.
double profile_negative_log_likelihood(std::span<const DataPoint> tail, double a, double b);

/// Maximum-likelihood (a, b[, mu_z, sigma_z]) over a in [-1, 1], b <= 1 - 1e-6.
///
/// Throws InsufficientData with fewer than 30 tail pairs, InvalidInput for a
/// non-positive tail x*, ConvergenceError when the optimizer runs out of budget.
CevtParams fit_tail_params(std::span<const DataPoint> laplace_pairs, const CevtFitOptions& options = {});

/// z = (y* - a x*) / x*^b. Throws DomainError unless x* > 0.
double normalize(const CevtParams& params, double x_star, double y_star);

/// y* = a x* + x*^b z. Throws DomainError unless x* > 0.
double denormalize(const CevtParams& params, double x_star, double z);

struct ResidualSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double ks_gaussian = 1.0;
  double ks_gumbel = 1.0;
  double ks_laplace = 1.0;
  bool degenerate = false;
  /// Family with the smallest KS distance (moment-matched); empty when degenerate.
  std::optional<DriftFamily> suggested;
  std::vector<std::string> warnings;
};

/// Moments of the normalized tail residuals and their KS distance to
/// moment-matched Gaussian, Gumbel and Laplace laws.
ResidualSummary residual_diagnostics(const CevtParams& params, std::span<const DataPoint> tail);

/// Moment-matched equilibrium drift for the suggested family.
DriftSpec moment_matched_drift(DriftFamily family, double mean, double variance);

}  // namespace tailscore
