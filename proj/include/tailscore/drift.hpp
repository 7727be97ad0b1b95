// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tailscore/random.hpp"

namespace tailscore {

enum class DriftFamily { gaussian, laplace_smoothed, gumbel_smoothed };

std::string to_string(DriftFamily family);
/// Throws ConfigError for an unknown name.
DriftFamily parse_drift_family(std::string_view name);

/// Convex potential f* whose Langevin diffusion has equilibrium e^{-f*}.
///
/// The potential is evaluated on the standardized coordinate
/// u = (z - location) / scale; derivatives w.r.t. z pick up 1/scale per order.
/// smooth_b / smooth_c bound the curvature of the Laplace and Gumbel families
/// (they are ignored for the Gaussian family).
struct DriftSpec {
  DriftFamily family = DriftFamily::gaussian;
  double smooth_b = 0.0;
  double smooth_c = 0.0;
  double location = 0.0;
  double scale = 1.0;

  static DriftSpec gaussian(double location = 0.0, double scale = 1.0) {
    return {DriftFamily::gaussian, 0.0, 0.0, location, scale};
  }
  static DriftSpec laplace(double b = 0.5, double c = 0.1, double location = 0.0, double scale = 1.0) {
    return {DriftFamily::laplace_smoothed, b, c, location, scale};
  }
  static DriftSpec gumbel(double b = 2.0, double c = 1.0, double location = 0.0, double scale = 1.0) {
    return {DriftFamily::gumbel_smoothed, b, c, location, scale};
  }

  /// Throws ConfigError for a non-positive scale, negative smoothing, or
  /// smooth_b == 0 on the Laplace family.
  void validate() const;

  friend bool operator==(const DriftSpec&, const DriftSpec&) = default;
};

/// d f* / dz.
double grad(const DriftSpec& spec, double z);

/// d^2 f* / dz^2.
double hessian(const DriftSpec& spec, double z);

/// Infimum and supremum of hessian() over the real line.
struct CurvatureBounds {
  double lower;
  double upper;
};
CurvatureBounds curvature_bounds(const DriftSpec& spec);

/// sup f*'' / inf f*''. Throws DomainError when the infimum is zero.
double condition_number(const DriftSpec& spec);

/// -f*(z) up to an additive constant.
double log_density_unnormalized(const DriftSpec& spec, double z);

/// Draws from the unsmoothed family: Normal, Laplace or Gumbel(location, scale).
/// Draws from the unsmoothed family (Gaussian / Laplace / Gumbel).
std::vector<double> sample_equilibrium(const DriftSpec& spec, Rng& rng, std::size_t n);

/// Draws from exp(-f) of the smoothed potential itself, the law the forward
/// chain actually settles into. Inverse-CDF on a tabulated density.
std::vector<double> sample_smoothed_equilibrium(const DriftSpec& spec, Rng& rng, std::size_t n);

}  // namespace tailscore
