// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tailscore/error.hpp"
#include "tailscore/marginals.hpp"

namespace tailscore {

namespace {

void check_finite(double z) {
  if (!std::isfinite(z)) throw DomainError("drift evaluated at a non-finite point");
}

// Gradient of the potential in standardized units.
double standard_grad(const DriftSpec& s, double u) {
  switch (s.family) {
    case DriftFamily::gaussian:
      return u;
    case DriftFamily::laplace_smoothed: {
      const double b = s.smooth_b;
      if (std::abs(u) < b) return u / b + s.smooth_c * u;
      return (u > 0.0 ? 1.0 : -1.0) + s.smooth_c * u;
    }
    case DriftFamily::gumbel_smoothed: {
      // Antiderivative of clamp(e^{-u}, e^{-c}, e^{b}) anchored at zero.
      const double b = s.smooth_b;
      const double c = s.smooth_c;
      if (u <= -b) return (1.0 - std::exp(b)) + std::exp(b) * (u + b);
      if (u >= c) return -std::expm1(-c) + std::exp(-c) * (u - c);
      return -std::expm1(-u);
    }
  }
  return 0.0;
}

double standard_hessian(const DriftSpec& s, double u) {
  switch (s.family) {
    case DriftFamily::gaussian:
      return 1.0;
    case DriftFamily::laplace_smoothed:
      return std::abs(u) < s.smooth_b ? 1.0 / s.smooth_b + s.smooth_c : s.smooth_c;
    case DriftFamily::gumbel_smoothed:
      return std::clamp(std::exp(-u), std::exp(-s.smooth_c), std::exp(s.smooth_b));
  }
  return 0.0;
}

double standard_potential(const DriftSpec& s, double u) {
  switch (s.family) {
    case DriftFamily::gaussian:
      return 0.5 * u * u;
    case DriftFamily::laplace_smoothed: {
      const double b = s.smooth_b;
      const double quad = 0.5 * s.smooth_c * u * u;
      if (std::abs(u) < b) return 0.5 * u * u / b + quad;
      return std::abs(u) - 0.5 * b + quad;
    }
    case DriftFamily::gumbel_smoothed: {
      const double b = s.smooth_b;
      const double c = s.smooth_c;
      if (u <= -b) {
        const double d = u + b;
        return (-b + std::exp(b)) + (1.0 - std::exp(b)) * d + 0.5 * std::exp(b) * d * d;
      }
      if (u >= c) {
        const double d = u - c;
        return (c + std::exp(-c)) - std::expm1(-c) * d + 0.5 * std::exp(-c) * d * d;
      }
      return u + std::exp(-u);
    }
  }
  return 0.0;
}

}  // namespace

std::string to_string(DriftFamily family) {
  switch (family) {
    case DriftFamily::gaussian:
      return "gaussian";
    case DriftFamily::laplace_smoothed:
      return "laplace_smoothed";
    case DriftFamily::gumbel_smoothed:
      return "gumbel_smoothed";
  }
  return "unknown";
}

DriftFamily parse_drift_family(std::string_view name) {
  if (name == "gaussian") return DriftFamily::gaussian;
  if (name == "laplace_smoothed" || name == "laplace") return DriftFamily::laplace_smoothed;
  if (name == "gumbel_smoothed" || name == "gumbel") return DriftFamily::gumbel_smoothed;
  throw ConfigError("unknown drift family '" + std::string(name) + "'");
}

void DriftSpec::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("drift scale must be positive");
  if (!std::isfinite(location)) throw ConfigError("drift location must be finite");
  if (family == DriftFamily::gaussian) return;
  if (!(smooth_b >= 0.0) || !(smooth_c >= 0.0) || !std::isfinite(smooth_b) || !std::isfinite(smooth_c)) {
    throw ConfigError("smoothing parameters must be finite and non-negative");
  }
  if (family == DriftFamily::laplace_smoothed && smooth_b == 0.0) {
    throw ConfigError("laplace_smoothed drift needs smooth_b > 0 (otherwise the potential is not smooth)");
  }
}

double grad(const DriftSpec& spec, double z) {
  check_finite(z);
  spec.validate();
  return standard_grad(spec, (z - spec.location) / spec.scale) / spec.scale;
}

double hessian(const DriftSpec& spec, double z) {
  check_finite(z);
  spec.validate();
  return standard_hessian(spec, (z - spec.location) / spec.scale) / (spec.scale * spec.scale);
}

CurvatureBounds curvature_bounds(const DriftSpec& spec) {
  spec.validate();
  const double s2 = spec.scale * spec.scale;
  switch (spec.family) {
    case DriftFamily::gaussian:
      return {1.0 / s2, 1.0 / s2};
    case DriftFamily::laplace_smoothed:
      return {spec.smooth_c / s2, (1.0 / spec.smooth_b + spec.smooth_c) / s2};
    case DriftFamily::gumbel_smoothed:
      return {std::exp(-spec.smooth_c) / s2, std::exp(spec.smooth_b) / s2};
  }
  return {1.0, 1.0};
}

double condition_number(const DriftSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case DriftFamily::gaussian:
      return 1.0;
    case DriftFamily::laplace_smoothed: {
      const double bc = spec.smooth_b * spec.smooth_c;
      if (bc == 0.0) throw DomainError("condition number is infinite for b*c = 0");
      return 1.0 + 1.0 / bc;
    }
    case DriftFamily::gumbel_smoothed:
      return std::exp(spec.smooth_b + spec.smooth_c);
  }
  return 1.0;
}

double log_density_unnormalized(const DriftSpec& spec, double z) {
  check_finite(z);
  spec.validate();
  return -standard_potential(spec, (z - spec.location) / spec.scale);
}

std::vector<double> sample_equilibrium(const DriftSpec& spec, Rng& rng, std::size_t n) {
  spec.validate();
  std::vector<double> out(n);
  for (auto& v : out) {
    double u = 0.0;
    switch (spec.family) {
      case DriftFamily::gaussian:
        u = rng.normal();
        break;
      case DriftFamily::laplace_smoothed:
        u = laplace_quantile(rng.uniform_open());
        break;
      case DriftFamily::gumbel_smoothed:
        u = -std::log(-std::log(rng.uniform_open()));
        break;
    }
    v = spec.location + spec.scale * u;
  }
  return out;
}

std::vector<double> sample_smoothed_equilibrium(const DriftSpec& spec, Rng& rng, std::size_t n) {
  spec.validate();
  if (spec.family == DriftFamily::gaussian) return sample_equilibrium(spec, rng, n);

  // Standardized axis; both smoothed potentials grow at least quadratically
  // or linearly with slope >= 1 - e^{-c} outside this window.
  constexpr double lo = -40.0;
  constexpr double hi = 80.0;
  constexpr std::size_t cells = 60000;
  const double h = (hi - lo) / static_cast<double>(cells);
  std::vector<double> f(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) f[i] = standard_potential(spec, lo + h * static_cast<double>(i));
  const double fmin = *std::min_element(f.begin(), f.end());
  std::vector<double> cdf(cells + 1, 0.0);
  for (std::size_t i = 1; i <= cells; ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * h * (std::exp(fmin - f[i - 1]) + std::exp(fmin - f[i]));
  }
  const double total = cdf.back();
  for (double& c : cdf) c /= total;

  std::vector<double> out(n);
  for (auto& v : out) {
    const double u = rng.uniform_open();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1, cells));
    const double w = (u - cdf[i - 1]) / std::max(cdf[i] - cdf[i - 1], 1e-300);
    v = spec.location + spec.scale * (lo + h * (static_cast<double>(i - 1) + std::clamp(w, 0.0, 1.0)));
  }
  return out;
}

}  // namespace tailscore
