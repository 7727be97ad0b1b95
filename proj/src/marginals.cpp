// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/marginals.hpp"

#include <algorithm>
#include <cmath>

#include "tailscore/error.hpp"

namespace tailscore {

namespace {

// Piecewise-linear interpolation through (xs, ys) with flat extension; xs is
// strictly increasing.
double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double v) {
  if (v <= xs.front()) return ys.front();
  if (v >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), v);
  const auto hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double w = (v - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

}  // namespace

EmpiricalCdf::EmpiricalCdf(std::vector<double> sorted) : sorted_(std::move(sorted)) {
  const auto n = static_cast<double>(sorted_.size());
  for (std::size_t i = 0; i < sorted_.size();) {
    std::size_t j = i;
    while (j + 1 < sorted_.size() && sorted_[j + 1] == sorted_[i]) ++j;
    // ranks are 1-based: i+1 .. j+1
    const double mean_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    knots_.push_back(sorted_[i]);
    levels_.push_back(mean_rank / (n + 1.0));
    i = j + 1;
  }
}

EmpiricalCdf EmpiricalCdf::fit(std::span<const double> samples) {
  if (samples.size() < 2) throw InvalidInput("empirical CDF needs at least 2 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw InvalidInput("empirical CDF sample is not finite");
  }
  std::sort(sorted.begin(), sorted.end());
  return EmpiricalCdf(std::move(sorted));
}

EmpiricalCdf EmpiricalCdf::from_sorted(std::vector<double> sorted_values) {
  if (sorted_values.size() < 2) throw InvalidInput("empirical CDF needs at least 2 samples");
  if (!std::is_sorted(sorted_values.begin(), sorted_values.end())) {
    throw InvalidInput("empirical CDF values are not sorted");
  }
  for (double v : sorted_values) {
    if (!std::isfinite(v)) throw InvalidInput("empirical CDF sample is not finite");
  }
  return EmpiricalCdf(std::move(sorted_values));
}

double EmpiricalCdf::evaluate(double v) const {
  if (std::isnan(v)) throw DomainError("empirical CDF evaluated at NaN");
  const auto n = static_cast<double>(sorted_.size());
  if (v < knots_.front()) return 1.0 / (n + 1.0);
  if (v > knots_.back()) return n / (n + 1.0);
  if (knots_.size() == 1) return levels_.front();
  return interpolate(knots_, levels_, v);
}

double EmpiricalCdf::inverse(double u) const {
  if (std::isnan(u)) throw DomainError("empirical CDF inverse evaluated at NaN");
  if (knots_.size() == 1) return knots_.front();
  return interpolate(levels_, knots_, u);
}

double laplace_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("Laplace quantile needs 0 < u < 1");
  const double d = u - 0.5;
  if (d == 0.0) return 0.0;
  const double magnitude = -std::log1p(-2.0 * std::abs(d));
  return d > 0.0 ? magnitude : -magnitude;
}

double laplace_cdf(double z) {
  if (!std::isfinite(z)) throw DomainError("Laplace CDF needs a finite argument");
  const double tail = -std::expm1(-std::abs(z));
  return z >= 0.0 ? 0.5 + 0.5 * tail : 0.5 - 0.5 * tail;
}

double MarginalTransform::from_laplace_x(double x_star) const {
  if (!std::isfinite(x_star)) throw DomainError("inverse transform needs a finite value");
  return cdf_x_.inverse(laplace_cdf(x_star));
}

double MarginalTransform::from_laplace_y(double y_star) const {
  if (!std::isfinite(y_star)) throw DomainError("inverse transform needs a finite value");
  return cdf_y_.inverse(laplace_cdf(y_star));
}

LaplaceMarginals to_laplace_marginals(std::span<const DataPoint> data) {
  if (data.size() < 2) throw InvalidInput("marginal transform needs at least 2 pairs");
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(data.size());
  ys.reserve(data.size());
  for (const auto& p : data) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  MarginalTransform transform(EmpiricalCdf::fit(xs), EmpiricalCdf::fit(ys));
  std::vector<DataPoint> out;
  out.reserve(data.size());
  for (const auto& p : data) {
    out.push_back({transform.to_laplace_x(p.x), transform.to_laplace_y(p.y)});
  }
  return {std::move(transform), std::move(out)};
}

}  // namespace tailscore
