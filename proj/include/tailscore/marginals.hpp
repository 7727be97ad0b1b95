// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tailscore {

/// One (condition, response) observation.
struct DataPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

/// Empirical CDF with plotting positions rank/(n+1).
///
/// Tied values share the average of their ranks. Between distinct sorted
/// values the CDF is linearly interpolated; outside the data range it is
/// clamped to [1/(n+1), n/(n+1)], so evaluate() never returns 0 or 1.
class EmpiricalCdf {
 public:
  /// Throws InvalidInput for fewer than 2 samples or any non-finite sample.
  static EmpiricalCdf fit(std::span<const double> samples);

  /// Rebuilds from an already sorted sample (used when loading bundles).
  static EmpiricalCdf from_sorted(std::vector<double> sorted_values);

  double evaluate(double v) const;

  /// Interpolated inverse; clamps to [min, max] of the data.
  double inverse(double u) const;

  const std::vector<double>& sorted_values() const noexcept { return sorted_; }
  std::size_t size() const noexcept { return sorted_.size(); }

 private:
  explicit EmpiricalCdf(std::vector<double> sorted);

  std::vector<double> sorted_;
  // Distinct values and their (averaged-rank) plotting positions.
  std::vector<double> knots_;
  std::vector<double> levels_;
};

/// Standard-Laplace quantile; throws DomainError unless 0 < u < 1.
double laplace_quantile(double u);

/// Standard-Laplace CDF; throws DomainError for non-finite z.
double laplace_cdf(double z);

/// Maps raw (x, y) to standard-Laplace margins and back.
class MarginalTransform {
 public:
  MarginalTransform(EmpiricalCdf cdf_x, EmpiricalCdf cdf_y)
      : cdf_x_(std::move(cdf_x)), cdf_y_(std::move(cdf_y)) {}

  double to_laplace_x(double x) const { return laplace_quantile(cdf_x_.evaluate(x)); }
  double to_laplace_y(double y) const { return laplace_quantile(cdf_y_.evaluate(y)); }
  double from_laplace_x(double x_star) const;
  double from_laplace_y(double y_star) const;

  const EmpiricalCdf& cdf_x() const noexcept { return cdf_x_; }
  const EmpiricalCdf& cdf_y() const noexcept { return cdf_y_; }

 private:
  EmpiricalCdf cdf_x_;
  EmpiricalCdf cdf_y_;
};

struct LaplaceMarginals {
  MarginalTransform transform;
  std::vector<DataPoint> transformed;
};

LaplaceMarginals to_laplace_marginals(std::span<const DataPoint> data);

inline double from_laplace_y(const MarginalTransform& transform, double y_star) {
  return transform.from_laplace_y(y_star);
}

}  // namespace tailscore
