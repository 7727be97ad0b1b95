// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "tailscore/marginals.hpp"
#include "tailscore/random.hpp"

namespace tailscore {

struct FittedPipeline;

/// Type-7 (linear interpolation) quantile. Throws InvalidInput for empty
/// samples, DomainError unless 0 < p < 1.
double empirical_quantile(std::span<const double> samples, double p);

/// Same convention on data that is already sorted ascending.
double quantile_sorted(std::span<const double> sorted, double p);

/// Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// One-sample KS distance against a continuous CDF.
double ks_statistic_cdf(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Wasserstein-1 distance between two empirical laws.
double wasserstein1(std::span<const double> a, std::span<const double> b);

struct QqRow {
  double level;
  double reference_q;
  double model_q;
};

struct QqTable {
  std::vector<QqRow> rows;
};

/// 0.01, 0.02, ..., 0.99.
std::vector<double> default_qq_levels();

QqTable qq_table(std::span<const double> model_samples, std::span<const double> reference_samples,
                 std::span<const double> levels);
inline QqTable qq_table(std::span<const double> model_samples, std::span<const double> reference_samples) {
  const auto levels = default_qq_levels();
  return qq_table(model_samples, reference_samples, levels);
}

/// CSV `level,reference_q,model_q`.
void write_qq_csv(std::ostream& out, const QqTable& table);

inline constexpr std::array<double, 5> kBandLevels = {0.05, 0.25, 0.5, 0.75, 0.95};

struct BandRow {
  double condition = 0.0;
  std::vector<double> quantiles;  // one per level, non-decreasing
  std::size_t n_ref = 0;
  bool failed = false;
};

struct ConditionBandTable {
  std::vector<double> levels;
  std::vector<BandRow> rows;
};

/// Responses of reference pairs whose condition lies in the window of
/// +/- half_width in quantile level around `condition`.
std::vector<double> reference_window(std::span<const DataPoint> reference, double condition,
                                     double half_width = 0.025);

/// Quantiles of one condition's samples at the given levels.
BandRow band_row(double condition, std::span<const double> samples, std::span<const double> levels,
                 std::size_t n_ref = 0);

/// Draws n conditional samples per grid condition and records their quantiles.
/// A bin whose sampler fails is marked failed instead of aborting the table.
/// `reference` (optional) supplies the n_ref counts.
ConditionBandTable condition_bands(const FittedPipeline& pipeline, std::span<const double> conditions,
                                   std::size_t n_per_condition, std::span<const double> levels, Rng& rng,
                                   std::span<const DataPoint> reference = {});

/// CSV `condition,q05,q25,q50,q75,q95,n_ref` (column names follow the levels).
void write_bands_csv(std::ostream& out, const ConditionBandTable& table);

/// Re-read an emitted table and check header, numeric cells and row-wise
/// monotonicity. Return the row count; throw SchemaError / IoError.
std::size_t validate_qq_csv(const std::filesystem::path& path);
std::size_t validate_bands_csv(const std::filesystem::path& path);

}  // namespace tailscore
