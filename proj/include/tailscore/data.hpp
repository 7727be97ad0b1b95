// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tailscore/marginals.hpp"
#include "tailscore/random.hpp"

namespace tailscore {

enum class DatasetKind { mean_shift_laplace, correlated_gaussian, csv };

std::string to_string(DatasetKind kind);
DatasetKind parse_dataset_kind(std::string_view name);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::correlated_gaussian;
  std::size_t n = 10000;
  double rho = 0.4;
  std::string csv_path;
  std::string x_column = "x";
  std::string y_column = "y";

  void validate() const;
};

/// mean_shift_laplace: X ~ Pareto(1), Y = 10/X + Laplace(0, 1).
/// correlated_gaussian: standard bivariate normal with correlation rho.
/// Throws ConfigError for the csv kind (use ingest_csv).
std::vector<DataPoint> generate(const DatasetSpec& spec, Rng& rng);

struct CsvPairs {
  std::vector<DataPoint> pairs;
  std::size_t rows = 0;     // data rows read
  std::size_t skipped = 0;  // rows with a missing or non-numeric cell
};

/// Reads two named numeric columns. Throws IoError for an unreadable file,
/// SchemaError for missing columns, InvalidInput when no row is usable.
CsvPairs ingest_csv(const std::filesystem::path& path, std::string_view x_column, std::string_view y_column);

struct IsoDate {
  int year = 0;
  int month = 0;
  int day = 0;

  /// Parses YYYY-MM-DD; throws InvalidInput otherwise.
  static IsoDate parse(std::string_view text);
  std::string str() const;

  friend auto operator<=>(const IsoDate&, const IsoDate&) = default;
};

struct DateRange {
  IsoDate first;
  IsoDate last;  // inclusive

  bool contains(const IsoDate& d) const { return first <= d && d <= last; }
};

struct DatedPair {
  IsoDate date;
  DataPoint pair;
};

struct DatedCsv {
  std::vector<DatedPair> rows;
  std::size_t skipped = 0;
};

DatedCsv ingest_dated_csv(const std::filesystem::path& path, std::string_view date_column,
                          std::string_view x_column, std::string_view y_column);

struct DateSplit {
  std::vector<DataPoint> train;
  std::vector<DataPoint> test;
};

/// Partitions rows by inclusive date ranges; rows outside both are dropped.
/// Throws ConfigError if the ranges overlap.
DateSplit date_range_split(std::span<const DatedPair> rows, const DateRange& train, const DateRange& test);

/// CSV with header `x,y`.
void write_pairs_csv(std::ostream& out, std::span<const DataPoint> pairs);
void write_pairs_csv(const std::filesystem::path& path, std::span<const DataPoint> pairs);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace tailscore
