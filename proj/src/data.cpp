// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include "tailscore/error.hpp"

namespace tailscore {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::size_t column_index(const std::vector<std::string>& header, std::string_view name,
                         const std::filesystem::path& path) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  throw SchemaError("column '" + std::string(name) + "' not found in " + path.string());
}

std::ifstream open_csv(const std::filesystem::path& path, std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path.string() + " has no header row");
  header = split_csv_line(line);
  return in;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::mean_shift_laplace:
      return "mean_shift_laplace";
    case DatasetKind::correlated_gaussian:
      return "correlated_gaussian";
    case DatasetKind::csv:
      return "csv";
  }
  return "unknown";
}

DatasetKind parse_dataset_kind(std::string_view name) {
  if (name == "mean_shift_laplace" || name == "mean_shift") return DatasetKind::mean_shift_laplace;
  if (name == "correlated_gaussian" || name == "corr_gauss") return DatasetKind::correlated_gaussian;
  if (name == "csv") return DatasetKind::csv;
  throw ConfigError("unknown dataset kind '" + std::string(name) + "'");
}

void DatasetSpec::validate() const {
  if (kind != DatasetKind::csv && n < 1) throw ConfigError("dataset size must be at least 1");
  if (!(std::abs(rho) < 1.0)) throw ConfigError("correlation must satisfy |rho| < 1");
  if (kind == DatasetKind::csv && csv_path.empty()) throw ConfigError("csv dataset needs a path");
}

std::vector<DataPoint> generate(const DatasetSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<DataPoint> out;
  out.reserve(spec.n);
  switch (spec.kind) {
    case DatasetKind::mean_shift_laplace:
      for (std::size_t i = 0; i < spec.n; ++i) {
        const double x = 1.0 / rng.uniform_open();
        const double y = 10.0 / x + laplace_quantile(rng.uniform_open());
        out.push_back({x, y});
      }
      break;
    case DatasetKind::correlated_gaussian: {
      const double s = std::sqrt(1.0 - spec.rho * spec.rho);
      for (std::size_t i = 0; i < spec.n; ++i) {
        const double x = rng.normal();
        const double y = spec.rho * x + s * rng.normal();
        out.push_back({x, y});
      }
      break;
    }
    case DatasetKind::csv:
      throw ConfigError("csv datasets are read with ingest_csv, not generated");
  }
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

CsvPairs ingest_csv(const std::filesystem::path& path, std::string_view x_column, std::string_view y_column) {
  std::vector<std::string> header;
  auto in = open_csv(path, header);
  const auto xi = column_index(header, x_column, path);
  const auto yi = column_index(header, y_column, path);
  CsvPairs out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++out.rows;
    const auto cells = split_csv_line(line);
    const auto x = xi < cells.size() ? parse_number(cells[xi]) : std::nullopt;
    const auto y = yi < cells.size() ? parse_number(cells[yi]) : std::nullopt;
    if (!x || !y) {
      ++out.skipped;
      continue;
    }
    out.pairs.push_back({*x, *y});
  }
  if (out.pairs.empty()) throw InvalidInput("no usable rows in " + path.string());
  return out;
}

IsoDate IsoDate::parse(std::string_view text) {
  text = trim(text);
  IsoDate d;
  auto field = [&](std::size_t pos, std::size_t len, int& value) {
    const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
    return ec == std::errc() && ptr == text.data() + pos + len;
  };
  const bool shape = text.size() == 10 && text[4] == '-' && text[7] == '-';
  if (!shape || !field(0, 4, d.year) || !field(5, 2, d.month) || !field(8, 2, d.day)) {
    throw InvalidInput("not an ISO date (YYYY-MM-DD): '" + std::string(text) + "'");
  }
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (d.month < 1 || d.month > 12) throw InvalidInput("month out of range in '" + std::string(text) + "'");
  const int max_day = kDays[d.month - 1] + (d.month == 2 && is_leap(d.year) ? 1 : 0);
  if (d.day < 1 || d.day > max_day) throw InvalidInput("day out of range in '" + std::string(text) + "'");
  return d;
}

std::string IsoDate::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

DatedCsv ingest_dated_csv(const std::filesystem::path& path, std::string_view date_column,
                          std::string_view x_column, std::string_view y_column) {
  std::vector<std::string> header;
  auto in = open_csv(path, header);
  const auto di = column_index(header, date_column, path);
  const auto xi = column_index(header, x_column, path);
  const auto yi = column_index(header, y_column, path);
  DatedCsv out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    const auto x = xi < cells.size() ? parse_number(cells[xi]) : std::nullopt;
    const auto y = yi < cells.size() ? parse_number(cells[yi]) : std::nullopt;
    if (!x || !y || di >= cells.size()) {
      ++out.skipped;
      continue;
    }
    out.rows.push_back({IsoDate::parse(cells[di]), {*x, *y}});
  }
  if (out.rows.empty()) throw InvalidInput("no usable rows in " + path.string());
  return out;
}

DateSplit date_range_split(std::span<const DatedPair> rows, const DateRange& train, const DateRange& test) {
  if (train.last < train.first || test.last < test.first) throw ConfigError("date range ends before it starts");
  if (train.first <= test.last && test.first <= train.last) throw ConfigError("train and test date ranges overlap");
  DateSplit out;
  for (const auto& r : rows) {
    if (train.contains(r.date)) {
      out.train.push_back(r.pair);
    } else if (test.contains(r.date)) {
      out.test.push_back(r.pair);
    }
  }
  return out;
}

void write_pairs_csv(std::ostream& out, std::span<const DataPoint> pairs) {
  out << "x,y\n";
  const auto old = out.precision(17);
  for (const auto& p : pairs) out << p.x << ',' << p.y << '\n';
  out.precision(old);
}

void write_pairs_csv(const std::filesystem::path& path, std::span<const DataPoint> pairs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_pairs_csv(out, pairs);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace tailscore
