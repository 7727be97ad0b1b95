// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <sstream>

#include "tailscore/data.hpp"
#include "tailscore/error.hpp"
#include "tailscore/pipeline.hpp"

namespace tailscore {

namespace {

std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

void check_levels(std::span<const double> levels) {
  if (levels.empty()) throw ConfigError("quantile levels are empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0 && levels[i] < 1.0)) throw ConfigError("quantile levels must lie in (0, 1)");
    if (i > 0 && !(levels[i] > levels[i - 1])) throw ConfigError("quantile levels must be strictly increasing");
  }
}

std::string level_column(double level) {
  const double pct = level * 100.0;
  std::ostringstream os;
  if (std::abs(pct - std::round(pct)) < 1e-9) {
    os << 'q' << std::setw(2) << std::setfill('0') << static_cast<long>(std::round(pct));
  } else {
    os << 'q' << pct;
  }
  return os.str();
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidInput("quantile of an empty sample");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double w = h - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

double empirical_quantile(std::span<const double> samples, double p) {
  if (samples.empty()) throw InvalidInput("quantile of an empty sample");
  const auto s = sorted_copy(samples);
  return quantile_sorted(s, p);
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("KS statistic needs non-empty samples");
  const auto sa = sorted_copy(a);
  const auto sb = sorted_copy(b);
  const auto na = static_cast<double>(sa.size());
  const auto nb = static_cast<double>(sb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_statistic_cdf(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidInput("KS statistic needs a non-empty sample");
  const auto s = sorted_copy(samples);
  const auto n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("Wasserstein distance needs non-empty samples");
  const auto sa = sorted_copy(a);
  const auto sb = sorted_copy(b);
  const auto na = static_cast<double>(sa.size());
  const auto nb = static_cast<double>(sb.size());
  // integrate |F_a - F_b| over the merged breakpoints
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(sa.front(), sb.front());
  double total = 0.0;
  while (i < sa.size() || j < sb.size()) {
    const double next = (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) ? sa[i] : sb[j];
    total += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (next - prev);
    while (i < sa.size() && sa[i] == next) ++i;
    while (j < sb.size() && sb[j] == next) ++j;
    prev = next;
  }
  return total;
}

std::vector<double> default_qq_levels() {
  std::vector<double> out;
  for (int i = 1; i <= 99; ++i) out.push_back(i / 100.0);
  return out;
}

QqTable qq_table(std::span<const double> model_samples, std::span<const double> reference_samples,
                 std::span<const double> levels) {
  check_levels(levels);
  if (model_samples.empty() || reference_samples.empty()) throw InvalidInput("QQ table needs non-empty samples");
  const auto m = sorted_copy(model_samples);
  const auto r = sorted_copy(reference_samples);
  QqTable t;
  for (double p : levels) t.rows.push_back({p, quantile_sorted(r, p), quantile_sorted(m, p)});
  return t;
}

void write_qq_csv(std::ostream& out, const QqTable& table) {
  out << "level,reference_q,model_q\n";
  const auto old = out.precision(17);
  for (const auto& r : table.rows) out << r.level << ',' << r.reference_q << ',' << r.model_q << '\n';
  out.precision(old);
}

std::vector<double> reference_window(std::span<const DataPoint> reference, double condition, double half_width) {
  if (reference.empty()) return {};
  std::vector<double> xs;
  xs.reserve(reference.size());
  for (const auto& p : reference) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  const auto n = static_cast<double>(xs.size());
  // plotting-position level of the condition within the reference conditions
  const auto rank = static_cast<double>(std::lower_bound(xs.begin(), xs.end(), condition) - xs.begin());
  const double level = (rank + 0.5) / (n + 1.0);
  const double lo_level = std::max(level - half_width, 0.0);
  const double hi_level = std::min(level + half_width, 1.0);
  const double lo = lo_level <= 0.0 ? -std::numeric_limits<double>::infinity() : quantile_sorted(xs, std::min(lo_level, 1.0 - 1e-12));
  const double hi = hi_level >= 1.0 ? std::numeric_limits<double>::infinity() : quantile_sorted(xs, std::max(hi_level, 1e-12));
  std::vector<double> out;
  for (const auto& p : reference) {
    if (p.x >= lo && p.x <= hi) out.push_back(p.y);
  }
  return out;
}

BandRow band_row(double condition, std::span<const double> samples, std::span<const double> levels,
                 std::size_t n_ref) {
  check_levels(levels);
  if (samples.empty()) throw InvalidInput("band row needs at least one sample");
  const auto sorted = sorted_copy(samples);
  BandRow row;
  row.condition = condition;
  row.n_ref = n_ref;
  for (double p : levels) row.quantiles.push_back(quantile_sorted(sorted, p));
  return row;
}

ConditionBandTable condition_bands(const FittedPipeline& pipeline, std::span<const double> conditions,
                                   std::size_t n_per_condition, std::span<const double> levels, Rng& rng,
                                   std::span<const DataPoint> reference) {
  check_levels(levels);
  if (n_per_condition == 0) throw ConfigError("condition bands need at least one sample per condition");
  ConditionBandTable table;
  table.levels.assign(levels.begin(), levels.end());
  for (double c : conditions) {
    const std::size_t n_ref = reference.empty() ? 0 : reference_window(reference, c).size();
    try {
      const auto samples = sample_conditional(pipeline, c, n_per_condition, rng);
      table.rows.push_back(band_row(c, samples, levels, n_ref));
    } catch (const Error&) {
      BandRow row;
      row.condition = c;
      row.n_ref = n_ref;
      row.failed = true;
      row.quantiles.assign(levels.size(), std::numeric_limits<double>::quiet_NaN());
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

void write_bands_csv(std::ostream& out, const ConditionBandTable& table) {
  out << "condition";
  for (double p : table.levels) out << ',' << level_column(p);
  out << ",n_ref\n";
  const auto old = out.precision(17);
  for (const auto& r : table.rows) {
    out << r.condition;
    for (double q : r.quantiles) out << ',' << q;
    out << ',' << r.n_ref << '\n';
  }
  out.precision(old);
}

namespace {

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                  const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split_csv_line(line) != header) throw SchemaError(path.string() + " has an unexpected header: " + line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw SchemaError(path.string() + " has a row of the wrong width");
    std::vector<double> row;
    for (const auto& cell : cells) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw SchemaError(path.string() + " has a non-numeric cell '" + cell + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::size_t validate_qq_csv(const std::filesystem::path& path) {
  const auto rows = read_numeric_csv(path, {"level", "reference_q", "model_q"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!(r[0] > 0.0 && r[0] < 1.0) || !std::isfinite(r[1]) || !std::isfinite(r[2])) {
      throw SchemaError(path.string() + ": invalid QQ row " + std::to_string(i + 1));
    }
    if (i > 0 && (r[0] <= rows[i - 1][0] || r[1] < rows[i - 1][1] || r[2] < rows[i - 1][2])) {
      throw SchemaError(path.string() + ": QQ rows are not monotone at row " + std::to_string(i + 1));
    }
  }
  return rows.size();
}

std::size_t validate_bands_csv(const std::filesystem::path& path) {
  std::vector<std::string> header = {"condition"};
  for (double p : kBandLevels) header.push_back(level_column(p));
  header.push_back("n_ref");
  const auto rows = read_numeric_csv(path, header);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const bool failed = std::all_of(r.begin() + 1, r.end() - 1, [](double v) { return std::isnan(v); });
    if (!std::isfinite(r.front()) || !(r.back() >= 0.0) || std::floor(r.back()) != r.back()) {
      throw SchemaError(path.string() + ": invalid band row " + std::to_string(i + 1));
    }
    if (failed) continue;
    for (std::size_t k = 1; k + 1 < r.size(); ++k) {
      if (!std::isfinite(r[k]) || (k > 1 && r[k] < r[k - 1])) {
        throw SchemaError(path.string() + ": band quantiles not monotone at row " + std::to_string(i + 1));
      }
    }
  }
  return rows.size();
}

}  // namespace tailscore
