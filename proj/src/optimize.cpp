// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tailscore {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options,
                             const std::function<void(std::vector<double>&)>& project) {
  const std::size_t n = start.size();
  NelderMeadResult result;
  auto eval = [&](std::vector<double>& p) {
    if (project) project(p);
    ++result.evaluations;
    const double v = objective(p);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  values[0] = eval(simplex[0]);
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = simplex[i + 1];
    p[i] += options.initial_step;
    values[i + 1] = eval(p);
    if (p == simplex[0]) {  // projection pushed the vertex back; step the other way
      p[i] -= 2.0 * options.initial_step;
      values[i + 1] = eval(p);
    }
  }

  std::vector<std::size_t> idx(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  while (result.evaluations < options.max_evaluations) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = idx.front();
    const std::size_t worst = idx.back();
    const std::size_t second = idx[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t d = 0; d < n; ++d) {
        diameter = std::max(diameter, std::abs(simplex[i][d] - simplex[best][d]));
      }
    }
    const double spread = values[worst] - values[best];
    if (spread <= options.f_tolerance * (1.0 + std::abs(values[best])) && diameter <= options.x_tolerance) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / static_cast<double>(n);
    }
    for (std::size_t d = 0; d < n; ++d) trial[d] = centroid[d] + (centroid[d] - simplex[worst][d]);
    const double fr = eval(trial);
    if (fr < values[best]) {
      for (std::size_t d = 0; d < n; ++d) trial2[d] = centroid[d] + 2.0 * (centroid[d] - simplex[worst][d]);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    for (std::size_t d = 0; d < n; ++d) {
      trial2[d] = outside ? centroid[d] + 0.5 * (trial[d] - centroid[d])
                          : centroid[d] + 0.5 * (simplex[worst][d] - centroid[d]);
    }
    const double fc = eval(trial2);
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d) simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
      values[i] = eval(simplex[i]);
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  result.x = simplex[static_cast<std::size_t>(it - values.begin())];
  result.value = *it;
  return result;
}

}  // namespace tailscore
