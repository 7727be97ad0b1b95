// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

namespace tailscore {

struct NelderMeadOptions {
  int max_evaluations = 20000;
  double f_tolerance = 1e-10;  // spread of simplex values
  double x_tolerance = 1e-8;   // simplex diameter
  double initial_step = 0.1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Derivative-free minimization. `project` (optional) maps every trial point
/// back into the feasible set before evaluation.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options = {},
                             const std::function<void(std::vector<double>&)>& project = {});

}  // namespace tailscore
