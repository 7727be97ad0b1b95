// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tailscore {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad data handed to an operation (too few samples, non-finite values).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

// Optimizer ran out of budget; the best iterate seen is kept for inspection.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best, double best_value)
      : Error(what), best_(std::move(best)), best_value_(best_value) {}

  const std::vector<double>& best_iterate() const noexcept { return best_; }
  double best_value() const noexcept { return best_value_; }

 private:
  std::vector<double> best_;
  double best_value_;
};

// A sampler state left the finite / bounded region.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step, double value)
      : Error(what + " (step " + std::to_string(step) + ", value " + std::to_string(value) + ")"),
        step_(step),
        value_(value) {}

  long step() const noexcept { return step_; }
  double value() const noexcept { return value_; }

 private:
  long step_;
  double value_;
};

}  // namespace tailscore
