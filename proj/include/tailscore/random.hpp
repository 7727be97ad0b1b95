// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tailscore {

/// Seeded random source. Every stochastic operation takes one explicitly, so a
/// run is reproducible from a single 64-bit seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream derived from a root seed and a stream name
  /// ("data", "train", "sample", ...).
  static Rng substream(std::uint64_t seed, std::string_view name);

  double normal() { return normal_(engine_); }

  /// Uniform on the open interval (0, 1).
  double uniform_open();

  /// Uniform integer in [lo, hi].
  long uniform_int(long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(engine_);
  }

  std::uint64_t next_u64() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace tailscore
