// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailscore/random.hpp"

namespace tailscore {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng Rng::substream(std::uint64_t seed, std::string_view name) {
  return Rng(splitmix64(splitmix64(seed) ^ fnv1a(name)));
}

double Rng::uniform_open() {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double u = dist(engine_);
  while (u <= 0.0) u = dist(engine_);
  return u;
}

}  // namespace tailscore
