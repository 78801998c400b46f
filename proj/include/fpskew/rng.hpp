// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_RNG_HPP
#define FPSKEW_RNG_HPP

#include <cstdint>
#include <random>

#include "fpskew/numeric.hpp"

namespace fpskew {

/// SplitMix64 finalizer; used both to stretch user seeds into full-entropy
/// engine seeds and to derive independent per-replication streams.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic mix of a master seed with stream coordinates (e.g. simulation
/// set index and replication index).  Counter-based, so any replication's
/// stream can be reconstructed without drawing from the others.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t key1, std::uint64_t key2) {
  std::uint64_t s = master;
  std::uint64_t z = splitmix64_next(s);
  s ^= z + 0x9e3779b97f4a7c15ull * (key1 + 1);
  z = splitmix64_next(s);
  s ^= z + 0x9e3779b97f4a7c15ull * (key2 + 1);
  return splitmix64_next(s);
}

/// Random engine wrapper.  The engine is std::mt19937_64 (bit-exact output is
/// mandated by the standard); the *distributions* are hand-rolled here because
/// std::uniform_int_distribution and std::normal_distribution are allowed to
/// differ across standard libraries, which would break run reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(stretch(seed)) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform draw from {0, 1, ..., n-1}, unbiased via power-of-two rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    std::uint64_t v;
    do {
      v = eng_() & mask;
    } while (v >= n);
    return v;
  }

  /// Uniform double in the open interval (0,1): 53 random bits at the
  /// midpoints k/2^53 + 2^-54, so neither endpoint is attainable.
  double next_unit() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by inversion.  Inversion (rather than Box-Muller or
  /// ziggurat) keeps a fixed one-draw-per-variate consumption pattern.
  double next_normal() { return normal_quantile(next_unit()); }

 private:
  static std::uint64_t stretch(std::uint64_t seed) {
    std::uint64_t s = seed;
    return splitmix64_next(s);
  }

  std::mt19937_64 eng_;
};

/// Per-replication stream: set_index separates the point-estimate and the
/// coverage passes of a simulation; h indexes the replication within a set.
inline Rng replication_stream(std::uint64_t master_seed, std::uint64_t set_index,
                              std::uint64_t h) {
  return Rng(mix_seed(master_seed, set_index, h));
}

}  // namespace fpskew

#endif  // FPSKEW_RNG_HPP
