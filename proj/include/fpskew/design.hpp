// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_DESIGN_HPP
#define FPSKEW_DESIGN_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "fpskew/errors.hpp"
#include "fpskew/population.hpp"
#include "fpskew/rng.hpp"

namespace fpskew {

enum class DesignKind { srswor, stratified_srswor };

/// Proportional allocation by largest remainder, then a repair pass that
/// guarantees n_h >= 1 by taking units from the currently largest allocation.
/// Requires n >= H (otherwise no allocation can cover every stratum).
inline std::vector<std::int64_t> proportional_allocation(const std::vector<std::int64_t>& N_h,
                                                         std::int64_t n) {
  const std::size_t H = N_h.size();
  std::int64_t N = 0;
  for (std::int64_t v : N_h) {
    if (v < 1) throw allocation_error("proportional_allocation: empty stratum");
    N += v;
  }
  if (n < 1 || n > N) throw allocation_error("proportional_allocation: need 1 <= n <= N");
  if (n < static_cast<std::int64_t>(H)) {
    throw allocation_error("proportional_allocation: n = " + std::to_string(n) +
                           " is smaller than the number of strata " + std::to_string(H));
  }

  std::vector<std::int64_t> n_h(H);
  std::vector<double> remainder(H);
  std::int64_t assigned = 0;
  for (std::size_t h = 0; h < H; ++h) {
    // Integer arithmetic keeps the floor and the remainder ordering exact.
    const std::int64_t num = n * N_h[h];
    n_h[h] = num / N;
    remainder[h] = static_cast<double>(num % N);
    assigned += n_h[h];
  }
  std::vector<std::size_t> order(H);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];  // largest remainder first; ties keep stratum order
  });
  for (std::size_t k = 0; assigned < n; ++k) {
    ++n_h[order[k % H]];
    ++assigned;
  }

  // Repair passes: no stratum may exceed its size or be left empty.
  for (std::size_t h = 0; h < H; ++h) {
    while (n_h[h] > N_h[h]) {
      --n_h[h];
      std::size_t dest = H;
      for (std::size_t k = 0; k < H; ++k) {
        if (n_h[k] < N_h[k] && (dest == H || n_h[k] < n_h[dest])) dest = k;
      }
      if (dest == H) throw allocation_error("proportional_allocation: infeasible");
      ++n_h[dest];
    }
  }
  for (std::size_t h = 0; h < H; ++h) {
    while (n_h[h] < 1) {
      std::size_t src = H;
      for (std::size_t k = 0; k < H; ++k) {
        if (n_h[k] > 1 && (src == H || n_h[k] > n_h[src])) src = k;
      }
      if (src == H) throw allocation_error("proportional_allocation: infeasible");
      --n_h[src];
      ++n_h[h];
    }
  }
  return n_h;
}

/// Fixed-size without-replacement design: plain SRSWOR, or stratified SRSWOR
/// with independent within-stratum draws.  Holds everything needed to answer
/// first and second order inclusion probabilities for any pair of units.
struct SamplingDesign {
  DesignKind kind = DesignKind::srswor;
  std::int64_t N = 0;
  std::int64_t n = 0;
  std::vector<std::int64_t> stratum_sizes;    // N_h, 1-based label h at index h-1
  std::vector<std::int64_t> stratum_samples;  // n_h
  std::vector<int> stratum_of;                // per unit, empty for srswor

  static SamplingDesign srswor(std::int64_t N, std::int64_t n) {
    if (N < 1 || n < 1 || n > N) {
      throw std::invalid_argument("SamplingDesign::srswor: need 1 <= n <= N");
    }
    SamplingDesign d;
    d.kind = DesignKind::srswor;
    d.N = N;
    d.n = n;
    return d;
  }

  /// Builds from the population's 1..H stratum labels and allocates n
  /// proportionally.  Every label in 1..H must occur.
  static SamplingDesign stratified(const FinitePopulation& pop, std::int64_t n) {
    pop.validate();
    const int H = pop.stratum_count();
    if (H < 1) {
      throw std::invalid_argument("SamplingDesign::stratified: population has no stratum labels");
    }
    SamplingDesign d;
    d.kind = DesignKind::stratified_srswor;
    d.N = static_cast<std::int64_t>(pop.size());
    d.n = n;
    d.stratum_sizes.assign(static_cast<std::size_t>(H), 0);
    d.stratum_of.resize(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const int s = pop.strata[i];
      if (s < 1 || s > H) {
        throw std::invalid_argument("SamplingDesign::stratified: labels must cover 1..H");
      }
      ++d.stratum_sizes[static_cast<std::size_t>(s - 1)];
      d.stratum_of[i] = s;
    }
    for (std::int64_t sz : d.stratum_sizes) {
      if (sz == 0) throw std::invalid_argument("SamplingDesign::stratified: labels must cover 1..H");
    }
    d.stratum_samples = proportional_allocation(d.stratum_sizes, n);
    return d;
  }

  int stratum_count() const { return static_cast<int>(stratum_sizes.size()); }

  /// First-order inclusion probability of unit i (0-based).
  double pi1(std::size_t i) const {
    if (kind == DesignKind::srswor) {
      return static_cast<double>(n) / static_cast<double>(N);
    }
    const int h = stratum_of[i];
    return static_cast<double>(stratum_samples[static_cast<std::size_t>(h - 1)]) /
           static_cast<double>(stratum_sizes[static_cast<std::size_t>(h - 1)]);
  }

  /// Second-order inclusion probability; pi2(i,i) is defined as pi1(i).
  double pi2(std::size_t i, std::size_t j) const {
    if (i == j) return pi1(i);
    if (kind == DesignKind::srswor) {
      return static_cast<double>(n) * static_cast<double>(n - 1) /
             (static_cast<double>(N) * static_cast<double>(N - 1));
    }
    const int hi = stratum_of[i];
    const int hj = stratum_of[j];
    if (hi != hj) return pi1(i) * pi1(j);
    const double nh = static_cast<double>(stratum_samples[static_cast<std::size_t>(hi - 1)]);
    const double Nh = static_cast<double>(stratum_sizes[static_cast<std::size_t>(hi - 1)]);
    return nh * (nh - 1.0) / (Nh * (Nh - 1.0));
  }
};

/// One realized sample: population unit indices in ascending order with their
/// aligned first-order inclusion probabilities, plus the design that drew it.
struct DrawnSample {
  std::vector<std::size_t> units;
  std::vector<double> pi1;
  SamplingDesign design;

  std::size_t size() const { return units.size(); }
  double pi2(std::size_t a, std::size_t b) const { return design.pi2(units[a], units[b]); }
};

namespace detail {

/// Seeded partial Fisher-Yates: moves a uniform n-subset of `pool` to the
/// front and truncates.
inline void partial_shuffle_take(std::vector<std::size_t>& pool, std::size_t take, Rng& rng) {
  for (std::size_t k = 0; k < take; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.next_below(pool.size() - k));
    std::swap(pool[k], pool[j]);
  }
  pool.resize(take);
}

}  // namespace detail

/// Draw one sample.  Stratified designs consume randomness stratum by stratum
/// in label order, so a draw is a pure function of (design, seed).
inline DrawnSample draw(const SamplingDesign& design, std::uint64_t seed) {
  Rng rng(seed);
  DrawnSample s;
  s.design = design;
  if (design.kind == DesignKind::srswor) {
    std::vector<std::size_t> pool(static_cast<std::size_t>(design.N));
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    detail::partial_shuffle_take(pool, static_cast<std::size_t>(design.n), rng);
    s.units = std::move(pool);
  } else {
    const int H = design.stratum_count();
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(H));
    for (std::size_t i = 0; i < design.stratum_of.size(); ++i) {
      members[static_cast<std::size_t>(design.stratum_of[i] - 1)].push_back(i);
    }
    for (int h = 0; h < H; ++h) {
      auto& pool = members[static_cast<std::size_t>(h)];
      detail::partial_shuffle_take(pool, static_cast<std::size_t>(design.stratum_samples[static_cast<std::size_t>(h)]), rng);
      s.units.insert(s.units.end(), pool.begin(), pool.end());
    }
  }
  std::sort(s.units.begin(), s.units.end());
  s.pi1.resize(s.units.size());
  for (std::size_t a = 0; a < s.units.size(); ++a) s.pi1[a] = design.pi1(s.units[a]);
  return s;
}

/// Convenience extraction of sample-aligned study/auxiliary values.
inline std::vector<double> gather(const std::vector<double>& column, const DrawnSample& s) {
  std::vector<double> out(s.size());
  for (std::size_t a = 0; a < s.size(); ++a) out[a] = column[s.units[a]];
  return out;
}

}  // namespace fpskew

#endif  // FPSKEW_DESIGN_HPP
