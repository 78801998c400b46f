// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_ORACLE_HPP
#define FPSKEW_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "fpskew/design.hpp"
#include "fpskew/errors.hpp"
#include "fpskew/estimators.hpp"
#include "fpskew/numeric.hpp"
#include "fpskew/population.hpp"
#include "fpskew/wcdf.hpp"

// Slow, obviously-correct reference computations.  Everything in this header
// exists to check the estimators and variance formulas from a direction that
// shares no code with them: exhaustive design enumeration, contamination
// finite differences, bisection solves, linear-scan order statistics.

namespace fpskew {

inline double count_combinations(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::int64_t i = 1; i <= k; ++i) {
    c *= static_cast<double>(n - k + i);
    c /= static_cast<double>(i);
  }
  return c;
}

/// Exact design distribution of a sample statistic under SRSWOR or stratified
/// SRSWOR, by enumerating every possible sample with equal probability.
struct EnumerationResult {
  double sample_count = 0.0;
  double expectation = 0.0;
  double variance = 0.0;           // population-style: E[(T - E T)^2]
  std::vector<double> values;      // statistic per sample, enumeration order
};

namespace detail {

inline bool next_combination(std::vector<std::size_t>& idx, std::size_t pool) {
  const std::size_t k = idx.size();
  if (k == 0) return false;
  std::size_t i = k;
  while (i-- > 0) {
    if (idx[i] + 1 <= pool - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

inline EnumerationResult enumerate_design(const SamplingDesign& design,
                                          const std::function<double(const DrawnSample&)>& statistic,
                                          double max_samples = 1e6) {
  // Group units by stratum (a single group for plain SRSWOR).
  std::vector<std::vector<std::size_t>> pools;
  std::vector<std::size_t> takes;
  if (design.kind == DesignKind::srswor) {
    pools.emplace_back(static_cast<std::size_t>(design.N));
    std::iota(pools[0].begin(), pools[0].end(), std::size_t{0});
    takes.push_back(static_cast<std::size_t>(design.n));
  } else {
    pools.resize(design.stratum_sizes.size());
    for (std::size_t i = 0; i < design.stratum_of.size(); ++i) {
      pools[static_cast<std::size_t>(design.stratum_of[i] - 1)].push_back(i);
    }
    for (std::int64_t nh : design.stratum_samples) takes.push_back(static_cast<std::size_t>(nh));
  }

  double total = 1.0;
  for (std::size_t h = 0; h < pools.size(); ++h) {
    total *= count_combinations(static_cast<std::int64_t>(pools[h].size()),
                                static_cast<std::int64_t>(takes[h]));
  }
  if (!(total <= max_samples)) {
    throw enumeration_bound_error("enumerate_design: " + std::to_string(total) +
                                  " samples exceed the bound " + std::to_string(max_samples));
  }

  std::vector<std::vector<std::size_t>> choice(pools.size());
  for (std::size_t h = 0; h < pools.size(); ++h) {
    choice[h].resize(takes[h]);
    std::iota(choice[h].begin(), choice[h].end(), std::size_t{0});
  }

  EnumerationResult result;
  result.sample_count = total;
  result.values.reserve(static_cast<std::size_t>(total));
  DrawnSample s;
  s.design = design;
  while (true) {
    s.units.clear();
    for (std::size_t h = 0; h < pools.size(); ++h) {
      for (std::size_t pos : choice[h]) s.units.push_back(pools[h][pos]);
    }
    std::sort(s.units.begin(), s.units.end());
    s.pi1.resize(s.units.size());
    for (std::size_t a = 0; a < s.units.size(); ++a) s.pi1[a] = design.pi1(s.units[a]);
    result.values.push_back(statistic(s));

    // Odometer over the per-stratum combinations.
    std::size_t h = pools.size();
    bool advanced = false;
    while (h-- > 0) {
      if (detail::next_combination(choice[h], pools[h].size())) {
        advanced = true;
        break;
      }
      std::iota(choice[h].begin(), choice[h].end(), std::size_t{0});
    }
    if (!advanced) break;
  }

  NeumaierSum mean_acc;
  for (double v : result.values) mean_acc.add(v);
  result.expectation = mean_acc.value() / result.sample_count;
  NeumaierSum var_acc;
  for (double v : result.values) {
    const double d = v - result.expectation;
    var_acc.add(d * d);
  }
  result.variance = var_acc.value() / result.sample_count;
  return result;
}

/// Contamination finite difference of a cdf functional:
///   ( T((1-eps) F + eps delta_t) - T(F) ) / eps.
/// The mixture is materialized as a weighted cdf sharing F's raw masses plus
/// a point mass c at t with c/(total+c) = eps; c is snapped to the nearest
/// integer when that reproduces eps exactly (integer-mass grids), which keeps
/// every cumulative sum exact.
inline double contamination_derivative(const WeightedCdf& base, Target target, double r, double t,
                                       double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::domain_error("contamination_derivative: eps outside (0,1)");
  }
  const double M = base.total_mass();
  double c = M * eps / (1.0 - eps);
  const double rounded = std::round(c);
  if (rounded > 0.0 && std::abs(c - rounded) <= 1e-9 * c) c = rounded;
  const double eps_actual = c / (M + c);

  const std::vector<double>& support = base.support();
  const std::size_t m = support.size();
  std::vector<double> values;
  std::vector<double> masses;
  values.reserve(m + 1);
  masses.reserve(m + 1);
  const std::size_t insert_at = static_cast<std::size_t>(
      std::lower_bound(support.begin(), support.end(), t) - support.begin());
  bool placed = false;
  for (std::size_t i = 0; i < m; ++i) {
    if (!placed && i == insert_at) {
      if (i < m && support[i] == t) {
        values.push_back(support[i]);
        masses.push_back(base.mass(i) + c);
        placed = true;
        continue;
      }
      values.push_back(t);
      masses.push_back(c);
      placed = true;
    }
    values.push_back(support[i]);
    masses.push_back(base.mass(i));
  }
  if (!placed) {
    values.push_back(t);
    masses.push_back(c);
  }
  const WeightedCdf mixture = WeightedCdf::from_sorted(std::move(values), masses);

  const double t_mix = evaluate_target(mixture, target, r);
  const double t_base = evaluate_target(base, target, r);
  return (t_mix - t_base) / eps_actual;
}

/// Raking solved by one-dimensional bisection: for any slope b1 the intercept
/// that satisfies the size constraint is closed form, so only the auxiliary
/// constraint h(b1) = N * (tilted mean of x) - t_x needs a root.  h is
/// monotone increasing, and the tilted mean is evaluated with max-subtraction
/// so large |b1| cannot overflow.
inline std::pair<double, double> grid_solve_raking(const std::vector<double>& pi,
                                                   const std::vector<double>& x, double N,
                                                   double t_x, double tol = 1e-8) {
  const std::size_t n = x.size();
  if (pi.size() != n || n == 0) throw std::invalid_argument("grid_solve_raking: bad input");
  const double xmax = *std::max_element(x.begin(), x.end());
  const double xmin = *std::min_element(x.begin(), x.end());
  if (xmax == xmin) throw collinearity_error("grid_solve_raking: constant auxiliary");

  auto tilted_mean = [&](double b1) {
    NeumaierSum num, den;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(b1 * (x[i] - xmax)) / pi[i];
      num.add(e * x[i]);
      den.add(e);
    }
    return num.value() / den.value();
  };
  auto h = [&](double b1) { return N * tilted_mean(b1) - t_x; };

  double lo = -1.0, hi = 1.0;
  double h_lo = h(lo), h_hi = h(hi);
  int grow = 0;
  while (h_lo > 0.0 || h_hi < 0.0) {
    if (++grow > 60) {
      throw convergence_error("grid_solve_raking: no sign change", std::min(std::abs(h_lo), std::abs(h_hi)));
    }
    if (h_lo > 0.0) {
      lo *= 2.0;
      h_lo = h(lo);
    }
    if (h_hi < 0.0) {
      hi *= 2.0;
      h_hi = h(hi);
    }
  }
  const double scale = std::max(std::abs(t_x), 1.0);
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if (std::abs(hm) <= tol * scale) break;
    if (hm > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  NeumaierSum den;
  for (std::size_t i = 0; i < n; ++i) den.add(std::exp(mid * (x[i] - xmax)) / pi[i]);
  const double b0 = std::log(N) - (mid * xmax + std::log(den.value()));
  return {b0, mid};
}

/// Linear-scan order statistics on parallel (value, mass) arrays; no sharing
/// with WeightedCdf internals.
inline double oracle_quantile(std::vector<double> values, std::vector<double> masses, double r) {
  if (values.size() != masses.size() || values.empty()) {
    throw std::invalid_argument("oracle_quantile: bad input");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double total = 0.0;
  for (double w : masses) total += w;
  double acc = 0.0;
  for (std::size_t k : order) {
    acc += masses[k];
    // Same inverse-cdf convention as WeightedCdf::quantile: first point whose
    // normalized cumulative mass reaches r.
    if (acc / total >= r) return values[k];
  }
  return values[order.back()];
}

inline double oracle_b2(const std::vector<double>& values, const std::vector<double>& masses,
                        double r) {
  const double qr = oracle_quantile(values, masses, r);
  const double q1mr = oracle_quantile(values, masses, 1.0 - r);
  const double med = oracle_quantile(values, masses, 0.5);
  return (q1mr + qr - 2.0 * med) / (q1mr - qr);
}

inline double oracle_b3(const std::vector<double>& values, const std::vector<double>& masses) {
  const double med = oracle_quantile(values, masses, 0.5);
  double total = 0.0, mean = 0.0, mad = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) total += masses[i];
  for (std::size_t i = 0; i < values.size(); ++i) mean += masses[i] * values[i];
  mean /= total;
  for (std::size_t i = 0; i < values.size(); ++i) mad += masses[i] * std::abs(values[i] - med);
  mad /= total;
  return (mean - med) / mad;
}

}  // namespace fpskew

#endif  // FPSKEW_ORACLE_HPP
