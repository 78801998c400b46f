// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_WCDF_HPP
#define FPSKEW_WCDF_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fpskew/errors.hpp"
#include "fpskew/numeric.hpp"

namespace fpskew {

/// Right-continuous weighted step cdf over a finite set of support points.
///
/// Stores the ascending support and the compensated cumulative mass; all
/// functionals below (quantile, mean, mean absolute deviation, skewness
/// coefficients) are exact operations on this step function.  Masses need not
/// be normalized: every functional divides by the total, so representations
/// that differ only by a positive scale define the same distribution.
class WeightedCdf {
 public:
  WeightedCdf() = default;

  /// Build from unsorted (value, mass) pairs.  Zero masses are dropped,
  /// ties (exact value equality) are merged, negative or non-finite input is
  /// rejected.
  WeightedCdf(std::vector<double> values, std::vector<double> masses) {
    if (values.size() != masses.size()) {
      throw std::invalid_argument("WeightedCdf: values/masses length mismatch");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i]) || !std::isfinite(masses[i])) {
        throw std::invalid_argument("WeightedCdf: non-finite value or mass");
      }
      if (masses[i] < 0.0) {
        throw std::invalid_argument("WeightedCdf: negative mass");
      }
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    values_.reserve(values.size());
    cum_.reserve(values.size());
    NeumaierSum running;
    NeumaierSum point;  // mass accumulated at the current support point
    bool open = false;
    double current = 0.0;
    auto close_point = [&]() {
      const double m = point.value();
      if (m > 0.0) {
        running.add(m);
        values_.push_back(current);
        cum_.push_back(running.value());
      }
      point = NeumaierSum{};
    };
    for (std::size_t k : order) {
      if (!open || values[k] != current) {
        if (open) close_point();
        current = values[k];
        open = true;
      }
      point.add(masses[k]);
    }
    if (open) close_point();

    if (values_.empty() || !(cum_.back() > 0.0)) {
      throw degenerate_error("WeightedCdf: no positive mass");
    }
  }

  /// Fast path for callers that already hold a strictly ascending support with
  /// positive masses (e.g. dense oracle grids); skips the sort and the merge.
  static WeightedCdf from_sorted(std::vector<double> values, const std::vector<double>& masses) {
    if (values.size() != masses.size()) {
      throw std::invalid_argument("WeightedCdf: values/masses length mismatch");
    }
    if (values.empty()) throw degenerate_error("WeightedCdf: no positive mass");
    WeightedCdf out;
    out.values_ = std::move(values);
    out.cum_.resize(out.values_.size());
    NeumaierSum running;
    for (std::size_t i = 0; i < out.values_.size(); ++i) {
      assert(i == 0 || out.values_[i - 1] < out.values_[i]);
      assert(masses[i] > 0.0);
      running.add(masses[i]);
      out.cum_[i] = running.value();
    }
    if (!(out.cum_.back() > 0.0)) throw degenerate_error("WeightedCdf: no positive mass");
    return out;
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const std::vector<double>& support() const { return values_; }
  const std::vector<double>& cumulative() const { return cum_; }
  double total_mass() const { return empty() ? 0.0 : cum_.back(); }
  double mass(std::size_t i) const { return i == 0 ? cum_[0] : cum_[i] - cum_[i - 1]; }

  /// F(t) = P(X <= t).
  double eval(double t) const {
    require_nonempty();
    auto it = std::upper_bound(values_.begin(), values_.end(), t);
    if (it == values_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - values_.begin()) - 1] / cum_.back();
  }

  /// Left-continuous inverse F^{-1}(r) = inf{x : F(x) >= r}, r in (0, 1].
  double quantile(double r) const {
    require_nonempty();
    if (!(r > 0.0 && r <= 1.0)) {
      throw std::domain_error("WeightedCdf::quantile: r outside (0,1]");
    }
    // Compare cum/total >= r with the same division eval() performs, so the
    // generalized-inverse identities F(Q(r)) >= r and Q(F(t)) <= t hold
    // bitwise, not just in real arithmetic.
    const double total = cum_.back();
    auto it = std::lower_bound(cum_.begin(), cum_.end(), r,
                               [total](double c, double level) { return c / total < level; });
    if (it == cum_.end()) --it;  // unreachable for r <= 1 since total/total == 1
    return values_[static_cast<std::size_t>(it - cum_.begin())];
  }

  double mean() const {
    require_nonempty();
    NeumaierSum s;
    for (std::size_t i = 0; i < values_.size(); ++i) s.add(mass(i) * values_[i]);
    return s.value() / cum_.back();
  }

  double median() const { return quantile(0.5); }

  /// Mean absolute deviation about an arbitrary center c: E|X - c|.
  double mad_about(double c) const {
    require_nonempty();
    NeumaierSum s;
    for (std::size_t i = 0; i < values_.size(); ++i) s.add(mass(i) * std::abs(values_[i] - c));
    return s.value() / cum_.back();
  }

  /// E[fn(X)] for an arbitrary integrand; used for influence-function sums.
  template <class Fn>
  double expectation(Fn&& fn) const {
    require_nonempty();
    NeumaierSum s;
    for (std::size_t i = 0; i < values_.size(); ++i) s.add(mass(i) * fn(values_[i]));
    return s.value() / cum_.back();
  }

 private:
  void require_nonempty() const {
    if (values_.empty()) throw degenerate_error("WeightedCdf: empty distribution");
  }

  std::vector<double> values_;  // ascending support
  std::vector<double> cum_;     // compensated cumulative masses, same length
};

/// Quantile-ratio skewness at tail probability r (r in (0,1), r != 1/2):
///   b2(r) = (Q(1-r) + Q(r) - 2 Q(1/2)) / (Q(1-r) - Q(r)).
/// Antisymmetric in r <-> 1-r.  Throws degenerate_error when the interquantile
/// range is zero.
inline double b2(const WeightedCdf& cdf, double r) {
  if (!(r > 0.0 && r < 1.0) || r == 0.5) {
    throw std::domain_error("b2: r must lie in (0,1) with r != 1/2");
  }
  const double lo = cdf.quantile(r);
  const double hi = cdf.quantile(1.0 - r);
  const double med = cdf.quantile(0.5);
  const double spread = hi - lo;
  if (spread == 0.0) {
    throw degenerate_error("b2: zero interquantile range");
  }
  return (hi + lo - 2.0 * med) / spread;
}

/// Pieces of the mean-median skewness functional.
struct B3Parts {
  double mean = 0.0;
  double median = 0.0;
  double mad = 0.0;  // E|X - median|
};

inline B3Parts b3_parts(const WeightedCdf& cdf) {
  B3Parts p;
  p.mean = cdf.mean();
  p.median = cdf.median();
  p.mad = cdf.mad_about(p.median);
  return p;
}

/// Mean-median skewness b3 = (mean - median) / E|X - median|, in [-1, 1].
/// Throws degenerate_error when the mean absolute deviation is zero.
inline double b3(const WeightedCdf& cdf) {
  const B3Parts p = b3_parts(cdf);
  if (p.mad == 0.0) {
    throw degenerate_error("b3: zero mean absolute deviation");
  }
  return (p.mean - p.median) / p.mad;
}

}  // namespace fpskew

#endif  // FPSKEW_WCDF_HPP
