// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_ESTIMATORS_HPP
#define FPSKEW_ESTIMATORS_HPP

#include <cstdio>
#include <string>
#include <vector>

#include "fpskew/calibration.hpp"
#include "fpskew/design.hpp"
#include "fpskew/errors.hpp"
#include "fpskew/wcdf.hpp"

namespace fpskew {

/// Which design-weighted cdf backs the plug-in functional.
enum class CdfBasis { hajek, ht, calibration };

/// Which functional of that cdf is reported.
enum class Target { mean, b2, b3 };

/// A (basis, functional) pair; r is the tail probability when target == b2.
struct EstimatorKind {
  CdfBasis basis = CdfBasis::hajek;
  Target target = Target::b3;
  double r = 0.25;

  std::string name() const {
    std::string t;
    switch (target) {
      case Target::mean:
        t = "mean";
        break;
      case Target::b2: {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "b2(%g)", r);
        t = buf;
        break;
      }
      case Target::b3:
        t = "b3";
        break;
    }
    switch (basis) {
      case CdfBasis::hajek:
        return t + "_hajek";
      case CdfBasis::ht:
        return t + "_ht";
      case CdfBasis::calibration:
        return t + "_cal";
    }
    return t;
  }
};

/// Hajek cdf: mass 1/pi_i at y_i, self-normalizing by N_hat = sum 1/pi_i.
inline WeightedCdf hajek_cdf(const DrawnSample& sample, const std::vector<double>& y_sample) {
  if (y_sample.size() != sample.size()) {
    throw std::invalid_argument("hajek_cdf: y not aligned with sample");
  }
  std::vector<double> masses(sample.size());
  for (std::size_t i = 0; i < masses.size(); ++i) masses[i] = 1.0 / sample.pi1[i];
  return WeightedCdf(y_sample, masses);
}

/// Horvitz-Thompson cdf.  The raw step function (1/N) sum 1/pi_i I(y_i <= t)
/// need not reach 1; quantile-type functionals are evaluated on the
/// normalized version (which coincides with the Hajek cdf), while the raw
/// total N_hat/N is kept as a diagnostic of the realized weight mass.
struct HtCdf {
  WeightedCdf normalized;
  double raw_total = 0.0;  // F_HT(+inf) = (sum 1/pi_i) / N
};

inline HtCdf ht_cdf(const DrawnSample& sample, const std::vector<double>& y_sample, double N) {
  HtCdf out;
  out.normalized = hajek_cdf(sample, y_sample);
  NeumaierSum s;
  for (double p : sample.pi1) s.add(1.0 / p);
  out.raw_total = s.value() / N;
  return out;
}

/// Evaluate the target functional on a cdf estimate.
inline double evaluate_target(const WeightedCdf& cdf, Target target, double r) {
  switch (target) {
    case Target::mean:
      return cdf.mean();
    case Target::b2:
      return b2(cdf, r);
    case Target::b3:
      return b3(cdf);
  }
  throw std::logic_error("evaluate_target: unknown target");
}

}  // namespace fpskew

#endif  // FPSKEW_ESTIMATORS_HPP
