// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_INFERENCE_HPP
#define FPSKEW_INFERENCE_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "fpskew/calibration.hpp"
#include "fpskew/design.hpp"
#include "fpskew/errors.hpp"
#include "fpskew/estimators.hpp"
#include "fpskew/variance.hpp"
#include "fpskew/wcdf.hpp"

namespace fpskew {

struct EstimateOptions {
  VarianceMethod method = VarianceMethod::syg;
  bool use_inverse_pi = false;           // residualization weights in the calibration variance
  std::vector<double> levels = {0.90, 0.95, 0.99};
  double cal_tol = 1e-10;
  int cal_max_iter = 50;
};

/// Raking diagnostics kept with an estimate (weights themselves are not).
struct CalibrationDiagnostics {
  double beta0 = 0.0;
  double beta1 = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// One estimator applied to one sample: the point estimate, both variance
/// forms, normal intervals at each requested level, and the plug-in
/// quantities behind the linearization.
struct EstimateRecord {
  EstimatorKind kind;
  double estimate = 0.0;
  VarianceEstimate v2;
  double sigma_scale = 0.0;  // sqrt of the variance selected by options.method
  std::vector<std::pair<double, Interval>> intervals;  // (level, interval)
  GFunctionParams params;
  std::optional<CalibrationDiagnostics> calibration;
  std::optional<double> ht_raw_total;  // F_HT(+inf) diagnostic, ht basis only
  bool census = false;
};

/// Full single-sample pipeline.  y and x are sample-aligned study/auxiliary
/// values, N the population size, t_x the census auxiliary total (used only
/// by the calibration basis).
///
/// Throws degenerate_error / collinearity_error / convergence_error when the
/// sample cannot support the requested estimate; simulation drivers count
/// such replications as failed.
inline EstimateRecord estimate_with_variance(const DrawnSample& sample,
                                             const std::vector<double>& y,
                                             const std::vector<double>& x, double N, double t_x,
                                             const EstimatorKind& kind,
                                             const EstimateOptions& options = {}) {
  const std::size_t n = sample.size();
  if (y.size() != n) throw std::invalid_argument("estimate_with_variance: y misaligned");

  EstimateRecord rec;
  rec.kind = kind;

  // A census reproduces the population exactly under every basis here; all
  // design variances are identically zero and the Woodruff probe (which would
  // see a zero-sigma interval) is skipped.
  bool census = static_cast<double>(n) == N;
  for (std::size_t i = 0; census && i < n; ++i) census = sample.pi1[i] == 1.0;
  rec.census = census;

  WeightedCdf cdf;
  std::vector<double> cal_w;
  switch (kind.basis) {
    case CdfBasis::hajek:
      cdf = hajek_cdf(sample, y);
      break;
    case CdfBasis::ht: {
      HtCdf h = ht_cdf(sample, y, N);
      cdf = std::move(h.normalized);
      rec.ht_raw_total = h.raw_total;
      break;
    }
    case CdfBasis::calibration: {
      if (x.size() != n) throw std::invalid_argument("estimate_with_variance: x misaligned");
      CalibrationWeights cw = solve_raking(sample, x, N, t_x, options.cal_tol, options.cal_max_iter);
      rec.calibration = CalibrationDiagnostics{cw.beta0, cw.beta1, cw.iterations, cw.residual};
      cal_w = std::move(cw.w);
      cdf = WeightedCdf(y, cal_w);
      break;
    }
  }

  rec.estimate = evaluate_target(cdf, kind.target, kind.r);

  // Linearization parameters.  b2 is antisymmetric under r <-> 1-r with
  // identical variance, so the variance leg always works with r < 1/2.
  GFunctionParams& p = rec.params;
  p.target = kind.target;
  p.r = std::min(kind.r, 1.0 - kind.r);
  p.nu = cdf.quantile(0.5);
  p.F_nu = cdf.eval(p.nu);
  p.delta = cdf.mad_about(p.nu);
  switch (kind.target) {
    case Target::mean:
      p.b_value = rec.estimate;
      break;
    case Target::b2:
      p.nu_r = cdf.quantile(p.r);
      p.nu_1mr = cdf.quantile(1.0 - p.r);
      p.b_value = b2(cdf, p.r);
      break;
    case Target::b3:
      p.b_value = rec.estimate;
      break;
  }

  if (census) {
    rec.v2 = VarianceEstimate{0.0, 0.0};
    rec.sigma_scale = 0.0;
    for (double level : options.levels) {
      rec.intervals.emplace_back(level, Interval{rec.estimate, rec.estimate});
    }
    return rec;
  }

  // Woodruff density estimates at each quantile the g-function needs.
  auto density_at = [&](double prob) {
    const double q = cdf.quantile(prob);
    double sigma;
    if (kind.basis == CdfBasis::calibration) {
      sigma = woodruff_sigma_calibration(sample, y, q, cal_w, N);
    } else {
      sigma = woodruff_sigma_hajek(sample, y, q, cdf.eval(q));
    }
    return woodruff_density(cdf, prob, sigma, n);
  };
  if (kind.target == Target::b3) {
    p.f_nu = density_at(0.5);
  } else if (kind.target == Target::b2) {
    p.f_nu = density_at(0.5);
    p.f_nu_r = density_at(p.r);
    p.f_nu_1mr = density_at(1.0 - p.r);
  }

  const std::vector<double> g = g_values(p, y);
  if (kind.basis == CdfBasis::calibration) {
    rec.v2 = variance_calibration(sample, g, x, cal_w, N, options.use_inverse_pi);
  } else {
    rec.v2 = variance_hajek(sample, g, N);
  }

  const double v = selected(rec.v2, options.method);
  if (!(v >= 0.0)) {
    throw degenerate_error("estimate_with_variance: negative variance estimate");
  }
  rec.sigma_scale = std::sqrt(v);
  for (double level : options.levels) {
    rec.intervals.emplace_back(level, normal_ci(rec.estimate, v, level));
  }
  return rec;
}

}  // namespace fpskew

#endif  // FPSKEW_INFERENCE_HPP
