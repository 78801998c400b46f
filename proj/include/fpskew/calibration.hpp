// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_CALIBRATION_HPP
#define FPSKEW_CALIBRATION_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fpskew/design.hpp"
#include "fpskew/errors.hpp"
#include "fpskew/numeric.hpp"
#include "fpskew/wcdf.hpp"

namespace fpskew {

/// Exponential (raking) calibration weights w_i = exp(b0 + b1 x_i) / pi_i
/// solving  sum_s w_i = N  and  sum_s w_i x_i = t_x.
struct CalibrationWeights {
  double beta0 = 0.0;
  double beta1 = 0.0;
  std::vector<double> w;
  int iterations = 0;
  double residual = 0.0;  // max scaled constraint residual at exit
};

/// Damped Newton solve of the raking equations.  Internally the auxiliary is
/// standardized (the Newton system on raw lognormal x is badly conditioned);
/// the returned coefficients are on the original x scale.
///
/// x: auxiliary values aligned with the sample; N: population size;
/// t_x: census auxiliary total.  Convergence is declared when
/// |sum w - N| <= tol*N and |sum w x - t_x| <= tol*max(|t_x|, 1).
inline CalibrationWeights solve_raking(const DrawnSample& sample, const std::vector<double>& x,
                                       double N, double t_x, double tol = 1e-10,
                                       int max_iter = 50) {
  const std::size_t n = sample.size();
  if (x.size() != n) throw std::invalid_argument("solve_raking: x not aligned with sample");
  if (n == 0) throw degenerate_error("solve_raking: empty sample");

  // Standardize the auxiliary with unweighted sample moments.
  NeumaierSum sx, sxx;
  for (double v : x) {
    sx.add(v);
    sxx.add(v * v);
  }
  const double xbar = sx.value() / static_cast<double>(n);
  const double var = sxx.value() / static_cast<double>(n) - xbar * xbar;
  if (!(var > 0.0)) {
    throw collinearity_error("solve_raking: auxiliary is constant on the sample");
  }
  const double sd = std::sqrt(var);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = (x[i] - xbar) / sd;
  const double t_std = (t_x - xbar * N) / sd;  // target of sum w * xs

  double b0 = 0.0;
  double b1 = 0.0;

  std::vector<double> w(n);
  // Convergence is judged on the original-coordinate residuals
  // (sum w - N, sum w x - t_x), both relative to max(N, |t_x|).
  const double scale = std::max(N, std::abs(t_x));
  double r1 = 0.0, r2 = 0.0, err = 0.0;

  auto evaluate = [&](double a0, double a1, double& out1, double& out2) {
    NeumaierSum s0, s1;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = std::exp(a0 + a1 * xs[i]) / sample.pi1[i];
      s0.add(w[i]);
      s1.add(w[i] * xs[i]);
    }
    out1 = s0.value() - N;
    out2 = s1.value() - t_std;
    const double r2_orig = sd * out2 + xbar * out1;
    return std::max(std::abs(out1), std::abs(r2_orig)) / scale;
  };

  err = evaluate(b0, b1, r1, r2);
  int iter = 0;
  while (err > tol) {
    if (iter >= max_iter) {
      throw convergence_error("solve_raking: no convergence in " + std::to_string(max_iter) +
                                  " iterations",
                              err);
    }
    // Newton system; the Jacobian is the (positive definite) weighted moment matrix.
    NeumaierSum j00, j01, j11;
    for (std::size_t i = 0; i < n; ++i) {
      j00.add(w[i]);
      j01.add(w[i] * xs[i]);
      j11.add(w[i] * xs[i] * xs[i]);
    }
    const double a = j00.value(), b = j01.value(), c = j11.value();
    const double det = a * c - b * b;
    if (!(det > 1e-12 * a * c) || !std::isfinite(det)) {
      throw collinearity_error("solve_raking: near-singular calibration system");
    }
    const double step0 = (c * r1 - b * r2) / det;
    const double step1 = (a * r2 - b * r1) / det;

    // Damping: halve until the scaled residual improves.
    double lambda = 1.0;
    double n1 = 0.0, n2 = 0.0;
    for (int back = 0; back < 60; ++back) {
      const double cand = evaluate(b0 - lambda * step0, b1 - lambda * step1, n1, n2);
      if (cand < err || cand <= tol) {
        b0 -= lambda * step0;
        b1 -= lambda * step1;
        r1 = n1;
        r2 = n2;
        err = cand;
        break;
      }
      lambda *= 0.5;
      if (back == 59) {
        throw convergence_error("solve_raking: line search stalled", err);
      }
    }
    ++iter;
  }
  // Leave w at the accepted iterate.
  evaluate(b0, b1, r1, r2);

  CalibrationWeights out;
  out.beta1 = b1 / sd;
  out.beta0 = b0 - b1 * xbar / sd;
  out.w = w;
  out.iterations = iter;
  out.residual = err;
  return out;
}

/// Calibration cdf estimate: mass w_i at y_i, normalized by N.  Since the
/// weights are calibrated to sum to N, the result is a proper cdf.
inline WeightedCdf calibration_cdf(const std::vector<double>& y_sample,
                                   const CalibrationWeights& weights) {
  return WeightedCdf(y_sample, weights.w);
}

}  // namespace fpskew

#endif  // FPSKEW_CALIBRATION_HPP
