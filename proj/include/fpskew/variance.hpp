// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_VARIANCE_HPP
#define FPSKEW_VARIANCE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "fpskew/design.hpp"
#include "fpskew/errors.hpp"
#include "fpskew/estimators.hpp"
#include "fpskew/numeric.hpp"
#include "fpskew/wcdf.hpp"

namespace fpskew {

/// Plug-in quantities the linearization g-functions depend on.  For b3 only
/// (nu, f_nu, delta, b_value) matter; b2 additionally needs the r and 1-r
/// quantiles with their densities.  F_nu is carried as a diagnostic of how
/// far the estimated cdf sits from 1/2 at the estimated median.
struct GFunctionParams {
  Target target = Target::b3;
  double r = 0.25;       // tail probability (b2 only), canonical r < 1/2
  double nu_r = 0.0;     // Q(r)
  double nu_1mr = 0.0;   // Q(1-r)
  double nu = 0.0;       // Q(1/2)
  double f_nu_r = 0.0;   // density at Q(r)
  double f_nu_1mr = 0.0; // density at Q(1-r)
  double f_nu = 0.0;     // density at Q(1/2)
  double F_nu = 0.5;     // cdf at the estimated median
  double delta = 0.0;    // E|X - nu|
  double b_value = 0.0;  // the plug-in estimate of the target functional
};

/// Linearization transform for the mean: the identity.
inline std::vector<double> g_mean_values(const std::vector<double>& y) { return y; }

/// Linearization transform for b3,
///   g3(t) = (1/delta) { t (1 - b3) + I(t <= nu) (1/f(nu) - 2 nu b3 + 2 t b3) }.
inline std::vector<double> g3_values(const GFunctionParams& p, const std::vector<double>& y) {
  if (!(p.delta > 0.0)) throw degenerate_error("g3_values: nonpositive delta");
  if (!(p.f_nu > 0.0)) throw degenerate_error("g3_values: nonpositive density at the median");
  std::vector<double> g(y.size());
  const double inv_delta = 1.0 / p.delta;
  const double jump = 1.0 / p.f_nu - 2.0 * p.nu * p.b_value;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = y[i];
    double v = t * (1.0 - p.b_value);
    if (t <= p.nu) v += jump + 2.0 * t * p.b_value;
    g[i] = inv_delta * v;
  }
  return g;
}

/// Linearization transform for b2(r),
///   g2(t) = (1/(Q(1-r)-Q(r))) [ I(t <= Q(1-r)) (b2-1)/f(Q(1-r))
///                             - I(t <= Q(r))   (b2+1)/f(Q(r))
///                             + 2 I(t <= Q(1/2)) / f(Q(1/2)) ].
inline std::vector<double> g2_values(const GFunctionParams& p, const std::vector<double>& y) {
  const double spread = p.nu_1mr - p.nu_r;
  if (!(spread > 0.0)) throw degenerate_error("g2_values: nonpositive interquantile range");
  if (!(p.f_nu_r > 0.0 && p.f_nu_1mr > 0.0 && p.f_nu > 0.0)) {
    throw degenerate_error("g2_values: nonpositive density");
  }
  std::vector<double> g(y.size());
  const double hi_term = (p.b_value - 1.0) / p.f_nu_1mr;
  const double lo_term = (p.b_value + 1.0) / p.f_nu_r;
  const double med_term = 2.0 / p.f_nu;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = y[i];
    double v = 0.0;
    if (t <= p.nu_1mr) v += hi_term;
    if (t <= p.nu_r) v -= lo_term;
    if (t <= p.nu) v += med_term;
    g[i] = v / spread;
  }
  return g;
}

/// Dispatch on the target functional.
inline std::vector<double> g_values(const GFunctionParams& p, const std::vector<double>& y) {
  switch (p.target) {
    case Target::mean:
      return g_mean_values(y);
    case Target::b2:
      return g2_values(p, y);
    case Target::b3:
      return g3_values(p, y);
  }
  throw std::logic_error("g_values: unknown target");
}

/// Design standard error of the estimated cdf at the p-quantile, Hajek form:
///   sigma^2 = -(1/(2 N_hat^2)) sum_{i != j} ((pi_ij - pi_i pi_j)/pi_ij)
///             (a_i/pi_i - a_j/pi_j)^2,   a_i = I(y_i <= q) - F_hat(q).
/// Used to set the probe width of the Woodruff density estimate.
inline double woodruff_sigma_hajek(const DrawnSample& sample, const std::vector<double>& y,
                                   double q, double F_at_q) {
  const std::size_t n = sample.size();
  NeumaierSum nhat;
  for (double p : sample.pi1) nhat.add(1.0 / p);
  const double N_hat = nhat.value();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = (y[i] <= q ? 1.0 : 0.0) - F_at_q;
    u[i] = a / sample.pi1[i];
  }
  NeumaierSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pij = sample.pi2(i, j);
      const double factor = (pij - sample.pi1[i] * sample.pi1[j]) / pij;
      const double diff = u[i] - u[j];
      acc.add(-factor * diff * diff);
    }
  }
  // Rounding can leave a tiny negative where the estimate is structurally 0
  // (census, constant indicators); clamp -- woodruff_density rejects sigma=0.
  const double sigma2 = acc.value() / (N_hat * N_hat);
  return sigma2 > 0.0 ? std::sqrt(sigma2) : 0.0;
}

/// Calibration-weighted counterpart with terms w_i I(y_i <= q) / N.
inline double woodruff_sigma_calibration(const DrawnSample& sample, const std::vector<double>& y,
                                         double q, const std::vector<double>& w, double N) {
  const std::size_t n = sample.size();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (y[i] <= q ? w[i] : 0.0);
  NeumaierSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pij = sample.pi2(i, j);
      const double factor = (pij - sample.pi1[i] * sample.pi1[j]) / pij;
      const double diff = u[i] - u[j];
      acc.add(-factor * diff * diff);
    }
  }
  const double sigma2 = acc.value() / (N * N);
  return sigma2 > 0.0 ? std::sqrt(sigma2) : 0.0;
}

/// Woodruff density estimate at the p-quantile: the estimated cdf is probed
/// one normal-confidence step either side of p,
///   f_hat = (p_hi - p_lo) / (Q(p_hi) - Q(p_lo)),  p_{hi,lo} = p -+ z_{0.025} sigma
/// with probes clamped to [eps, 1-eps], eps = 1/(2 n_eff).  Without clamping
/// the ratio is exactly 2 z sigma / interval length.
inline double woodruff_density(const WeightedCdf& cdf, double p, double sigma,
                               std::size_t n_effective) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("woodruff_density: p outside (0,1)");
  if (!(sigma > 0.0)) throw degenerate_error("woodruff_density: zero sigma");
  const double z = z_for_level(0.95);
  const double eps = 1.0 / (2.0 * static_cast<double>(n_effective));
  double lo = p - z * sigma;
  double hi = p + z * sigma;
  if (lo < eps) lo = eps;
  if (hi > 1.0 - eps) hi = 1.0 - eps;
  if (!(hi > lo)) throw degenerate_error("woodruff_density: collapsed probe interval");
  const double width = cdf.quantile(hi) - cdf.quantile(lo);
  if (!(width > 0.0)) {
    throw degenerate_error("woodruff_density: zero-length quantile interval");
  }
  return (hi - lo) / width;
}

/// Variance estimates are reported as a Horvitz-Thompson-form /
/// Sen-Yates-Grundy-form pair.  Both carry the 1/N^2 scale of the estimator
/// itself, i.e. they estimate Var(b_hat) directly.
struct VarianceEstimate {
  double v2_ht = 0.0;
  double v2_syg = 0.0;
};

enum class VarianceMethod { ht, syg };

inline double selected(const VarianceEstimate& v, VarianceMethod m) {
  return m == VarianceMethod::ht ? v.v2_ht : v.v2_syg;
}

/// Hajek-basis linearization variance.  Centers g at its Hajek mean,
/// c_i = g_i - (sum g_i/pi_i)/(sum 1/pi_i), then
///   v_HT  = (1/N^2) sum_{i,j} ((pi_ij - pi_i pi_j)/(pi_ij pi_i pi_j)) c_i c_j
///   v_SYG = -(1/(2N^2)) sum_{i != j} ((pi_ij - pi_i pi_j)/pi_ij) (c_i/pi_i - c_j/pi_j)^2.
inline VarianceEstimate variance_hajek(const DrawnSample& sample, const std::vector<double>& g,
                                       double N) {
  const std::size_t n = sample.size();
  if (g.size() != n) throw std::invalid_argument("variance_hajek: g not aligned with sample");
  NeumaierSum num, den;
  for (std::size_t i = 0; i < n; ++i) {
    num.add(g[i] / sample.pi1[i]);
    den.add(1.0 / sample.pi1[i]);
  }
  const double gbar = num.value() / den.value();
  std::vector<double> c(n), ce(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = g[i] - gbar;
    ce[i] = c[i] / sample.pi1[i];
  }
  NeumaierSum ht, syg;
  for (std::size_t i = 0; i < n; ++i) {
    const double pi_i = sample.pi1[i];
    ht.add((1.0 - pi_i) / (pi_i * pi_i) * c[i] * c[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pij = sample.pi2(i, j);
      const double cov = pij - pi_i * sample.pi1[j];
      ht.add(2.0 * cov / (pij * pi_i * sample.pi1[j]) * c[i] * c[j]);
      const double diff = ce[i] - ce[j];
      syg.add(-(cov / pij) * diff * diff);
    }
  }
  VarianceEstimate v;
  v.v2_ht = ht.value() / (N * N);
  v.v2_syg = syg.value() / (N * N);
  return v;
}

/// Calibration-basis linearization variance.  g is first residualized on
/// (1, x) by weighted least squares -- weights w_i by default, 1/pi_i when
/// use_inverse_pi is set -- and the residuals enter with the calibration
/// weights:
///   v_HT  = (1/N^2) sum_{i,j} ((pi_ij - pi_i pi_j)/pi_ij) w_i E_i w_j E_j
///   v_SYG = -(1/(2N^2)) sum_{i != j} ((pi_ij - pi_i pi_j)/pi_ij) (w_i E_i - w_j E_j)^2.
inline VarianceEstimate variance_calibration(const DrawnSample& sample,
                                             const std::vector<double>& g,
                                             const std::vector<double>& x,
                                             const std::vector<double>& w, double N,
                                             bool use_inverse_pi = false) {
  const std::size_t n = sample.size();
  if (g.size() != n || x.size() != n || w.size() != n) {
    throw std::invalid_argument("variance_calibration: columns not aligned with sample");
  }
  // Weighted least squares of g on (1, x).
  NeumaierSum sv, svx, svxx, svg, svxg;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = use_inverse_pi ? 1.0 / sample.pi1[i] : w[i];
    sv.add(v);
    svx.add(v * x[i]);
    svxx.add(v * x[i] * x[i]);
    svg.add(v * g[i]);
    svxg.add(v * x[i] * g[i]);
  }
  const double a = sv.value(), b = svx.value(), c = svxx.value();
  const double det = a * c - b * b;
  double e0, e1;
  if (!(det > 1e-12 * a * c) || !std::isfinite(det)) {
    // Rank-deficient regression (constant x): fall back to mean-centering.
    e1 = 0.0;
    e0 = svg.value() / a;
  } else {
    e1 = (a * svxg.value() - b * svg.value()) / det;  // slope
    e0 = (svg.value() - e1 * b) / a;                  // intercept
  }
  std::vector<double> we(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = g[i] - e0 - e1 * x[i];
    we[i] = w[i] * resid;
  }
  NeumaierSum ht, syg;
  for (std::size_t i = 0; i < n; ++i) {
    const double pi_i = sample.pi1[i];
    ht.add((1.0 - pi_i) * we[i] * we[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pij = sample.pi2(i, j);
      const double cov = pij - pi_i * sample.pi1[j];
      ht.add(2.0 * (cov / pij) * we[i] * we[j]);
      const double diff = we[i] - we[j];
      syg.add(-(cov / pij) * diff * diff);
    }
  }
  VarianceEstimate v;
  v.v2_ht = ht.value() / (N * N);
  v.v2_syg = syg.value() / (N * N);
  return v;
}

/// Symmetric normal-theory interval around the point estimate.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline Interval normal_ci(double estimate, double v2, double level) {
  if (!(v2 >= 0.0)) {
    throw degenerate_error("normal_ci: negative variance estimate");
  }
  const double hw = z_for_level(level) * std::sqrt(v2);
  return Interval{estimate - hw, estimate + hw};
}

}  // namespace fpskew

#endif  // FPSKEW_VARIANCE_HPP
