// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fpskew/calibration.hpp"
#include "fpskew/estimators.hpp"
#include "fpskew/oracle.hpp"
#include "fpskew/population.hpp"
#include "fpskew/variance.hpp"

using namespace fpskew;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

GFunctionParams simple_g3_params() {
  GFunctionParams p;
  p.target = Target::b3;
  p.nu = 0.0;
  p.f_nu = 1.0;
  p.delta = 1.0;
  p.b_value = 0.0;
  return p;
}

GFunctionParams simple_g2_params() {
  GFunctionParams p;
  p.target = Target::b2;
  p.r = 0.25;
  p.nu_r = -1.0;
  p.nu = 0.0;
  p.nu_1mr = 1.0;
  p.f_nu_r = 1.0;
  p.f_nu = 1.0;
  p.f_nu_1mr = 1.0;
  p.delta = 1.0;
  p.b_value = 0.5;
  return p;
}

FinitePopulation two_strata_population() {
  FinitePopulation pop;
  pop.ids = {1, 2, 3, 4, 5, 6, 7};
  pop.x = {1, 1, 1, 1, 2, 2, 2};
  pop.y = {2.0, 4.5, 1.0, 3.0, 8.0, 6.5, 7.0};
  pop.strata = {1, 1, 1, 1, 2, 2, 2};
  return pop;
}

}  // namespace

TEST_CASE("g3 transform hand values", "[variance]") {
  GFunctionParams p = simple_g3_params();
  // g3(t) = t + I(t <= 0): the indicator jump is 1/f(nu).
  std::vector<double> g = g3_values(p, {-1.0, 0.0, 1.0, 2.5});
  REQUIRE(g[0] == 0.0);
  REQUIRE(g[1] == 1.0);  // boundary t = nu sits on the low side
  REQUIRE(g[2] == 1.0);
  REQUIRE(g[3] == 2.5);
  p.delta = 2.0;  // overall 1/delta scale
  std::vector<double> h = g3_values(p, {1.0, -1.0});
  REQUIRE(h[0] == 0.5);
  REQUIRE(h[1] == 0.0);
}

TEST_CASE("g3 with skew and density plug-ins", "[variance]") {
  GFunctionParams p;
  p.target = Target::b3;
  p.nu = 0.5;
  p.f_nu = 1.0;
  p.delta = 0.25;
  p.b_value = 0.0;
  // g(t) = 4t above nu, 4(t + 1) at or below.
  std::vector<double> g = g3_values(p, {0.3, 0.6, 2.0, 0.5});
  REQUIRE_THAT(g[0], WithinRel(5.2, 1e-15));
  REQUIRE_THAT(g[1], WithinRel(2.4, 1e-15));
  REQUIRE_THAT(g[2], WithinRel(8.0, 1e-15));
  REQUIRE_THAT(g[3], WithinRel(6.0, 1e-15));
}

TEST_CASE("g2 transform is piecewise constant over four regions", "[variance]") {
  GFunctionParams p = simple_g2_params();
  std::vector<double> g =
      g2_values(p, {-5.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5});
  // Below Q(r) every term is active: ((b-1) - (b+1) + 2)/2 = 0 identically.
  REQUIRE(g[0] == 0.0);
  REQUIRE(g[1] == 0.0);
  REQUIRE_THAT(g[2], WithinRel(0.75, 1e-15));   // ((b-1) + 2)/2
  REQUIRE_THAT(g[3], WithinRel(0.75, 1e-15));   // boundary t = nu
  REQUIRE_THAT(g[4], WithinRel(-0.25, 1e-15));  // (b-1)/2
  REQUIRE_THAT(g[5], WithinRel(-0.25, 1e-15));  // boundary t = Q(1-r)
  REQUIRE(g[6] == 0.0);
}

TEST_CASE("g transforms validate their plug-ins", "[variance]") {
  GFunctionParams p3 = simple_g3_params();
  p3.delta = 0.0;
  REQUIRE_THROWS_AS(g3_values(p3, {1.0}), degenerate_error);
  p3 = simple_g3_params();
  p3.f_nu = 0.0;
  REQUIRE_THROWS_AS(g3_values(p3, {1.0}), degenerate_error);

  GFunctionParams p2 = simple_g2_params();
  p2.nu_1mr = p2.nu_r;
  REQUIRE_THROWS_AS(g2_values(p2, {1.0}), degenerate_error);
  p2 = simple_g2_params();
  p2.f_nu_r = 0.0;
  REQUIRE_THROWS_AS(g2_values(p2, {1.0}), degenerate_error);
}

TEST_CASE("g_values dispatches on the target", "[variance]") {
  GFunctionParams p = simple_g3_params();
  p.target = Target::mean;
  const std::vector<double> y{3.0, -1.0, 2.0};
  REQUIRE(g_values(p, y) == y);
  p.target = Target::b3;
  REQUIRE(g_values(p, y) == g3_values(p, y));
}

TEST_CASE("srswor collapses both variance forms to (1-f) s^2 / n", "[variance]") {
  FinitePopulation pop = generate_population(41, 30, 1.0);
  SamplingDesign d = SamplingDesign::srswor(30, 7);
  DrawnSample s = draw(d, 13);
  std::vector<double> g = gather(pop.y, s);

  NeumaierSum sg;
  for (double v : g) sg.add(v);
  const double gbar = sg.value() / 7.0;
  NeumaierSum ss;
  for (double v : g) ss.add((v - gbar) * (v - gbar));
  const double s2 = ss.value() / 6.0;
  const double expected = (1.0 - 7.0 / 30.0) * s2 / 7.0;

  VarianceEstimate v = variance_hajek(s, g, 30.0);
  REQUIRE_THAT(v.v2_ht, WithinRel(expected, 1e-12));
  REQUIRE_THAT(v.v2_syg, WithinRel(expected, 1e-12));
  REQUIRE_THAT(v.v2_ht, WithinRel(v.v2_syg, 1e-12));
}

TEST_CASE("hajek variance is shift invariant", "[variance][property]") {
  FinitePopulation pop = two_strata_population();
  SamplingDesign d = SamplingDesign::stratified(pop, 5);
  DrawnSample s = draw(d, 3);
  std::vector<double> g = gather(pop.y, s);
  VarianceEstimate base = variance_hajek(s, g, 7.0);
  std::vector<double> shifted(g);
  for (double& v : shifted) v += 100.0;
  VarianceEstimate moved = variance_hajek(s, shifted, 7.0);
  REQUIRE_THAT(moved.v2_ht, WithinRel(base.v2_ht, 1e-9));
  REQUIRE_THAT(moved.v2_syg, WithinRel(base.v2_syg, 1e-9));
}

TEST_CASE("constant transform has zero variance", "[variance]") {
  SamplingDesign d = SamplingDesign::srswor(20, 6);
  DrawnSample s = draw(d, 2);
  VarianceEstimate v = variance_hajek(s, std::vector<double>(6, 3.7), 20.0);
  REQUIRE(std::abs(v.v2_ht) <= 1e-20);
  REQUIRE(std::abs(v.v2_syg) <= 1e-20);
}

TEST_CASE("single-unit strata keep the variance finite", "[variance]") {
  FinitePopulation pop;
  pop.ids = {1, 2, 3, 4, 5};
  pop.x = {1, 1, 1, 2, 2};
  pop.y = {1.0, 2.0, 4.0, 8.0, 16.0};
  pop.strata = {1, 1, 1, 2, 2};
  SamplingDesign d = SamplingDesign::stratified(pop, 2);
  REQUIRE(d.stratum_samples == std::vector<std::int64_t>({1, 1}));
  DrawnSample s = draw(d, 19);
  VarianceEstimate v = variance_hajek(s, gather(pop.y, s), 5.0);
  REQUIRE(std::isfinite(v.v2_ht));
  REQUIRE(std::isfinite(v.v2_syg));
  // Cross-stratum pairs are independent, so the SYG sum has no terms.
  REQUIRE(v.v2_syg == 0.0);
  REQUIRE(v.v2_ht > 0.0);
}

TEST_CASE("sen-yates-grundy form is design unbiased for the hajek mean", "[variance][oracle]") {
  SECTION("srswor") {
    FinitePopulation pop = generate_population(23, 6, 1.0);
    SamplingDesign d = SamplingDesign::srswor(6, 2);
    auto mean_stat = [&](const DrawnSample& s) {
      return hajek_cdf(s, gather(pop.y, s)).mean();
    };
    auto v_stat = [&](const DrawnSample& s) {
      return variance_hajek(s, gather(pop.y, s), 6.0).v2_syg;
    };
    EnumerationResult mean_enum = enumerate_design(d, mean_stat);
    EnumerationResult v_enum = enumerate_design(d, v_stat);
    REQUIRE(mean_enum.sample_count == 15.0);
    REQUIRE_THAT(v_enum.expectation, WithinRel(mean_enum.variance, 1e-12));
  }
  SECTION("stratified with two or more draws per stratum") {
    FinitePopulation pop = two_strata_population();
    SamplingDesign d = SamplingDesign::stratified(pop, 5);
    REQUIRE(d.stratum_samples == std::vector<std::int64_t>({3, 2}));
    auto mean_stat = [&](const DrawnSample& s) {
      return hajek_cdf(s, gather(pop.y, s)).mean();
    };
    auto v_stat = [&](const DrawnSample& s) {
      return variance_hajek(s, gather(pop.y, s), 7.0).v2_syg;
    };
    EnumerationResult mean_enum = enumerate_design(d, mean_stat);
    EnumerationResult v_enum = enumerate_design(d, v_stat);
    REQUIRE(mean_enum.sample_count == 12.0);
    REQUIRE_THAT(v_enum.expectation, WithinRel(mean_enum.variance, 1e-12));
  }
}

TEST_CASE("woodruff sigma vanishes when nothing varies", "[variance]") {
  SECTION("census") {
    SamplingDesign d = SamplingDesign::srswor(4, 4);
    DrawnSample s = draw(d, 1);
    REQUIRE(woodruff_sigma_hajek(s, {1, 2, 3, 4}, 2.5, 0.5) == 0.0);
  }
  SECTION("threshold beyond the data") {
    SamplingDesign d = SamplingDesign::srswor(10, 4);
    DrawnSample s = draw(d, 1);
    REQUIRE(woodruff_sigma_hajek(s, {1, 2, 3, 4}, 99.0, 1.0) == 0.0);
  }
}

TEST_CASE("woodruff sigma is design unbiased for the cdf variance", "[variance][oracle]") {
  FinitePopulation pop = generate_population(29, 6, 0.0);
  SamplingDesign d = SamplingDesign::srswor(6, 2);
  const double q = oracle_quantile(pop.y, std::vector<double>(6, 1.0), 0.5);
  auto cdf_stat = [&](const DrawnSample& s) {
    return hajek_cdf(s, gather(pop.y, s)).eval(q);
  };
  auto sigma2_stat = [&](const DrawnSample& s) {
    std::vector<double> y = gather(pop.y, s);
    const double F_hat = hajek_cdf(s, y).eval(q);
    const double sigma = woodruff_sigma_hajek(s, y, q, F_hat);
    return sigma * sigma;
  };
  EnumerationResult cdf_enum = enumerate_design(d, cdf_stat);
  EnumerationResult sig_enum = enumerate_design(d, sigma2_stat);
  REQUIRE(cdf_enum.variance > 0.0);
  REQUIRE_THAT(sig_enum.expectation, WithinRel(cdf_enum.variance, 1e-12));
}

TEST_CASE("woodruff density on a four point cdf", "[variance]") {
  WeightedCdf cdf({1, 2, 3, 4}, {1, 1, 1, 1});
  const double z = z_for_level(0.95);
  // Probes 0.5 -+ 0.1 z land in the second and third steps: width 1.
  const double f = woodruff_density(cdf, 0.5, 0.1, 4);
  REQUIRE_THAT(f, WithinAbs(2.0 * z * 0.1, 1e-12));
}

TEST_CASE("woodruff density approaches the true density on a fine grid", "[variance]") {
  const std::size_t k = 4096;
  std::vector<double> grid(k), mass(k, 1.0);
  for (std::size_t i = 0; i < k; ++i) grid[i] = (i + 0.5) / static_cast<double>(k);
  WeightedCdf cdf(grid, mass);
  const double sigma = 0.05 / z_for_level(0.95);  // probes at p -+ 0.05
  for (double p : {0.3, 0.5, 0.7}) {
    REQUIRE_THAT(woodruff_density(cdf, p, sigma, k), WithinRel(1.0, 0.01));
  }
}

TEST_CASE("woodruff density failure modes", "[variance]") {
  WeightedCdf cdf({1, 2}, {1, 1});
  REQUIRE_THROWS_AS(woodruff_density(cdf, 0.5, 0.0, 10), degenerate_error);
  REQUIRE_THROWS_AS(woodruff_density(cdf, 0.0, 0.1, 10), std::domain_error);
  REQUIRE_THROWS_AS(woodruff_density(cdf, 1.0, 0.1, 10), std::domain_error);
  // Both probes inside one step: zero-length quantile interval.
  REQUIRE_THROWS_AS(woodruff_density(cdf, 0.25, 1e-6, 1000000), degenerate_error);
}

TEST_CASE("woodruff density clamps tail probes", "[variance]") {
  WeightedCdf cdf({1, 2, 3, 4}, {1, 1, 1, 1});
  // hi = 0.9 + z * 0.2 > 1 clamps to 1 - 1/8; the interval stays usable.
  const double f = woodruff_density(cdf, 0.9, 0.2, 4);
  REQUIRE(std::isfinite(f));
  REQUIRE(f > 0.0);
}

TEST_CASE("calibration variance vanishes on exactly linear transforms", "[variance]") {
  SamplingDesign d = SamplingDesign::srswor(10, 5);
  DrawnSample s = draw(d, 3);
  std::vector<double> x(5), g(5);
  for (std::size_t i = 0; i < 5; ++i) {
    x[i] = 1.0 + static_cast<double>(s.units[i]);
    g[i] = 2.0 + 3.0 * x[i];
  }
  std::vector<double> w(5, 2.0);
  VarianceEstimate v = variance_calibration(s, g, x, w, 10.0);
  REQUIRE(std::abs(v.v2_ht) <= 1e-20);
  REQUIRE(std::abs(v.v2_syg) <= 1e-20);
}

TEST_CASE("calibration variance is zero under a census", "[variance]") {
  SamplingDesign d = SamplingDesign::srswor(4, 4);
  DrawnSample s = draw(d, 1);
  VarianceEstimate v =
      variance_calibration(s, {1, 5, 2, 9}, {1, 2, 3, 4}, {1, 1, 1, 1}, 4.0);
  REQUIRE(v.v2_ht == 0.0);
  REQUIRE(v.v2_syg == 0.0);
}

TEST_CASE("constant auxiliary falls back to mean centering", "[variance]") {
  SamplingDesign d = SamplingDesign::srswor(6, 3);
  DrawnSample s = draw(d, 8);
  // pi = 1/2, pi_ij = 1/5; weighted mean of g is 7/3, centered residuals
  // {-4/3, -1/3, 5/3}, expanded by w = 2.  Both forms reduce to 7/18.
  VarianceEstimate v =
      variance_calibration(s, {1, 2, 4}, {3, 3, 3}, {2, 2, 2}, 6.0);
  REQUIRE_THAT(v.v2_ht, WithinRel(7.0 / 18.0, 1e-12));
  REQUIRE_THAT(v.v2_syg, WithinRel(7.0 / 18.0, 1e-12));
}

TEST_CASE("regression weighting choice matters when w and 1/pi differ", "[variance]") {
  FinitePopulation pop = two_strata_population();
  SamplingDesign d = SamplingDesign::stratified(pop, 5);
  DrawnSample s = draw(d, 4);
  std::vector<double> x = gather(pop.x, s);
  std::vector<double> g = gather(pop.y, s);
  // Bend x so the regression is not exact and perturb the weights.
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += 0.1 * static_cast<double>(i);
  std::vector<double> w(s.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1.0 / s.pi1[i]) * (1.0 + 0.2 * (i % 2));
  VarianceEstimate with_w = variance_calibration(s, g, x, w, 7.0, false);
  VarianceEstimate with_pi = variance_calibration(s, g, x, w, 7.0, true);
  REQUIRE(with_w.v2_syg != with_pi.v2_syg);
  REQUIRE(with_w.v2_ht != with_pi.v2_ht);
}

TEST_CASE("calibration estimator of a linear total has zero design variance", "[variance][oracle]") {
  // y exactly linear in x: every sample calibrates to the census total, so
  // the enumerated variance and each per-sample variance estimate vanish.
  const std::vector<double> xs{1, 2, 3, 4, 5, 6};
  std::vector<double> ys(6);
  for (std::size_t i = 0; i < 6; ++i) ys[i] = 2.0 + 3.0 * xs[i];
  const double t_x = 21.0;
  SamplingDesign d = SamplingDesign::srswor(6, 4);
  auto cal_mean = [&](const DrawnSample& s) {
    std::vector<double> x = gather(xs, s);
    std::vector<double> y = gather(ys, s);
    CalibrationWeights cw = solve_raking(s, x, 6.0, t_x);
    NeumaierSum acc;
    for (std::size_t i = 0; i < y.size(); ++i) acc.add(cw.w[i] * y[i]);
    return acc.value() / 6.0;
  };
  EnumerationResult e = enumerate_design(d, cal_mean);
  REQUIRE(e.sample_count == 15.0);
  REQUIRE_THAT(e.expectation, WithinRel(2.0 + 3.0 * 3.5, 1e-9));
  REQUIRE(e.variance <= 1e-16);

  DrawnSample s = draw(d, 6);
  std::vector<double> x = gather(xs, s);
  std::vector<double> y = gather(ys, s);
  CalibrationWeights cw = solve_raking(s, x, 6.0, t_x);
  VarianceEstimate v = variance_calibration(s, y, x, cw.w, 6.0);
  REQUIRE(std::abs(v.v2_ht) <= 1e-20);
  REQUIRE(std::abs(v.v2_syg) <= 1e-20);
}

TEST_CASE("normal confidence intervals", "[variance]") {
  Interval iv = normal_ci(0.0, 1.0, 0.95);
  REQUIRE_THAT(iv.hi, WithinAbs(1.959963984540054, 1e-9));
  REQUIRE_THAT(iv.lo, WithinAbs(-1.959963984540054, 1e-9));
  Interval point = normal_ci(3.0, 0.0, 0.99);
  REQUIRE(point.lo == 3.0);
  REQUIRE(point.hi == 3.0);
  Interval shifted = normal_ci(10.0, 4.0, 0.95);
  REQUIRE_THAT(shifted.hi - 10.0, WithinAbs(10.0 - shifted.lo, 1e-12));
  REQUIRE_THROWS_AS(normal_ci(0.0, -1e-9, 0.95), degenerate_error);
}

TEST_CASE("misaligned variance inputs are rejected", "[variance]") {
  SamplingDesign d = SamplingDesign::srswor(6, 3);
  DrawnSample s = draw(d, 8);
  REQUIRE_THROWS_AS(variance_hajek(s, {1.0}, 6.0), std::invalid_argument);
  REQUIRE_THROWS_AS(variance_calibration(s, {1, 2, 3}, {1, 2}, {1, 1, 1}, 6.0),
                    std::invalid_argument);
}
