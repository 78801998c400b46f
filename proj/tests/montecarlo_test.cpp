// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "fpskew/montecarlo.hpp"
#include "fpskew/oracle.hpp"

using namespace fpskew;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("benchmark ratio for the variance of a variance", "[montecarlo]") {
  REQUIRE_THAT(krw_benchmark(40), WithinAbs(0.226, 5e-4));
  REQUIRE_THAT(krw_benchmark(80), WithinAbs(0.159, 5e-4));
  REQUIRE(krw_benchmark(2) == std::sqrt(2.0));
  REQUIRE_THROWS_AS(krw_benchmark(1), std::invalid_argument);
}

TEST_CASE("metric aggregation on a worked example", "[montecarlo]") {
  const std::vector<std::optional<double>> set1{1.1, 0.9};
  std::vector<ReplicateOutcome> set2{
      {true, 1.05, 0.0025},
      {true, 0.95, 0.0025},
  };
  EstimatorMetrics m = aggregate_metrics("demo", 1.0, set1, set2, {0.5, 0.95});
  REQUIRE(m.set1_used == 2);
  REQUIRE(m.set1_failed == 0);
  REQUIRE(m.set2_used == 2);
  REQUIRE_THAT(m.mse, WithinRel(0.01, 1e-12));
  REQUIRE_THAT(m.rmse, WithinRel(0.1, 1e-12));
  REQUIRE_THAT(m.bias, WithinAbs(0.0, 1e-15));
  REQUIRE_THAT(m.bias2_over_mse, WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(m.avg_v, WithinRel(0.05, 1e-12));       // mean reported sd
  REQUIRE_THAT(m.rel_bias, WithinRel(-0.75, 1e-12));   // 0.0025/0.01 - 1
  REQUIRE_THAT(m.rel_stab_krw, WithinRel(0.75, 1e-12));
  REQUIRE_THAT(m.rel_stab_literal, WithinRel(-0.25, 1e-12));

  // At 95% the half-width 1.96 * 0.05 covers the truth from both sides.
  REQUIRE(m.levels.size() == 2);
  REQUIRE(m.levels[1].level == 0.95);
  REQUIRE(m.levels[1].coverage == 1.0);
  REQUIRE(m.levels[1].lte == 0.0);
  REQUIRE(m.levels[1].rte == 0.0);
  // At 50% the half-width 0.674 * 0.05 misses on opposite sides.
  REQUIRE(m.levels[0].level == 0.5);
  REQUIRE(m.levels[0].coverage == 0.0);
  REQUIRE(m.levels[0].lte == 0.5);
  REQUIRE(m.levels[0].rte == 0.5);
}

TEST_CASE("failed replications are excluded and counted", "[montecarlo]") {
  const std::vector<std::optional<double>> set1{1.2, std::nullopt, 0.8, std::nullopt};
  std::vector<ReplicateOutcome> set2{
      {true, 1.0, 0.01},
      {false, 0.0, 0.0},
      {true, 1.1, 0.01},
  };
  EstimatorMetrics m = aggregate_metrics("demo", 1.0, set1, set2, {0.95});
  REQUIRE(m.set1_used == 2);
  REQUIRE(m.set1_failed == 2);
  REQUIRE(m.set2_used == 2);
  REQUIRE(m.set2_failed == 1);
  REQUIRE_THAT(m.mse, WithinRel(0.04, 1e-12));
  // Denominators are the usable coverage replications.
  REQUIRE(m.levels[0].coverage + m.levels[0].lte + m.levels[0].rte == 1.0);
}

TEST_CASE("aggregation with nothing usable fails loudly", "[montecarlo]") {
  const std::vector<std::optional<double>> empty_set1{std::nullopt};
  std::vector<ReplicateOutcome> ok_set2{{true, 1.0, 0.01}};
  REQUIRE_THROWS_AS(aggregate_metrics("demo", 1.0, empty_set1, ok_set2, {0.95}),
                    degenerate_error);
  const std::vector<std::optional<double>> ok_set1{1.0};
  std::vector<ReplicateOutcome> bad_set2{{false, 0.0, 0.0}};
  REQUIRE_THROWS_AS(aggregate_metrics("demo", 1.0, ok_set1, bad_set2, {0.95}),
                    degenerate_error);
}

TEST_CASE("enormous variances cover everything", "[montecarlo]") {
  const std::vector<std::optional<double>> set1{5.0};
  std::vector<ReplicateOutcome> set2{{true, 5.0, 1e12}};
  EstimatorMetrics m = aggregate_metrics("demo", 1.0, set1, set2, {0.9, 0.99});
  for (const auto& lm : m.levels) {
    REQUIRE(lm.coverage == 1.0);
    REQUIRE(lm.lte == 0.0);
    REQUIRE(lm.rte == 0.0);
  }
}

TEST_CASE("census simulation reproduces the truth exactly", "[montecarlo]") {
  SimulationConfig cfg;
  cfg.N = 12;
  cfg.gamma = 1.0;
  cfg.pop_seed = 4;
  cfg.design = DesignKind::srswor;
  cfg.n = 12;
  cfg.r = 0.75;
  cfg.replications = 4;
  cfg.master_seed = 99;
  SimulationReport report = run_simulation(cfg);
  REQUIRE(report.estimators.size() == 6);
  for (const auto& m : report.estimators) {
    REQUIRE(m.set1_used == 4);
    REQUIRE(m.set2_used == 4);
    REQUIRE(m.mse == 0.0);
    REQUIRE(m.rmse == 0.0);
    REQUIRE(m.bias == 0.0);
    REQUIRE(std::isnan(m.rel_bias));
    REQUIRE(std::isnan(m.rel_stab_krw));
    for (const auto& lm : m.levels) {
      REQUIRE(lm.coverage == 1.0);
    }
  }
}

TEST_CASE("simulation reports are independent of the thread count", "[montecarlo]") {
  SimulationConfig cfg;
  cfg.N = 24;
  cfg.gamma = 1.0;
  cfg.pop_seed = 11;
  cfg.design = DesignKind::srswor;
  cfg.n = 6;
  cfg.r = 0.25;
  cfg.replications = 30;
  cfg.master_seed = 2468;
  cfg.threads = 1;
  SimulationReport one = run_simulation(cfg);
  cfg.threads = 3;
  SimulationReport three = run_simulation(cfg);
  REQUIRE(coverage_csv(one) == coverage_csv(three));
  REQUIRE(metrics_csv(one) == metrics_csv(three));
  for (std::size_t k = 0; k < one.estimators.size(); ++k) {
    REQUIRE(one.estimators[k].mse == three.estimators[k].mse);
    REQUIRE(one.estimators[k].bias == three.estimators[k].bias);
    REQUIRE(one.estimators[k].set1_failed == three.estimators[k].set1_failed);
  }

  // Coverage is monotone in the level within one report.
  for (const auto& m : one.estimators) {
    REQUIRE(m.levels.size() == 3);
    REQUIRE(m.levels[0].level == 0.90);
    REQUIRE(m.levels[2].level == 0.99);
    REQUIRE(m.levels[2].coverage >= m.levels[1].coverage);
    REQUIRE(m.levels[1].coverage >= m.levels[0].coverage);
  }
}

TEST_CASE("csv outputs have the documented shape", "[montecarlo]") {
  SimulationConfig cfg;
  cfg.N = 16;
  cfg.n = 4;
  cfg.pop_seed = 8;
  cfg.replications = 5;
  cfg.master_seed = 5;
  SimulationReport report = run_simulation(cfg);
  const std::string cov = coverage_csv(report);
  REQUIRE(cov.rfind("estimator,level,coverage,lte,rte\n", 0) == 0);
  REQUIRE(std::count(cov.begin(), cov.end(), '\n') == 1 + 6 * 3);
  const std::string met = metrics_csv(report);
  REQUIRE(met.rfind(
              "estimator,bias,rmse,bias2_over_mse,avg_v,rel_bias,rel_stab_literal,rel_stab_krw\n",
              0) == 0);
  REQUIRE(std::count(met.begin(), met.end(), '\n') == 1 + 6);
  REQUIRE(coverage_csv(report) == cov);  // rendering is pure
}

TEST_CASE("variance estimates track the enumerated design variance", "[montecarlo][oracle][slow]") {
  FinitePopulation pop = generate_population(31, 8, 0.0);
  SamplingDesign d = SamplingDesign::srswor(8, 3);
  auto mean_stat = [&](const DrawnSample& s) {
    return hajek_cdf(s, gather(pop.y, s)).mean();
  };
  EnumerationResult truth_enum = enumerate_design(d, mean_stat);
  const double mu = truth_enum.expectation;
  const double trueV = truth_enum.variance;
  REQUIRE(trueV > 0.0);

  const int R = 2000;
  std::vector<std::optional<double>> set1(R);
  std::vector<ReplicateOutcome> set2(R);
  for (int h = 0; h < R; ++h) {
    DrawnSample s1 = draw(d, mix_seed(777, 1, static_cast<std::uint64_t>(h)));
    set1[static_cast<std::size_t>(h)] = mean_stat(s1);
    DrawnSample s2 = draw(d, mix_seed(777, 2, static_cast<std::uint64_t>(h)));
    std::vector<double> y = gather(pop.y, s2);
    ReplicateOutcome out;
    out.ok = true;
    out.estimate = hajek_cdf(s2, y).mean();
    out.v2 = variance_hajek(s2, y, 8.0).v2_syg;
    set2[static_cast<std::size_t>(h)] = out;
  }
  EstimatorMetrics m = aggregate_metrics("mean_hajek", mu, set1, set2, {0.95});
  REQUIRE_THAT(m.mse, WithinRel(trueV, 0.15));
  REQUIRE(std::abs(m.rel_bias) < 0.15);
}
