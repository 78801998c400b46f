// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_MONTECARLO_HPP
#define FPSKEW_MONTECARLO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fpskew/config.hpp"
#include "fpskew/design.hpp"
#include "fpskew/errors.hpp"
#include "fpskew/inference.hpp"
#include "fpskew/population.hpp"
#include "fpskew/rng.hpp"

namespace fpskew {

/// Outcome of one estimator on one replication of the coverage set.
struct ReplicateOutcome {
  bool ok = false;
  double estimate = 0.0;
  double v2 = 0.0;  // variance selected by the configured method
};

struct LevelMetrics {
  double level = 0.0;
  double coverage = 0.0;
  double lte = 0.0;  // truth below the interval
  double rte = 0.0;  // truth above the interval
};

struct EstimatorMetrics {
  std::string name;
  double truth = 0.0;
  int set1_used = 0;
  int set1_failed = 0;
  int set2_used = 0;
  int set2_failed = 0;
  double mse = 0.0;   // from the point-estimate set
  double rmse = 0.0;
  double bias = 0.0;  // from the coverage set
  double bias2_over_mse = 0.0;
  double avg_v = 0.0;  // mean reported standard error
  double rel_bias = 0.0;
  double rel_stab_literal = 0.0;  // sqrt(mean (v - mse)^2)/mse - 1 as printed in the source formula
  double rel_stab_krw = 0.0;      // same ratio without the trailing -1
  std::vector<LevelMetrics> levels;
};

struct SimulationReport {
  SimulationConfig config;
  PopulationParams truth;
  double krw_benchmark = 0.0;
  std::vector<EstimatorMetrics> estimators;
};

/// Kang-Ryu-Woodruff-style stability reference level sqrt(2/(n-1)): the
/// relative standard deviation a chi-square-shaped variance estimate with
/// n - 1 degrees of freedom would have.
inline double krw_benchmark(std::int64_t n) {
  if (n < 2) throw std::invalid_argument("krw_benchmark: need n >= 2");
  return std::sqrt(2.0 / static_cast<double>(n - 1));
}

/// Pure aggregation of replication outputs into the reported metrics; the
/// mse comes from set1 (point estimates), everything else from set2.
/// Failed replications are excluded and counted.
inline EstimatorMetrics aggregate_metrics(const std::string& name, double truth,
                                          const std::vector<std::optional<double>>& set1,
                                          const std::vector<ReplicateOutcome>& set2,
                                          const std::vector<double>& levels) {
  EstimatorMetrics m;
  m.name = name;
  m.truth = truth;

  NeumaierSum sq;
  for (const auto& e : set1) {
    if (!e.has_value()) {
      ++m.set1_failed;
      continue;
    }
    const double d = *e - truth;
    sq.add(d * d);
    ++m.set1_used;
  }
  if (m.set1_used == 0) throw degenerate_error("aggregate_metrics: no usable point replications");
  m.mse = sq.value() / m.set1_used;
  m.rmse = std::sqrt(m.mse);

  NeumaierSum sum_e, sum_sd, sum_v, sum_dev2;
  for (const auto& r : set2) {
    if (!r.ok) {
      ++m.set2_failed;
      continue;
    }
    ++m.set2_used;
    sum_e.add(r.estimate);
    sum_sd.add(std::sqrt(r.v2));
    sum_v.add(r.v2);
    const double dev = r.v2 - m.mse;
    sum_dev2.add(dev * dev);
  }
  if (m.set2_used == 0) throw degenerate_error("aggregate_metrics: no usable coverage replications");
  m.bias = sum_e.value() / m.set2_used - truth;
  m.avg_v = sum_sd.value() / m.set2_used;
  if (m.mse > 0.0) {
    m.bias2_over_mse = m.bias * m.bias / m.mse;
    m.rel_bias = (sum_v.value() / m.set2_used) / m.mse - 1.0;
    m.rel_stab_krw = std::sqrt(sum_dev2.value() / m.set2_used) / m.mse;
    m.rel_stab_literal = m.rel_stab_krw - 1.0;
  } else {
    m.bias2_over_mse = m.rel_bias = m.rel_stab_krw = m.rel_stab_literal =
        std::numeric_limits<double>::quiet_NaN();
  }

  for (double level : levels) {
    const double z = z_for_level(level);
    int cover = 0, lte = 0, rte = 0;
    for (const auto& r : set2) {
      if (!r.ok) continue;
      const double hw = z * std::sqrt(r.v2);
      if (truth < r.estimate - hw) {
        ++lte;
      } else if (truth > r.estimate + hw) {
        ++rte;
      } else {
        ++cover;
      }
    }
    LevelMetrics lm;
    lm.level = level;
    lm.coverage = static_cast<double>(cover) / m.set2_used;
    lm.lte = static_cast<double>(lte) / m.set2_used;
    lm.rte = static_cast<double>(rte) / m.set2_used;
    m.levels.push_back(lm);
  }
  return m;
}

/// The six headline estimators: mean, b2(r), b3, each under the Hajek and the
/// calibration basis.
inline std::vector<EstimatorKind> default_estimators(double r) {
  return {
      EstimatorKind{CdfBasis::hajek, Target::mean, r},
      EstimatorKind{CdfBasis::calibration, Target::mean, r},
      EstimatorKind{CdfBasis::hajek, Target::b2, r},
      EstimatorKind{CdfBasis::calibration, Target::b2, r},
      EstimatorKind{CdfBasis::hajek, Target::b3, r},
      EstimatorKind{CdfBasis::calibration, Target::b3, r},
  };
}

namespace detail {

/// Point estimates for every estimator on one sample, sharing the basis cdfs.
/// Recoverable statistical failures become nullopt; anything else propagates.
inline void point_estimates(const DrawnSample& sample, const std::vector<double>& y,
                            const std::vector<double>& x, double N, double t_x,
                            const std::vector<EstimatorKind>& kinds, const EstimateOptions& opt,
                            std::vector<std::optional<double>>& out) {
  std::optional<WeightedCdf> hajek;
  std::optional<WeightedCdf> cal;
  bool cal_failed = false;
  out.assign(kinds.size(), std::nullopt);
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    try {
      const WeightedCdf* cdf = nullptr;
      if (kinds[k].basis == CdfBasis::calibration) {
        if (cal_failed) continue;
        if (!cal.has_value()) {
          CalibrationWeights cw = solve_raking(sample, x, N, t_x, opt.cal_tol, opt.cal_max_iter);
          cal.emplace(WeightedCdf(y, cw.w));
        }
        cdf = &*cal;
      } else {
        if (!hajek.has_value()) hajek.emplace(hajek_cdf(sample, y));
        cdf = &*hajek;
      }
      out[k] = evaluate_target(*cdf, kinds[k].target, kinds[k].r);
    } catch (const degenerate_error&) {
    } catch (const collinearity_error&) {
      if (kinds[k].basis == CdfBasis::calibration) cal_failed = true;
    } catch (const convergence_error&) {
      if (kinds[k].basis == CdfBasis::calibration) cal_failed = true;
    }
  }
}

}  // namespace detail

/// Run the two-set simulation protocol on a prepared population:
///   set 1 (streams mix(master, 1, h)) collects point estimates for the mse;
///   set 2 (streams mix(master, 2, h)) collects estimates with variances for
///   bias, coverage and variance-quality metrics.
/// Every replication h is a pure function of (master_seed, set, h), so the
/// report is identical for any thread count.
inline SimulationReport run_simulation(const SimulationConfig& cfg, const FinitePopulation& pop0) {
  pop0.validate();
  FinitePopulation pop = pop0;
  SamplingDesign design;
  if (cfg.design == DesignKind::stratified_srswor) {
    if (pop.stratum_count() == 0) pop = stratify_by_x(pop, cfg.strata);
    design = SamplingDesign::stratified(pop, cfg.n);
  } else {
    design = SamplingDesign::srswor(static_cast<std::int64_t>(pop.size()), cfg.n);
  }

  const double N = static_cast<double>(pop.size());
  const double t_x = population_x_total(pop);
  const std::vector<EstimatorKind> kinds = default_estimators(cfg.r);
  EstimateOptions opt;
  opt.method = cfg.method;
  opt.use_inverse_pi = cfg.use_inverse_pi;
  opt.levels = cfg.levels;

  const int R = cfg.replications;
  if (R < 1) throw std::invalid_argument("run_simulation: replications must be >= 1");
  std::vector<std::vector<std::optional<double>>> set1(
      kinds.size(), std::vector<std::optional<double>>(static_cast<std::size_t>(R)));
  std::vector<std::vector<ReplicateOutcome>> set2(
      kinds.size(), std::vector<ReplicateOutcome>(static_cast<std::size_t>(R)));

  auto run_block = [&](int h_begin, int h_end) {
    std::vector<std::optional<double>> points(kinds.size());
    for (int h = h_begin; h < h_end; ++h) {
      {
        const DrawnSample s = draw(design, mix_seed(cfg.master_seed, 1, static_cast<std::uint64_t>(h)));
        const std::vector<double> ys = gather(pop.y, s);
        const std::vector<double> xs = gather(pop.x, s);
        detail::point_estimates(s, ys, xs, N, t_x, kinds, opt, points);
        for (std::size_t k = 0; k < kinds.size(); ++k) set1[k][static_cast<std::size_t>(h)] = points[k];
      }
      {
        const DrawnSample s = draw(design, mix_seed(cfg.master_seed, 2, static_cast<std::uint64_t>(h)));
        const std::vector<double> ys = gather(pop.y, s);
        const std::vector<double> xs = gather(pop.x, s);
        for (std::size_t k = 0; k < kinds.size(); ++k) {
          ReplicateOutcome& out = set2[k][static_cast<std::size_t>(h)];
          try {
            const EstimateRecord rec = estimate_with_variance(s, ys, xs, N, t_x, kinds[k], opt);
            out.ok = true;
            out.estimate = rec.estimate;
            out.v2 = selected(rec.v2, opt.method);
          } catch (const degenerate_error&) {
          } catch (const collinearity_error&) {
          } catch (const convergence_error&) {
          }
        }
      }
    }
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    run_block(0, R);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    const int chunk = (R + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int lo = t * chunk;
      const int hi = std::min(R, lo + chunk);
      pool.emplace_back([&, t, lo, hi]() {
        try {
          if (lo < hi) run_block(lo, hi);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  SimulationReport report;
  report.config = cfg;
  report.truth = true_parameters(pop, cfg.r);
  report.krw_benchmark = krw_benchmark(cfg.n);
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    double truth = 0.0;
    switch (kinds[k].target) {
      case Target::mean:
        truth = report.truth.mu;
        break;
      case Target::b2:
        truth = report.truth.b2;
        break;
      case Target::b3:
        truth = report.truth.b3;
        break;
    }
    report.estimators.push_back(
        aggregate_metrics(kinds[k].name(), truth, set1[k], set2[k], cfg.levels));
  }
  return report;
}

/// Convenience overload that materializes the population from the config.
inline SimulationReport run_simulation(const SimulationConfig& cfg) {
  FinitePopulation pop = cfg.population_file.empty()
                             ? generate_population(cfg.pop_seed, cfg.N, cfg.gamma)
                             : read_population_csv_file(cfg.population_file);
  return run_simulation(cfg, pop);
}

namespace detail {

inline std::string format_g10(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return std::string(buf);
}

}  // namespace detail

/// CSV of per-level interval behaviour: estimator,level,coverage,lte,rte.
inline std::string coverage_csv(const SimulationReport& report) {
  std::string out = "estimator,level,coverage,lte,rte\n";
  for (const auto& m : report.estimators) {
    for (const auto& lm : m.levels) {
      out += m.name + ',' + detail::format_g10(lm.level) + ',' + detail::format_g10(lm.coverage) +
             ',' + detail::format_g10(lm.lte) + ',' + detail::format_g10(lm.rte) + '\n';
    }
  }
  return out;
}

/// CSV of estimator quality metrics:
/// estimator,bias,rmse,bias2_over_mse,avg_v,rel_bias,rel_stab_literal,rel_stab_krw.
inline std::string metrics_csv(const SimulationReport& report) {
  std::string out = "estimator,bias,rmse,bias2_over_mse,avg_v,rel_bias,rel_stab_literal,rel_stab_krw\n";
  for (const auto& m : report.estimators) {
    out += m.name + ',' + detail::format_g10(m.bias) + ',' + detail::format_g10(m.rmse) + ',' +
           detail::format_g10(m.bias2_over_mse) + ',' + detail::format_g10(m.avg_v) + ',' +
           detail::format_g10(m.rel_bias) + ',' + detail::format_g10(m.rel_stab_literal) + ',' +
           detail::format_g10(m.rel_stab_krw) + '\n';
  }
  return out;
}

}  // namespace fpskew

#endif  // FPSKEW_MONTECARLO_HPP
