// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Command line front end: population generation, sample drawing, single-sample
// estimation, simulation runs, oracle verification, and figure-data export.
//
// Exit codes: 0 success, 1 usage/input error, 2 numerical failure.  With
// --error-json a machine-readable error object is printed to stdout instead of
// the human-readable stderr message.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpskew/calibration.hpp"
#include "fpskew/config.hpp"
#include "fpskew/design.hpp"
#include "fpskew/estimators.hpp"
#include "fpskew/inference.hpp"
#include "fpskew/montecarlo.hpp"
#include "fpskew/numeric.hpp"
#include "fpskew/oracle.hpp"
#include "fpskew/population.hpp"
#include "fpskew/rng.hpp"
#include "fpskew/serialize.hpp"
#include "fpskew/variance.hpp"
#include "fpskew/wcdf.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct ClassifiedError {
  int exit_code = kExitNumerical;
  std::string type = "unknown";
  std::string message;
  std::optional<double> last_residual;
};

ClassifiedError classify(const std::exception& e) {
  ClassifiedError c;
  c.message = e.what();
  if (const auto* conv = dynamic_cast<const fpskew::convergence_error*>(&e)) {
    c.exit_code = kExitNumerical;
    c.type = "convergence";
    c.last_residual = conv->last_residual();
  } else if (dynamic_cast<const fpskew::collinearity_error*>(&e)) {
    c.exit_code = kExitNumerical;
    c.type = "collinearity";
  } else if (dynamic_cast<const fpskew::degenerate_error*>(&e)) {
    c.exit_code = kExitNumerical;
    c.type = "degenerate";
  } else if (dynamic_cast<const fpskew::allocation_error*>(&e)) {
    c.exit_code = kExitNumerical;
    c.type = "allocation";
  } else if (dynamic_cast<const fpskew::enumeration_bound_error*>(&e)) {
    c.exit_code = kExitNumerical;
    c.type = "enumeration_bound";
  } else if (dynamic_cast<const fpskew::parse_error*>(&e)) {
    c.exit_code = kExitUsage;
    c.type = "parse";
  } else if (dynamic_cast<const std::domain_error*>(&e)) {
    c.exit_code = kExitUsage;
    c.type = "domain";
  } else if (dynamic_cast<const std::invalid_argument*>(&e)) {
    c.exit_code = kExitUsage;
    c.type = "invalid_argument";
  }
  return c;
}

int report_error(const ClassifiedError& c, bool error_json) {
  if (error_json) {
    nlohmann::json j;
    j["schema"] = fpskew::kJsonSchema;
    j["error"] = {{"type", c.type}, {"message", c.message}};
    if (c.last_residual.has_value()) j["error"]["last_residual"] = *c.last_residual;
    j["exit_code"] = c.exit_code;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cerr << "fpskew: error: " << c.message << "\n";
  }
  return c.exit_code;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw fpskew::parse_error("cannot open for writing: " + path);
  f << text;
  if (!f) throw fpskew::parse_error("write failed: " + path);
}

fpskew::SamplingDesign make_design(const fpskew::FinitePopulation& pop, const std::string& kind,
                                   std::int64_t n, int strata,
                                   fpskew::FinitePopulation& working) {
  working = pop;
  if (kind == "srswor") {
    return fpskew::SamplingDesign::srswor(static_cast<std::int64_t>(pop.size()), n);
  }
  if (kind != "stratified") {
    throw std::invalid_argument("unknown design '" + kind + "' (srswor|stratified)");
  }
  if (working.stratum_count() == 0) working = fpskew::stratify_by_x(working, strata);
  return fpskew::SamplingDesign::stratified(working, n);
}

fpskew::CdfBasis parse_basis(const std::string& s) {
  if (s == "hajek") return fpskew::CdfBasis::hajek;
  if (s == "ht") return fpskew::CdfBasis::ht;
  if (s == "calibration" || s == "cal") return fpskew::CdfBasis::calibration;
  throw std::invalid_argument("unknown basis '" + s + "' (hajek|ht|calibration)");
}

fpskew::Target parse_target(const std::string& s) {
  if (s == "mean") return fpskew::Target::mean;
  if (s == "b2") return fpskew::Target::b2;
  if (s == "b3") return fpskew::Target::b3;
  throw std::invalid_argument("unknown target '" + s + "' (mean|b2|b3)");
}

std::vector<double> parse_levels(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0' || !(v > 0.0 && v < 1.0)) {
      throw std::invalid_argument("bad level '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty level list");
  return out;
}

std::string stem_of(const std::string& path) {
  std::size_t slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
  return base.empty() ? std::string("report") : base;
}

// ---- verify: compact oracle suite ------------------------------------------

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

VerifyCheck check_syg_unbiasedness() {
  VerifyCheck c{"syg variance unbiased for the hajek mean (N=6, n=2)", false, ""};
  fpskew::FinitePopulation pop = fpskew::generate_population(23, 6, 1.0);
  fpskew::SamplingDesign d = fpskew::SamplingDesign::srswor(6, 2);
  auto mean_stat = [&](const fpskew::DrawnSample& s) {
    return fpskew::hajek_cdf(s, fpskew::gather(pop.y, s)).mean();
  };
  auto v_stat = [&](const fpskew::DrawnSample& s) {
    return fpskew::variance_hajek(s, fpskew::gather(pop.y, s), 6.0).v2_syg;
  };
  const double truth = fpskew::enumerate_design(d, mean_stat).variance;
  const double mean_v = fpskew::enumerate_design(d, v_stat).expectation;
  const double rel = std::abs(mean_v - truth) / truth;
  c.pass = rel <= 1e-12;
  std::ostringstream os;
  os << "relative error " << rel;
  c.detail = os.str();
  return c;
}

VerifyCheck check_census_consistency() {
  VerifyCheck c{"census consistency on {1,2,3,4}", false, ""};
  fpskew::WeightedCdf cdf({1, 2, 3, 4}, {1, 1, 1, 1});
  const double b3v = fpskew::b3(cdf);
  const double b2v = fpskew::b2(cdf, 0.25);
  c.pass = b3v == 0.5 && b2v == 0.0;
  std::ostringstream os;
  os << "b3 = " << b3v << ", b2(0.25) = " << b2v;
  c.detail = os.str();
  return c;
}

VerifyCheck check_contamination() {
  VerifyCheck c{"contamination derivative matches the influence function", false, ""};
  // 999*444 midpoint grid on (0,1): thresholds stay exact integers at
  // eps = 1e-3, so the finite difference sees no quantile quantization.
  const std::size_t m = 443556;
  std::vector<double> grid(m), mass(m, 1.0);
  for (std::size_t k = 0; k < m; ++k) {
    grid[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(m);
  }
  fpskew::WeightedCdf base = fpskew::WeightedCdf::from_sorted(grid, mass);
  const double eps = 1e-3;
  const double d_b3 =
      fpskew::contamination_derivative(base, fpskew::Target::b3, 0.25, 0.4, eps);
  const double d_b2 =
      fpskew::contamination_derivative(base, fpskew::Target::b2, 0.25, 0.4, eps);
  const double err3 = std::abs(d_b3 - 1.6) / 1.6;
  const double err2 = std::abs(d_b2 - 2.0) / 2.0;
  c.pass = err3 <= 0.03 && err2 <= 0.03;
  std::ostringstream os;
  os << "b3 probe error " << err3 << ", b2 probe error " << err2;
  c.detail = os.str();
  return c;
}

VerifyCheck check_calibration() {
  VerifyCheck c{"raking solver meets residual and positivity bounds", false, ""};
  fpskew::Rng rng(1234);
  double worst = 0.0;
  bool all_positive = true;
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 3 + rng.next_below(198);
    fpskew::DrawnSample s;
    s.units.resize(n);
    s.pi1.resize(n);
    std::vector<double> x(n);
    fpskew::NeumaierSum invpi;
    for (std::size_t i = 0; i < n; ++i) {
      s.units[i] = static_cast<std::int64_t>(i);
      s.pi1[i] = 0.1 + 0.8 * rng.next_unit();
      x[i] = std::exp(rng.next_normal());
      invpi.add(1.0 / s.pi1[i]);
    }
    const double N = invpi.value();
    const double xmin = *std::min_element(x.begin(), x.end());
    const double xmax = *std::max_element(x.begin(), x.end());
    const double theta = 0.15 + 0.7 * rng.next_unit();
    const double t_x = N * (theta * xmin + (1.0 - theta) * xmax);
    fpskew::CalibrationWeights cw = fpskew::solve_raking(s, x, N, t_x);
    fpskew::NeumaierSum sw, swx;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(cw.w[i] > 0.0)) all_positive = false;
      sw.add(cw.w[i]);
      swx.add(cw.w[i] * x[i]);
    }
    const double scale = std::max(N, std::abs(t_x));
    worst = std::max(worst, std::abs(sw.value() - N) / scale);
    worst = std::max(worst, std::abs(swx.value() - t_x) / scale);
  }
  c.pass = worst <= 1e-8 && all_positive;
  std::ostringstream os;
  os << "worst scaled residual " << worst;
  c.detail = os.str();
  return c;
}

VerifyCheck check_properties() {
  VerifyCheck c{"antisymmetry and invariance properties", false, ""};
  fpskew::Rng rng(99);
  bool ok = true;
  for (int rep = 0; rep < 50 && ok; ++rep) {
    const std::size_t n = 10 + rng.next_below(30);
    std::vector<double> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = std::floor(rng.next_normal() * 8.0) / 8.0;
      w[i] = 0.25 + rng.next_unit();
    }
    fpskew::WeightedCdf cdf(v, w);
    try {
      ok = ok && fpskew::b2(cdf, 0.25) == -fpskew::b2(cdf, 0.75);
      std::vector<double> moved(cdf.support());
      std::vector<double> masses(moved.size());
      for (std::size_t i = 0; i < moved.size(); ++i) masses[i] = cdf.mass(i);
      for (double& t : moved) t = 3.0 + 2.0 * t;
      fpskew::WeightedCdf shifted(moved, masses);
      ok = ok && std::abs(fpskew::b3(shifted) - fpskew::b3(cdf)) < 1e-10;
      ok = ok && std::abs(fpskew::b3(cdf)) <= 1.0 + 1e-12;
    } catch (const fpskew::degenerate_error&) {
      // zero spread draw; the property is vacuous here
    }
  }
  c.pass = ok;
  c.detail = ok ? "50 randomized cases" : "property violated";
  return c;
}

int run_verify() {
  std::vector<VerifyCheck> checks;
  checks.push_back(check_census_consistency());
  checks.push_back(check_syg_unbiasedness());
  checks.push_back(check_calibration());
  checks.push_back(check_properties());
  checks.push_back(check_contamination());
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.pass;
    std::cout << (c.pass ? "pass" : "FAIL") << "  " << c.name;
    if (!c.detail.empty()) std::cout << "  [" << c.detail << "]";
    std::cout << "\n";
  }
  std::cout << (all ? "verify: all checks passed\n" : "verify: FAILURES above\n");
  return all ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"design-based skewness estimation for finite populations"};
  app.require_subcommand(1);
  bool error_json = false;
  app.add_flag("--error-json", error_json, "print failures as a JSON object on stdout");

  // gen-pop
  auto* gen = app.add_subcommand("gen-pop", "generate a lognormal population csv");
  std::int64_t gen_n = 800;
  double gen_gamma = 1.0;
  std::uint64_t gen_seed = 1;
  int gen_strata = 0;
  std::string gen_out = "-";
  gen->add_option("--n", gen_n, "population size")->check(CLI::PositiveNumber);
  gen->add_option("--gamma", gen_gamma, "error scale exponent in y = x + x^gamma e");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--strata", gen_strata, "label this many equal-x-total strata (0 = none)");
  gen->add_option("--out", gen_out, "output path ('-' = stdout)");

  // draw
  auto* drw = app.add_subcommand("draw", "draw one sample and print the sampled rows");
  std::string drw_pop, drw_design = "srswor";
  std::int64_t drw_n = 0;
  std::uint64_t drw_seed = 1;
  int drw_strata = 3;
  drw->add_option("--population", drw_pop, "population csv")->required();
  drw->add_option("--design", drw_design, "srswor|stratified");
  drw->add_option("--sample-size", drw_n, "sample size")->required()->check(CLI::PositiveNumber);
  drw->add_option("--seed", drw_seed, "draw seed");
  drw->add_option("--strata", drw_strata, "strata to label when the csv has none");

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate one target on one drawn sample");
  std::string est_pop, est_design = "srswor", est_basis = "hajek", est_target = "b3";
  std::string est_method = "syg", est_levels = "0.90,0.95,0.99";
  std::int64_t est_n = 0;
  std::uint64_t est_seed = 1;
  int est_strata = 3;
  double est_r = 0.25;
  bool est_invpi = false;
  est->add_option("--population", est_pop, "population csv")->required();
  est->add_option("--design", est_design, "srswor|stratified");
  est->add_option("--sample-size", est_n, "sample size")->required()->check(CLI::PositiveNumber);
  est->add_option("--seed", est_seed, "draw seed");
  est->add_option("--strata", est_strata, "strata to label when the csv has none");
  est->add_option("--basis", est_basis, "hajek|ht|calibration");
  est->add_option("--target", est_target, "mean|b2|b3");
  est->add_option("--r", est_r, "tail probability for b2");
  est->add_option("--method", est_method, "variance form for intervals: syg|ht");
  est->add_flag("--use-inverse-pi", est_invpi, "weight the calibration regression by 1/pi");
  est->add_option("--levels", est_levels, "comma-separated confidence levels");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a configured simulation study");
  std::string sim_config, sim_prefix;
  int sim_threads = 0;
  sim->add_option("--config", sim_config, "simulation config file")->required();
  sim->add_option("--out-prefix", sim_prefix, "output path prefix (default: config stem)");
  sim->add_option("--threads", sim_threads,
                  "worker threads (execution override; the report echoes the config)");

  // verify
  app.add_subcommand("verify", "run the oracle suite and print a pass/fail table");

  // export-figure-data
  auto* fig = app.add_subcommand("export-figure-data", "write an x,y scatter csv");
  std::string fig_pop, fig_out = "-";
  fig->add_option("--population", fig_pop, "population csv")->required();
  fig->add_option("--out", fig_out, "output path ('-' = stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      fpskew::FinitePopulation pop = fpskew::generate_population(gen_seed, gen_n, gen_gamma);
      if (gen_strata > 0) pop = fpskew::stratify_by_x(pop, gen_strata);
      write_text(gen_out, fpskew::write_population_csv(pop));
      if (gen_out != "-") {
        std::cout << "wrote " << pop.size() << " rows to " << gen_out << "\n";
      }
      return kExitOk;
    }

    if (drw->parsed()) {
      fpskew::FinitePopulation pop = fpskew::read_population_csv_file(drw_pop);
      fpskew::FinitePopulation working;
      fpskew::SamplingDesign d = make_design(pop, drw_design, drw_n, drw_strata, working);
      fpskew::DrawnSample s = fpskew::draw(d, drw_seed);
      std::string out = "id,x,y,stratum,pi\n";
      for (std::size_t k = 0; k < s.units.size(); ++k) {
        const auto i = static_cast<std::size_t>(s.units[k]);
        out += std::to_string(working.ids[i]);
        out += ',';
        out += fpskew::detail::format_g17(working.x[i]);
        out += ',';
        out += fpskew::detail::format_g17(working.y[i]);
        out += ',';
        out += std::to_string(working.strata[i]);
        out += ',';
        out += fpskew::detail::format_g17(s.pi1[k]);
        out += '\n';
      }
      std::cout << out;
      return kExitOk;
    }

    if (est->parsed()) {
      fpskew::FinitePopulation pop = fpskew::read_population_csv_file(est_pop);
      fpskew::FinitePopulation working;
      fpskew::SamplingDesign d = make_design(pop, est_design, est_n, est_strata, working);
      fpskew::DrawnSample s = fpskew::draw(d, est_seed);
      fpskew::EstimatorKind kind{parse_basis(est_basis), parse_target(est_target), est_r};
      fpskew::EstimateOptions opt;
      if (est_method == "ht") {
        opt.method = fpskew::VarianceMethod::ht;
      } else if (est_method == "syg") {
        opt.method = fpskew::VarianceMethod::syg;
      } else {
        throw std::invalid_argument("unknown method '" + est_method + "' (syg|ht)");
      }
      opt.use_inverse_pi = est_invpi;
      opt.levels = parse_levels(est_levels);
      fpskew::EstimateRecord rec = fpskew::estimate_with_variance(
          s, fpskew::gather(working.y, s), fpskew::gather(working.x, s),
          static_cast<double>(working.size()), fpskew::population_x_total(working), kind, opt);
      std::cout << fpskew::to_json(rec).dump(2) << "\n";
      return kExitOk;
    }

    if (sim->parsed()) {
      fpskew::SimulationConfig cfg = fpskew::parse_simulation_config_file(sim_config);
      fpskew::SimulationConfig run_cfg = cfg;
      if (sim_threads > 0) run_cfg.threads = sim_threads;
      fpskew::SimulationReport report = fpskew::run_simulation(run_cfg);
      report.config.threads = cfg.threads;  // echo the file, not the override
      const std::string prefix = sim_prefix.empty() ? stem_of(sim_config) : sim_prefix;
      write_text(prefix + "_coverage.csv", fpskew::coverage_csv(report));
      write_text(prefix + "_metrics.csv", fpskew::metrics_csv(report));
      write_text(prefix + "_report.json", fpskew::to_json(report).dump(2) + "\n");
      std::cout << "wrote " << prefix << "_coverage.csv, " << prefix << "_metrics.csv, "
                << prefix << "_report.json\n";
      return kExitOk;
    }

    if (app.get_subcommand("verify")->parsed()) {
      return run_verify();
    }

    if (fig->parsed()) {
      fpskew::FinitePopulation pop = fpskew::read_population_csv_file(fig_pop);
      std::string out = "x,y,stratum\n";
      for (std::size_t i = 0; i < pop.size(); ++i) {
        out += fpskew::detail::format_g17(pop.x[i]);
        out += ',';
        out += fpskew::detail::format_g17(pop.y[i]);
        out += ',';
        out += std::to_string(pop.strata[i]);
        out += '\n';
      }
      write_text(fig_out, out);
      return kExitOk;
    }

    std::cerr << "fpskew: no subcommand\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    return report_error(classify(e), error_json);
  }
}
