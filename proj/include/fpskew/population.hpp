// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_POPULATION_HPP
#define FPSKEW_POPULATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fpskew/errors.hpp"
#include "fpskew/numeric.hpp"
#include "fpskew/rng.hpp"
#include "fpskew/wcdf.hpp"

namespace fpskew {

/// A fixed finite population of N units.  x is the auxiliary variable
/// (known for every unit), y the study variable, strata optional 1-based
/// labels (0 everywhere when the population is unstratified).
struct FinitePopulation {
  std::vector<std::int64_t> ids;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<int> strata;

  std::size_t size() const { return y.size(); }

  int stratum_count() const {
    int h = 0;
    for (int s : strata) h = std::max(h, s);
    return h;
  }

  void validate() const {
    const std::size_t n = y.size();
    if (n == 0) throw std::invalid_argument("FinitePopulation: empty");
    if (ids.size() != n || x.size() != n || strata.size() != n) {
      throw std::invalid_argument("FinitePopulation: column length mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
        throw std::invalid_argument("FinitePopulation: non-finite x or y");
      }
      if (strata[i] < 0) throw std::invalid_argument("FinitePopulation: negative stratum label");
    }
  }
};

/// Census parameters of the study variable.
struct PopulationParams {
  std::int64_t N = 0;
  double mu = 0.0;     // population mean of y
  double nu = 0.0;     // population median of y
  double delta = 0.0;  // mean absolute deviation about the median
  double r = 0.25;     // tail probability carried with b2
  double b2 = 0.0;     // quantile-ratio skewness at r
  double b3 = 0.0;     // mean-median skewness
};

/// Equal-mass cdf of the population y values.
inline WeightedCdf population_cdf(const FinitePopulation& pop) {
  return WeightedCdf(pop.y, std::vector<double>(pop.y.size(), 1.0));
}

inline PopulationParams true_parameters(const FinitePopulation& pop, double r) {
  const WeightedCdf cdf = population_cdf(pop);
  PopulationParams p;
  p.N = static_cast<std::int64_t>(pop.size());
  const B3Parts parts = b3_parts(cdf);
  p.mu = parts.mean;
  p.nu = parts.median;
  p.delta = parts.mad;
  p.r = r;
  p.b2 = b2(cdf, r);
  p.b3 = parts.mad == 0.0 ? throw degenerate_error("true_parameters: constant y")
                          : (parts.mean - parts.median) / parts.mad;
  return p;
}

/// Auxiliary total sum_U x_i (the calibration benchmark).
inline double population_x_total(const FinitePopulation& pop) {
  return compensated_sum(pop.x);
}

/// Lognormal-auxiliary superpopulation draw:
///   z_i ~ N(0,1), x_i = exp(z_i), y_i = x_i + x_i^gamma * e_i, e_i ~ N(0,1).
/// gamma = 0 gives homoscedastic errors, gamma = 1 errors proportional to x.
/// Two normal draws are consumed per unit, in (z, e) order.
inline FinitePopulation generate_population(std::uint64_t seed, std::int64_t N, double gamma) {
  if (N < 1) throw std::invalid_argument("generate_population: N must be >= 1");
  if (!(std::isfinite(gamma) && gamma >= 0.0)) {
    throw std::invalid_argument("generate_population: gamma must be finite and >= 0");
  }
  Rng rng(seed);
  FinitePopulation pop;
  pop.ids.resize(static_cast<std::size_t>(N));
  pop.x.resize(static_cast<std::size_t>(N));
  pop.y.resize(static_cast<std::size_t>(N));
  pop.strata.assign(static_cast<std::size_t>(N), 0);
  for (std::int64_t i = 0; i < N; ++i) {
    const double z = rng.next_normal();
    const double e = rng.next_normal();
    const double xi = std::exp(z);
    pop.ids[static_cast<std::size_t>(i)] = i + 1;
    pop.x[static_cast<std::size_t>(i)] = xi;
    pop.y[static_cast<std::size_t>(i)] = xi + std::pow(xi, gamma) * e;
  }
  return pop;
}

/// Partition units into H strata by ascending x, cutting greedily so each
/// stratum's x-total tracks the equal share total/H: a unit joins the current
/// stratum only while doing so strictly reduces the distance to the share.
/// Every stratum is guaranteed nonempty.  Labels are 1..H in x order.
inline FinitePopulation stratify_by_x(const FinitePopulation& pop, int H) {
  pop.validate();
  const std::size_t N = pop.size();
  if (H < 1 || static_cast<std::size_t>(H) > N) {
    throw std::invalid_argument("stratify_by_x: need 1 <= H <= N");
  }
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pop.x[a] < pop.x[b]; });

  const double share = population_x_total(pop) / H;
  FinitePopulation out = pop;
  std::size_t pos = 0;
  for (int h = 1; h <= H; ++h) {
    const std::size_t strata_left = static_cast<std::size_t>(H - h);
    NeumaierSum sum;
    std::size_t taken = 0;
    while (pos < N - strata_left) {
      const double current = sum.value();
      const double with_next = current + pop.x[order[pos]];
      if (taken > 0 && !(std::abs(with_next - share) < std::abs(current - share))) {
        break;  // adding the next unit would not improve this stratum
      }
      sum.add(pop.x[order[pos]]);
      out.strata[order[pos]] = h;
      ++pos;
      ++taken;
    }
    if (h == H) {
      for (; pos < N; ++pos) out.strata[order[pos]] = H;
    }
  }
  return out;
}

namespace detail {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace detail

/// Serialize as CSV with header id,x,y,stratum; doubles at 17 significant
/// digits so a round trip is bit exact.
inline std::string write_population_csv(const FinitePopulation& pop) {
  pop.validate();
  std::string out = "id,x,y,stratum\n";
  for (std::size_t i = 0; i < pop.size(); ++i) {
    out += std::to_string(pop.ids[i]);
    out += ',';
    out += detail::format_g17(pop.x[i]);
    out += ',';
    out += detail::format_g17(pop.y[i]);
    out += ',';
    out += std::to_string(pop.strata[i]);
    out += '\n';
  }
  return out;
}

inline void write_population_csv_file(const FinitePopulation& pop, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw parse_error("cannot open for writing: " + path);
  f << write_population_csv(pop);
  if (!f) throw parse_error("write failed: " + path);
}

inline FinitePopulation read_population_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw parse_error("population csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id,x,y,stratum") {
    throw parse_error("population csv: expected header 'id,x,y,stratum', got '" + line + "'");
  }
  FinitePopulation pop;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string, 4> field;
    std::size_t start = 0, col = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (col >= 4) throw parse_error("population csv line " + std::to_string(lineno) + ": too many fields");
        field[col++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    if (col != 4) throw parse_error("population csv line " + std::to_string(lineno) + ": expected 4 fields");
    char* end = nullptr;
    errno = 0;
    const long long id = std::strtoll(field[0].c_str(), &end, 10);
    if (end == field[0].c_str() || *end != '\0') {
      throw parse_error("population csv line " + std::to_string(lineno) + ": bad id '" + field[0] + "'");
    }
    const double xv = std::strtod(field[1].c_str(), &end);
    if (end == field[1].c_str() || *end != '\0') {
      throw parse_error("population csv line " + std::to_string(lineno) + ": bad x '" + field[1] + "'");
    }
    const double yv = std::strtod(field[2].c_str(), &end);
    if (end == field[2].c_str() || *end != '\0') {
      throw parse_error("population csv line " + std::to_string(lineno) + ": bad y '" + field[2] + "'");
    }
    const long stratum = std::strtol(field[3].c_str(), &end, 10);
    if (end == field[3].c_str() || *end != '\0' || stratum < 0) {
      throw parse_error("population csv line " + std::to_string(lineno) + ": bad stratum '" + field[3] + "'");
    }
    pop.ids.push_back(id);
    pop.x.push_back(xv);
    pop.y.push_back(yv);
    pop.strata.push_back(static_cast<int>(stratum));
  }
  pop.validate();
  return pop;
}

inline FinitePopulation read_population_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw parse_error("cannot open: " + path);
  return read_population_csv(f);
}

}  // namespace fpskew

#endif  // FPSKEW_POPULATION_HPP
