// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_CONFIG_HPP
#define FPSKEW_CONFIG_HPP

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fpskew/design.hpp"
#include "fpskew/errors.hpp"
#include "fpskew/variance.hpp"

namespace fpskew {

/// Everything a simulation run is parameterized by.  Defaults mirror the
/// headline study: lognormal population of 800, proportional errors,
/// SRSWOR of 40, three strata when stratified, 1000 replications per set.
struct SimulationConfig {
  // [population]
  std::string population_file;  // when nonempty, read instead of generating
  std::int64_t N = 800;
  double gamma = 1.0;
  std::uint64_t pop_seed = 1;

  // [design]
  DesignKind design = DesignKind::srswor;
  std::int64_t n = 40;
  int strata = 3;  // used only by the stratified design

  // [estimate]
  double r = 0.75;
  VarianceMethod method = VarianceMethod::syg;
  bool use_inverse_pi = false;
  std::vector<double> levels = {0.90, 0.95, 0.99};

  // [simulation]
  int replications = 1000;
  std::uint64_t master_seed = 20260818;
  int threads = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& v, std::size_t lineno) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    throw parse_error("config line " + std::to_string(lineno) + ": bad number '" + v + "'");
  }
  return d;
}

inline std::int64_t parse_int(const std::string& v, std::size_t lineno) {
  char* end = nullptr;
  const long long d = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw parse_error("config line " + std::to_string(lineno) + ": bad integer '" + v + "'");
  }
  return d;
}

inline std::uint64_t parse_uint(const std::string& v, std::size_t lineno) {
  char* end = nullptr;
  const unsigned long long d = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw parse_error("config line " + std::to_string(lineno) + ": bad integer '" + v + "'");
  }
  return d;
}

inline bool parse_bool(const std::string& v, std::size_t lineno) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw parse_error("config line " + std::to_string(lineno) + ": bad boolean '" + v + "'");
}

}  // namespace detail

/// INI-style parser: [section] headers, key = value pairs, # or ; comments.
/// Unknown sections or keys are errors -- configs should not silently rot.
inline SimulationConfig parse_simulation_config(std::istream& in) {
  SimulationConfig cfg;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw parse_error("config line " + std::to_string(lineno) + ": unterminated section");
      section = detail::trim(t.substr(1, t.size() - 2));
      if (section != "population" && section != "design" && section != "estimate" &&
          section != "simulation") {
        throw parse_error("config line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw parse_error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (section == "population") {
      if (key == "file") {
        cfg.population_file = value;
      } else if (key == "N") {
        cfg.N = detail::parse_int(value, lineno);
      } else if (key == "gamma") {
        cfg.gamma = detail::parse_double(value, lineno);
      } else if (key == "seed") {
        cfg.pop_seed = detail::parse_uint(value, lineno);
      } else {
        throw parse_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
    } else if (section == "design") {
      if (key == "kind") {
        if (value == "srswor") {
          cfg.design = DesignKind::srswor;
        } else if (value == "stratified") {
          cfg.design = DesignKind::stratified_srswor;
        } else {
          throw parse_error("config line " + std::to_string(lineno) + ": unknown design '" + value + "'");
        }
      } else if (key == "n") {
        cfg.n = detail::parse_int(value, lineno);
      } else if (key == "strata") {
        cfg.strata = static_cast<int>(detail::parse_int(value, lineno));
      } else {
        throw parse_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
    } else if (section == "estimate") {
      if (key == "r") {
        cfg.r = detail::parse_double(value, lineno);
      } else if (key == "method") {
        if (value == "syg") {
          cfg.method = VarianceMethod::syg;
        } else if (value == "ht") {
          cfg.method = VarianceMethod::ht;
        } else {
          throw parse_error("config line " + std::to_string(lineno) + ": unknown method '" + value + "'");
        }
      } else if (key == "use_inverse_pi") {
        cfg.use_inverse_pi = detail::parse_bool(value, lineno);
      } else if (key == "levels") {
        cfg.levels.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
          cfg.levels.push_back(detail::parse_double(detail::trim(item), lineno));
        }
        if (cfg.levels.empty()) {
          throw parse_error("config line " + std::to_string(lineno) + ": empty levels");
        }
      } else {
        throw parse_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
    } else if (section == "simulation") {
      if (key == "replications") {
        cfg.replications = static_cast<int>(detail::parse_int(value, lineno));
      } else if (key == "master_seed") {
        cfg.master_seed = detail::parse_uint(value, lineno);
      } else if (key == "threads") {
        cfg.threads = static_cast<int>(detail::parse_int(value, lineno));
      } else {
        throw parse_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
    } else {
      throw parse_error("config line " + std::to_string(lineno) + ": key outside any section");
    }
  }
  return cfg;
}

inline SimulationConfig parse_simulation_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw parse_error("cannot open config: " + path);
  return parse_simulation_config(f);
}

}  // namespace fpskew

#endif  // FPSKEW_CONFIG_HPP
