// Copyright 2026 The fpskew Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef FPSKEW_SERIALIZE_HPP
#define FPSKEW_SERIALIZE_HPP

#include <string>

#include <json.hpp>

#include "fpskew/inference.hpp"
#include "fpskew/montecarlo.hpp"

namespace fpskew {

inline const char* kJsonSchema = "fps-skew/1";

inline const char* basis_name(CdfBasis b) {
  switch (b) {
    case CdfBasis::hajek:
      return "hajek";
    case CdfBasis::ht:
      return "ht";
    case CdfBasis::calibration:
      return "calibration";
  }
  return "?";
}

inline const char* target_name(Target t) {
  switch (t) {
    case Target::mean:
      return "mean";
    case Target::b2:
      return "b2";
    case Target::b3:
      return "b3";
  }
  return "?";
}

inline nlohmann::json to_json(const EstimateRecord& rec) {
  nlohmann::json j;
  j["schema"] = kJsonSchema;
  j["kind"] = {{"basis", basis_name(rec.kind.basis)},
               {"target", target_name(rec.kind.target)},
               {"r", rec.kind.r},
               {"name", rec.kind.name()}};
  j["estimate"] = rec.estimate;
  j["v2_ht"] = rec.v2.v2_ht;
  j["v2_syg"] = rec.v2.v2_syg;
  j["sigma_scale"] = rec.sigma_scale;
  j["census"] = rec.census;
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& [level, iv] : rec.intervals) {
    intervals.push_back({{"level", level}, {"lo", iv.lo}, {"hi", iv.hi}});
  }
  j["intervals"] = intervals;
  nlohmann::json params;
  params["r"] = rec.params.r;
  params["nu"] = rec.params.nu;
  params["F_nu"] = rec.params.F_nu;
  params["delta"] = rec.params.delta;
  params["b_value"] = rec.params.b_value;
  if (rec.kind.target == Target::b2) {
    params["nu_r"] = rec.params.nu_r;
    params["nu_1mr"] = rec.params.nu_1mr;
    params["f_nu_r"] = rec.params.f_nu_r;
    params["f_nu_1mr"] = rec.params.f_nu_1mr;
  }
  if (rec.kind.target != Target::mean) params["f_nu"] = rec.params.f_nu;
  j["params"] = params;
  if (rec.calibration.has_value()) {
    j["calibration"] = {{"beta0", rec.calibration->beta0},
                        {"beta1", rec.calibration->beta1},
                        {"iterations", rec.calibration->iterations},
                        {"residual", rec.calibration->residual}};
  }
  if (rec.ht_raw_total.has_value()) j["ht_raw_total"] = *rec.ht_raw_total;
  return j;
}

inline nlohmann::json to_json(const SimulationReport& report) {
  const SimulationConfig& cfg = report.config;
  nlohmann::json j;
  j["schema"] = kJsonSchema;
  j["config"] = {
      {"population",
       {{"file", cfg.population_file},
        {"N", cfg.N},
        {"gamma", cfg.gamma},
        {"seed", cfg.pop_seed}}},
      {"design",
       {{"kind", cfg.design == DesignKind::srswor ? "srswor" : "stratified"},
        {"n", cfg.n},
        {"strata", cfg.strata}}},
      {"estimate",
       {{"r", cfg.r},
        {"method", cfg.method == VarianceMethod::syg ? "syg" : "ht"},
        {"use_inverse_pi", cfg.use_inverse_pi},
        {"levels", cfg.levels}}},
      {"simulation",
       {{"replications", cfg.replications},
        {"master_seed", cfg.master_seed},
        {"threads", cfg.threads}}}};
  // The b2 truth is reported for the configured r and for its mirror: the
  // functional is antisymmetric under r <-> 1-r, so the pair differs only in
  // sign and documents which convention a table is using.
  j["truth"] = {{"N", report.truth.N},       {"mu", report.truth.mu},
                {"nu", report.truth.nu},     {"delta", report.truth.delta},
                {"r", report.truth.r},       {"b2", report.truth.b2},
                {"b2_mirror_r", 1.0 - report.truth.r}, {"b2_mirror", -report.truth.b2},
                {"b3", report.truth.b3}};
  j["krw_benchmark"] = report.krw_benchmark;
  j["footnotes"] = {
      "mse from the point-estimate replication set; bias, coverage and variance metrics from the independent coverage set; bias2_over_mse mixes the two as stated in the source displays",
      "rel_stab_literal = sqrt(mean((v2 - mse)^2))/mse - 1 follows the printed formula; rel_stab_krw omits the trailing -1 and is the quantity comparable to the sqrt(2/(n-1)) benchmark"};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& m : report.estimators) {
    nlohmann::json row = {{"name", m.name},
                          {"truth", m.truth},
                          {"set1_used", m.set1_used},
                          {"set1_excluded", m.set1_failed},
                          {"set2_used", m.set2_used},
                          {"set2_excluded", m.set2_failed},
                          {"mse", m.mse},
                          {"rmse", m.rmse},
                          {"bias", m.bias},
                          {"bias2_over_mse", m.bias2_over_mse},
                          {"avg_v", m.avg_v},
                          {"rel_bias", m.rel_bias},
                          {"rel_stab_literal", m.rel_stab_literal},
                          {"rel_stab_krw", m.rel_stab_krw}};
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& lm : m.levels) {
      levels.push_back({{"level", lm.level},
                        {"coverage", lm.coverage},
                        {"lte", lm.lte},
                        {"rte", lm.rte}});
    }
    row["levels"] = levels;
    rows.push_back(row);
  }
  j["estimators"] = rows;
  return j;
}

}  // namespace fpskew

#endif  // FPSKEW_SERIALIZE_HPP
