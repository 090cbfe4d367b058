// Copyright 2026 The mdplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MDPLAN_PIPELINE_EVALUATE_HPP_
#define MDPLAN_PIPELINE_EVALUATE_HPP_

#include <string>
#include <vector>

#include "model/planner_model.hpp"
#include "pipeline/config.hpp"
#include "pipeline/dataset.hpp"

namespace mdplan::pipeline {

struct SceneResult {
  std::uint64_t seed = 0;
  sim::RewardBreakdown first;  // first sample (the single-sample protocol)
  double best_pdms = 0.0;      // max over all samples
  double latency_ms = 0.0;     // sample + refine of the first sample
};

struct EvalReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  int steps = 0;
  bool refine = false;
  int samples_per_scene = 1;
  std::vector<SceneResult> scenes;
  // Means over scenes of the first sample.
  double nc = 0.0, dac = 0.0, ttc = 0.0, comfort = 0.0, ep = 0.0, pdms = 0.0;
  double malformed_rate = 0.0;
  double best_of_k_pdms = 0.0;
  double median_latency_ms = 0.0;
};

/// Samples each scene with the configured steps, optionally refines, and
/// scores. Scene q draws from its own stream, so results do not depend on
/// scene order.
EvalReport evaluate(const model::PlannerModel& model, const std::vector<Example>& examples, const RunConfig& cfg);

/// Everything except wall-clock figures; byte-stable for fixed inputs.
std::string report_json(const EvalReport& report);
std::string report_csv(const EvalReport& report);
std::string timing_json(const EvalReport& report);

/// Writes <stem>.json, <stem>.csv and <stem>.timing.json.
void write_report(const EvalReport& report, const std::string& stem);

}  // namespace mdplan::pipeline

#endif  // MDPLAN_PIPELINE_EVALUATE_HPP_
