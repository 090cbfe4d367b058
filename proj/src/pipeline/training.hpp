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

#ifndef MDPLAN_PIPELINE_TRAINING_HPP_
#define MDPLAN_PIPELINE_TRAINING_HPP_

#include <functional>
#include <string>
#include <vector>

#include "model/planner_model.hpp"
#include "pipeline/checkpoint.hpp"
#include "pipeline/config.hpp"
#include "pipeline/dataset.hpp"
#include "rl/rl.hpp"

namespace mdplan::pipeline {

/// Seed for a named random stream; keeps independent consumers apart.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

struct SftEpoch {
  int epoch = 0;  // 1-based
  double gen_loss = 0.0;
  double refine_loss = 0.0;
  double lr = 0.0;
};

struct SftOptions {
  std::string checkpoint_path;  // empty: no checkpoints
  std::string log_csv;          // empty: no log
  int stop_after_epoch = 0;     // > 0: return early after this epoch (for tests)
  std::function<void(const SftEpoch&)> on_epoch;
};

/// Runs (or resumes, from `progress`) the supervised stage. Each batch takes
/// one step on the generation path (masked objective) and, when the model has
/// expert blocks, one step on the refinement expert (corrupted-input
/// objective).
std::vector<SftEpoch> run_sft(const RunConfig& cfg, model::PlannerModel& model, Progress& progress,
                              const std::vector<Example>& examples, const SftOptions& options);

/// Learning rate after `step` optimizer steps of `total`.
double sft_learning_rate(const SftConfig& cfg, std::int64_t step, std::int64_t total);

struct RftRow {
  std::int64_t step = 0;
  int epoch = 0;
  rl::StepMetrics metrics;
};

struct RftOptions {
  std::string checkpoint_path;
  std::string best_checkpoint_path;
  std::string metrics_csv;
  std::function<void(const RftRow&)> on_step;
};

/// Reinforcement stage from an SFT model; the reference policy is a frozen
/// copy taken at the start.
std::vector<RftRow> run_rft(const RunConfig& cfg, model::PlannerModel& model, Progress& progress,
                            const std::vector<Example>& examples, const RftOptions& options);

}  // namespace mdplan::pipeline

#endif  // MDPLAN_PIPELINE_TRAINING_HPP_
