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

#ifndef MDPLAN_PIPELINE_DATASET_HPP_
#define MDPLAN_PIPELINE_DATASET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "diffusion/masked_diffusion.hpp"
#include "model/planner_model.hpp"
#include "pipeline/config.hpp"
#include "sim/scene.hpp"

namespace mdplan::pipeline {

enum class Split { kTrain, kHoldout };

std::string_view split_name(Split s);
Split parse_split(std::string_view name);

/// Seed of scene `index` in a split. Holdout seeds carry the top bit, train
/// seeds never do, so the two ranges are disjoint for any base seed.
std::uint64_t scene_seed(std::uint64_t base_seed, std::uint64_t index, Split split);
bool is_holdout_seed(std::uint64_t seed);

std::vector<sim::Scene> generate_scenes(int count, sim::Difficulty difficulty, std::uint64_t base_seed, Split split,
                                        const sim::SimConfig& cfg);

struct Example {
  sim::Scene scene;
  model::Context context;
  diffusion::Tokens target;  // encoded expert plan
  double expert_reward = 0.0;
};

/// Scene -> (context, expert tokens). Scenes whose expert plan is infeasible
/// are skipped and reported through `warnings`.
std::vector<Example> build_examples(const std::vector<sim::Scene>& scenes, const RunConfig& cfg,
                                    std::vector<std::string>* warnings = nullptr);

}  // namespace mdplan::pipeline

#endif  // MDPLAN_PIPELINE_DATASET_HPP_
