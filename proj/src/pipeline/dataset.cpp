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

#include "pipeline/dataset.hpp"

#include "rl/rl.hpp"

namespace mdplan::pipeline {

namespace {
constexpr std::uint64_t kHoldoutBit = 1ULL << 63;
}

std::string_view split_name(Split s) { return s == Split::kTrain ? "train" : "holdout"; }

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "holdout") return Split::kHoldout;
  throw ConfigError("unknown split '" + std::string(name) + "' (expected train or holdout)");
}

std::uint64_t scene_seed(std::uint64_t base_seed, std::uint64_t index, Split split) {
  if (index > 0xFFFFFFFFULL) throw ConfigError("scene index exceeds 32 bits");
  const std::uint64_t s = ((base_seed & 0x7FFFFFFFULL) << 32) | index;
  return split == Split::kHoldout ? (s | kHoldoutBit) : s;
}

bool is_holdout_seed(std::uint64_t seed) { return (seed & kHoldoutBit) != 0; }

std::vector<sim::Scene> generate_scenes(int count, sim::Difficulty difficulty, std::uint64_t base_seed, Split split,
                                        const sim::SimConfig& cfg) {
  if (count < 0) throw ConfigError("scene count must be non-negative");
  std::vector<sim::Scene> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(sim::generate_scene(scene_seed(base_seed, static_cast<std::uint64_t>(i), split), difficulty, cfg));
  }
  return out;
}

std::vector<Example> build_examples(const std::vector<sim::Scene>& scenes, const RunConfig& cfg,
                                    std::vector<std::string>* warnings) {
  std::vector<Example> out;
  out.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const sim::Scene& sc = scenes[i];
    try {
      const codec::Trajectory plan = sim::expert_plan(sc, cfg.sim);
      Example ex;
      ex.scene = sc;
      ex.context = model::make_context(sim::rasterize(sc, cfg.sim), cfg.model);
      ex.target = codec::encode_trajectory(codec::clamp_to_range(plan, cfg.codec), cfg.codec);
      ex.expert_reward = rl::token_reward(sc, ex.target, cfg.codec, cfg.sim);
      out.push_back(std::move(ex));
    } catch (const sim::InfeasibleError& e) {
      if (warnings) warnings->push_back("scene " + std::to_string(i) + " skipped: " + e.what());
    }
  }
  return out;
}

}  // namespace mdplan::pipeline
