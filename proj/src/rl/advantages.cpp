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

#include <numeric>
#include <string>

#include "rl/rl.hpp"

namespace mdplan::rl {

void RftConfig::validate() const {
  if (group_size < 2) throw RlError("group_size must be at least 2");
  if (online_samples < 1) throw RlError("online_samples must be at least 1");
  if (tau < 1 || tau > steps) throw RlError("tau must lie in [1, steps]");
  if (!(clip_eps > 0.0)) throw RlError("clip_eps must be positive");
  if (!(kl_beta >= 0.0)) throw RlError("kl_beta must be non-negative");
  if (!(temperature > 0.0)) throw RlError("rollout temperature must be positive");
  if (!(refine_temperature > 0.0)) throw RlError("refine_temperature must be positive");
}

std::vector<double> grpo_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) throw RlError("grpo_advantages: group needs at least 2 rewards");
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(rewards.size());
  std::vector<double> adv(rewards.size());
  for (std::size_t i = 0; i < adv.size(); ++i) adv[i] = rewards[i] - mean;
  return adv;
}

OfflineAdvantage offline_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) throw RlError("offline_advantages: group needs at least 2 rewards");
  OfflineAdvantage a;
  a.g = static_cast<int>(rewards.size());
  a.values.resize(rewards.size() * rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    for (std::size_t j = 0; j < rewards.size(); ++j) a.values[i * rewards.size() + j] = rewards[i] - rewards[j];
  }
  return a;
}

double token_reward(const sim::Scene& scene, std::span<const codec::TokenId> tokens,
                    const codec::CodecConfig& codec_cfg, const sim::SimConfig& sim_cfg, bool* malformed) {
  codec::Trajectory traj;
  const bool ok = codec::try_decode_trajectory(tokens, codec_cfg, &traj);
  if (malformed) *malformed = !ok;
  if (!ok) return 0.0;
  const sim::RewardBreakdown r = sim::score(scene, traj, sim_cfg);
  if (malformed) *malformed = r.malformed;
  return r.pdms;
}

}  // namespace mdplan::rl
