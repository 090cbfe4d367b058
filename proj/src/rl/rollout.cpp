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

#include "rl/rl.hpp"

namespace mdplan::rl {

RolloutGroup rollout_group(const model::PlannerModel& model, const model::Context& ctx, const sim::Scene& scene,
                           const RftConfig& cfg, const codec::CodecConfig& codec_cfg,
                           const sim::SimConfig& sim_cfg, Rng& rng) {
  cfg.validate();
  diffusion::SampleOptions opt;
  opt.schedule = diffusion::Schedule::make(cfg.schedule, cfg.steps, model.config().response_len);
  opt.temperature = cfg.temperature;
  opt.tau = cfg.tau;
  opt.record_logprobs = true;

  RolloutGroup group;
  group.id = rng();
  for (int i = 0; i < cfg.group_size; ++i) {
    diffusion::SampleResult res = diffusion::sample(model, ctx, opt, rng);
    group.rewards.push_back(token_reward(scene, res.tokens, codec_cfg, sim_cfg));
    group.trajectories.push_back(std::move(res.tokens));
    group.paths.push_back(std::move(res.path));
  }
  return group;
}

}  // namespace mdplan::rl
