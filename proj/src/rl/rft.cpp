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

#include "rl/rl.hpp"

namespace mdplan::rl {

namespace {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (2 * index + stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Steps when every active parameter holds a gradient; a loss that never
// touched the active set leaves nothing to apply.
void step_active(tensor::ParameterSet& params, const std::set<tensor::ParamLabel>& active, double lr,
                 const tensor::OptimizerHyper& hyper) {
  bool any = false;
  for (const auto& p : params.items()) any = any || (active.count(p.label) && p.value.has_grad());
  if (any) {
    tensor::optimizer_step(params, active, lr, hyper);
  } else {
    params.clear_grads();
  }
}

}  // namespace

StepMetrics rft_step(model::PlannerModel& model, const model::PlannerModel& ref_model,
                     std::span<const SceneInput> batch, const RftConfig& cfg, const codec::CodecConfig& codec_cfg,
                     const sim::SimConfig& sim_cfg, const tensor::OptimizerHyper& hyper, std::uint64_t seed) {
  cfg.validate();
  using tensor::ParamLabel;
  StepMetrics m;
  double reward_sum = 0.0, refined_sum = 0.0, clip_sum = 0.0, kl_sum = 0.0;
  std::size_t reward_n = 0, refined_n = 0;
  const bool has_refiner = model.config().n_expert_blocks > 0;
  model.params().clear_grads();

  for (std::size_t s = 0; s < batch.size(); ++s) {
    const sim::Scene& scene = *batch[s].scene;
    const model::Context& ctx = *batch[s].context;
    Rng gen_rng(stream_seed(seed, s, 0));
    Rng refine_rng(stream_seed(seed, s, 1));

    const RolloutGroup group = rollout_group(model, ctx, scene, cfg, codec_cfg, sim_cfg, gen_rng);
    for (double r : group.rewards) reward_sum += r;
    reward_n += group.rewards.size();

    if (cfg.use_grpo) {
      const GrpoStats gs = grpo_backward(model, ref_model, ctx, group, cfg);
      step_active(model.params(), {ParamLabel::kShared, ParamLabel::kGenerationExpert}, cfg.lr_generation, hyper);
      m.grpo_loss += gs.loss;
      clip_sum += gs.clip_fraction;
      kl_sum += gs.kl;
    }

    if (has_refiner) {
      // Taken after the generation update so that ratios start at one.
      const RefinerSnapshot snap = refiner_snapshot(model, ctx, group);
      OnlineAdvantage on = online_refine(model, scene, group, snap, cfg.online_samples, cfg.refine_temperature,
                                         codec_cfg, sim_cfg, refine_rng);
      for (double r : on.refined_rewards) refined_sum += r;
      refined_n += on.refined_rewards.size();
      if (cfg.use_offline || cfg.use_online) {
        OfflineAdvantage off = offline_advantages(group.rewards);
        off.group_id = group.id;
        const HybridStats hs = hybrid_backward(model, ctx, group, snap, cfg.use_offline ? &off : nullptr,
                                               cfg.use_online ? &on : nullptr, cfg);
        step_active(model.params(), {ParamLabel::kRefinementExpert}, cfg.lr_refinement, hyper);
        m.hybrid_loss += hs.loss;
      }
    }
    ++m.scenes;
  }
  const double n = m.scenes > 0 ? static_cast<double>(m.scenes) : 1.0;
  m.mean_reward = reward_n ? reward_sum / static_cast<double>(reward_n) : 0.0;
  m.mean_refined_reward = refined_n ? refined_sum / static_cast<double>(refined_n) : 0.0;
  m.clip_fraction = clip_sum / n;
  m.kl = kl_sum / n;
  m.grpo_loss /= n;
  m.hybrid_loss /= n;
  return m;
}

}  // namespace mdplan::rl
