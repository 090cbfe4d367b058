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

#ifndef MDPLAN_RL_RL_HPP_
#define MDPLAN_RL_RL_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "codec/token_codec.hpp"
#include "diffusion/masked_diffusion.hpp"
#include "model/planner_model.hpp"
#include "sim/scene.hpp"
#include "tensor/optimizer.hpp"
#include "tensor/tensor.hpp"

namespace mdplan::rl {

using diffusion::Rng;
using diffusion::Tokens;

class RlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RftConfig {
  int group_size = 10;     // G
  int online_samples = 6;  // K
  int steps = 12;          // s
  int tau = 4;
  diffusion::ScheduleKind schedule = diffusion::ScheduleKind::kCosine;
  double temperature = 1.0;         // rollout sampling
  double refine_temperature = 1.0;  // online refinement sampling
  double clip_eps = 0.2;
  double kl_beta = 0.01;
  double lr_generation = 1e-5;
  double lr_refinement = 1e-5;
  bool clip_hybrid = false;
  // Components of the objective; switched off individually for ablations.
  bool use_grpo = true;
  bool use_offline = true;
  bool use_online = true;

  void validate() const;
};

// ---- Advantages ----

/// r_i - mean(r).
std::vector<double> grpo_advantages(std::span<const double> rewards);

/// Row-major G x G matrix with entry (i, j) = r_i - r_j.
struct OfflineAdvantage {
  std::uint64_t group_id = 0;
  int g = 0;
  std::vector<double> values;
  double at(int i, int j) const { return values[static_cast<std::size_t>(i * g + j)]; }
};
OfflineAdvantage offline_advantages(std::span<const double> rewards);

/// Online refinement samples for every group member.
struct OnlineAdvantage {
  std::uint64_t group_id = 0;
  int g = 0;
  int k = 0;
  std::vector<Tokens> refined;        // G*K sequences, row-major (i, k)
  std::vector<double> refined_rewards;
  std::vector<double> values;         // r_hat_ik - r_i
  double at(int i, int kk) const { return values[static_cast<std::size_t>(i * k + kk)]; }
  const Tokens& sample(int i, int kk) const { return refined[static_cast<std::size_t>(i * k + kk)]; }
};

// ---- Rewards ----

/// PDMS-like reward of a token sequence; malformed sequences score 0.
double token_reward(const sim::Scene& scene, std::span<const codec::TokenId> tokens,
                    const codec::CodecConfig& codec_cfg, const sim::SimConfig& sim_cfg, bool* malformed = nullptr);

// ---- Rollouts ----

struct RolloutGroup {
  std::uint64_t id = 0;  // provenance tag shared with derived advantage structures
  std::vector<Tokens> trajectories;
  std::vector<diffusion::SamplePath> paths;
  std::vector<double> rewards;
};

RolloutGroup rollout_group(const model::PlannerModel& model, const model::Context& ctx, const sim::Scene& scene,
                           const RftConfig& cfg, const codec::CodecConfig& codec_cfg,
                           const sim::SimConfig& sim_cfg, Rng& rng);

// ---- Objectives ----

/// Per-token clipped surrogate min(rho*A, clip(rho, 1-eps, 1+eps)*A) with
/// rho = exp(logp_new - logp_old).
tensor::Tensor clipped_surrogate(const tensor::Tensor& logp_new, std::span<const double> logp_old,
                                 std::span<const double> advantages, double eps);

struct GrpoStats {
  double loss = 0.0;
  double objective = 0.0;
  double kl = 0.0;
  double clip_fraction = 0.0;
  int eligible_tokens = 0;
  int empty_transitions = 0;
};

/// Builds the GRPO loss for trajectory i and runs backward on it; the sum
/// over trajectories equals the full loss. Gradients land on the generation
/// path parameters.
GrpoStats grpo_backward(const model::PlannerModel& model, const model::PlannerModel& ref_model,
                        const model::Context& ctx, const RolloutGroup& group, const RftConfig& cfg);

/// Online refinement: K temperature samples from the refinement expert per
/// member. Also returns the sampling-time log-probability rows of the
/// refinement expert for each member as input (reused by the hybrid loss).
struct RefinerSnapshot {
  std::uint64_t group_id = 0;
  std::vector<std::vector<double>> logprob_rows;  // per input i: L x V log-softmax
  int vocab = 0;
};

RefinerSnapshot refiner_snapshot(const model::PlannerModel& model, const model::Context& ctx,
                                 const RolloutGroup& group);

OnlineAdvantage online_refine(const model::PlannerModel& model, const sim::Scene& scene,
                              const RolloutGroup& group, const RefinerSnapshot& snap, int k, double temperature,
                              const codec::CodecConfig& codec_cfg, const sim::SimConfig& sim_cfg, Rng& rng);

struct HybridStats {
  double loss = 0.0;
  double offline_objective = 0.0;
  double online_objective = 0.0;
};

/// Hybrid objective on log-probability rows: logp[i] holds the [L, V]
/// log-softmax of the refiner given trajectory i, old_rows the same at
/// sampling time. Offline pairs use input j and target i; online samples use
/// input i and target x_hat_ik. Either advantage pointer may be null.
tensor::Tensor hybrid_objective(std::span<const tensor::Tensor> logp, std::span<const std::vector<double>> old_rows,
                                std::span<const Tokens> trajectories, const OfflineAdvantage* off,
                                const OnlineAdvantage* on, bool clip, double eps, HybridStats* stats);

/// Builds the hybrid loss through the refinement expert and runs backward.
HybridStats hybrid_backward(const model::PlannerModel& model, const model::Context& ctx, const RolloutGroup& group,
                            const RefinerSnapshot& snap, const OfflineAdvantage* off, const OnlineAdvantage* on,
                            const RftConfig& cfg);

// ---- Training step ----

struct StepMetrics {
  double mean_reward = 0.0;
  double mean_refined_reward = 0.0;
  double clip_fraction = 0.0;
  double kl = 0.0;
  double grpo_loss = 0.0;
  double hybrid_loss = 0.0;
  int scenes = 0;
};

struct SceneInput {
  const sim::Scene* scene = nullptr;
  const model::Context* context = nullptr;
};

/// One synchronous update per scene: GRPO on the generation path, then the
/// hybrid objective on the refinement expert. `seed` drives every random
/// choice; the two halves draw from separate streams.
StepMetrics rft_step(model::PlannerModel& model, const model::PlannerModel& ref_model,
                     std::span<const SceneInput> batch, const RftConfig& cfg, const codec::CodecConfig& codec_cfg,
                     const sim::SimConfig& sim_cfg, const tensor::OptimizerHyper& hyper, std::uint64_t seed);

}  // namespace mdplan::rl

#endif  // MDPLAN_RL_RL_HPP_
