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

#include <cmath>

#include "rl/rl.hpp"

namespace mdplan::rl {

using tensor::Tensor;

namespace {

// Sum over positions of rho * A (or its clipped form) for one
// (input, target) pair.
Tensor pair_term(const Tensor& logp, const std::vector<double>& old_rows, std::span<const codec::TokenId> target,
                 double advantage, bool clip, double eps) {
  const std::size_t len = logp.rows(), vocab = logp.cols();
  if (target.size() != len || old_rows.size() != len * vocab) {
    throw RlError("hybrid: target of length " + std::to_string(target.size()) + " for log-probs " +
                  tensor::shape_string(logp.shape()));
  }
  std::vector<double> old(len);
  for (std::size_t t = 0; t < len; ++t) old[t] = old_rows[t * vocab + static_cast<std::size_t>(target[t])];
  const Tensor lp = tensor::gather_cols(logp, target);
  const std::vector<double> a(len, advantage);
  if (clip) return tensor::sum(clipped_surrogate(lp, old, a, eps));
  const Tensor ratio = tensor::exp(tensor::sub(lp, Tensor::from_data({len}, std::move(old))));
  return tensor::scale(tensor::sum(ratio), advantage);
}

}  // namespace

RefinerSnapshot refiner_snapshot(const model::PlannerModel& model, const model::Context& ctx,
                                 const RolloutGroup& group) {
  RefinerSnapshot snap;
  snap.group_id = group.id;
  tensor::NoGradGuard no_grad;
  for (const auto& x : group.trajectories) {
    const Tensor lp = tensor::log_softmax_rows(model.forward(ctx, x, model::ExpertId::kRefinement));
    snap.vocab = static_cast<int>(lp.cols());
    snap.logprob_rows.emplace_back(lp.data().begin(), lp.data().end());
  }
  return snap;
}

OnlineAdvantage online_refine(const model::PlannerModel& model, const sim::Scene& scene,
                              const RolloutGroup& group, const RefinerSnapshot& snap, int k, double temperature,
                              const codec::CodecConfig& codec_cfg, const sim::SimConfig& sim_cfg, Rng& rng) {
  if (model.config().n_expert_blocks < 1) throw RlError("online_refine: the model has no refinement expert");
  if (snap.group_id != group.id || snap.logprob_rows.size() != group.trajectories.size()) {
    throw RlError("online_refine: refiner snapshot belongs to a different group");
  }
  if (k < 1) throw RlError("online_refine: K must be at least 1");
  OnlineAdvantage on;
  on.group_id = group.id;
  on.g = static_cast<int>(group.trajectories.size());
  on.k = k;
  const std::size_t vocab = static_cast<std::size_t>(snap.vocab);
  for (int i = 0; i < on.g; ++i) {
    const auto& rows = snap.logprob_rows[static_cast<std::size_t>(i)];
    const std::size_t len = group.trajectories[static_cast<std::size_t>(i)].size();
    for (int kk = 0; kk < k; ++kk) {
      Tokens out(len);
      for (std::size_t t = 0; t < len; ++t) {
        out[t] = diffusion::sample_row(std::span<const double>(rows).subspan(t * vocab, vocab), temperature, rng).first;
      }
      const double r = token_reward(scene, out, codec_cfg, sim_cfg);
      on.refined_rewards.push_back(r);
      on.values.push_back(r - group.rewards[static_cast<std::size_t>(i)]);
      on.refined.push_back(std::move(out));
    }
  }
  return on;
}

Tensor hybrid_objective(std::span<const Tensor> logp, std::span<const std::vector<double>> old_rows,
                        std::span<const Tokens> traj, const OfflineAdvantage* off, const OnlineAdvantage* on,
                        bool clip, double eps, HybridStats* stats) {
  const std::size_t g = traj.size();
  if (logp.size() != g || old_rows.size() != g) throw RlError("hybrid: log-probs do not match the group size");
  if (off && static_cast<std::size_t>(off->g) != g) throw RlError("hybrid: offline advantages from another group");
  if (on && static_cast<std::size_t>(on->g) != g) throw RlError("hybrid: online advantages from another group");
  const double len = static_cast<double>(logp.empty() ? 1 : logp[0].rows());

  Tensor off_sum = Tensor::scalar(0.0);
  Tensor on_sum = Tensor::scalar(0.0);
  if (off) {
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t j = 0; j < g; ++j) {
        const double a = off->at(static_cast<int>(i), static_cast<int>(j));
        if (a == 0.0) continue;
        off_sum = tensor::add(off_sum, pair_term(logp[j], old_rows[j], traj[i], a, clip, eps));
      }
    }
  }
  if (on) {
    for (std::size_t i = 0; i < g; ++i) {
      for (int kk = 0; kk < on->k; ++kk) {
        const double a = on->at(static_cast<int>(i), kk);
        if (a == 0.0) continue;
        on_sum = tensor::add(on_sum, pair_term(logp[i], old_rows[i], on->sample(static_cast<int>(i), kk), a, clip, eps));
      }
    }
  }
  const double gd = static_cast<double>(g);
  const Tensor off_obj = tensor::scale(off_sum, 1.0 / (gd * gd * len));
  const Tensor on_obj = on ? tensor::scale(on_sum, 1.0 / (gd * on->k * len)) : on_sum;
  const Tensor objective = tensor::add(off_obj, on_obj);
  if (stats) {
    stats->offline_objective = off_obj.item();
    stats->online_objective = on_obj.item();
    stats->loss = -objective.item();
  }
  return tensor::scale(objective, -1.0);
}

HybridStats hybrid_backward(const model::PlannerModel& model, const model::Context& ctx, const RolloutGroup& group,
                            const RefinerSnapshot& snap, const OfflineAdvantage* off, const OnlineAdvantage* on,
                            const RftConfig& cfg) {
  if (snap.group_id != group.id || (off && off->group_id != group.id) || (on && on->group_id != group.id)) {
    throw RlError("hybrid: advantage structures do not come from this rollout group");
  }
  HybridStats stats;
  if (!off && !on) return stats;
  std::vector<Tensor> logp;
  for (const auto& x : group.trajectories) {
    logp.push_back(tensor::log_softmax_rows(model.forward(ctx, x, model::ExpertId::kRefinement)));
  }
  const Tensor loss = hybrid_objective(logp, snap.logprob_rows, group.trajectories, off, on, cfg.clip_hybrid,
                                       cfg.clip_eps, &stats);
  if (loss.requires_grad()) tensor::backward(loss);
  return stats;
}

}  // namespace mdplan::rl
