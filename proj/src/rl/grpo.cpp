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

Tensor clipped_surrogate(const Tensor& logp_new, std::span<const double> logp_old, std::span<const double> adv,
                         double eps) {
  const std::size_t n = logp_new.numel();
  if (logp_old.size() != n || adv.size() != n) {
    throw RlError("clipped_surrogate: " + std::to_string(n) + " log-probs vs " + std::to_string(logp_old.size()) +
                  " old values and " + std::to_string(adv.size()) + " advantages");
  }
  const Tensor old = Tensor::from_data({n}, {logp_old.begin(), logp_old.end()});
  const Tensor a = Tensor::from_data({n}, {adv.begin(), adv.end()});
  const Tensor ratio = tensor::exp(tensor::sub(logp_new, old));
  return tensor::minimum(tensor::mul(ratio, a), tensor::mul(tensor::clamp(ratio, 1.0 - eps, 1.0 + eps), a));
}

GrpoStats grpo_backward(const model::PlannerModel& model, const model::PlannerModel& ref_model,
                        const model::Context& ctx, const RolloutGroup& group, const RftConfig& cfg) {
  cfg.validate();
  const std::size_t g = group.trajectories.size();
  if (g < 2 || group.paths.size() != g || group.rewards.size() != g) throw RlError("grpo: malformed rollout group");
  const std::vector<double> adv = grpo_advantages(group.rewards);
  const double length = static_cast<double>(model.config().response_len);
  const double inv_t = 1.0 / cfg.temperature;

  GrpoStats stats;
  int clipped = 0;
  for (std::size_t i = 0; i < g; ++i) {
    const auto& path = group.paths[i];
    if (path.transitions.size() + 1 != path.snapshots.size()) {
      throw RlError("grpo: sample path was collected without log-probabilities");
    }
    if (adv[i] == 0.0 && cfg.kl_beta == 0.0) continue;
    Tensor surrogate_sum = Tensor::scalar(0.0);
    Tensor kl_sum = Tensor::scalar(0.0);
    for (std::size_t j = 0; j < path.transitions.size(); ++j) {
      const auto& rec = path.transitions[j];
      if (rec.positions.empty()) {
        ++stats.empty_transitions;
        continue;
      }
      const Tensor logits = model.forward(ctx, path.snapshots[j], model::ExpertId::kGeneration);
      const Tensor lp = tensor::index_select_rows(tensor::log_softmax_rows(tensor::scale(logits, inv_t)), rec.positions);
      const Tensor lp_tok = tensor::gather_cols(lp, rec.tokens);
      const std::vector<double> a(rec.positions.size(), adv[i]);
      surrogate_sum = tensor::add(surrogate_sum, tensor::sum(clipped_surrogate(lp_tok, rec.logprobs, a, cfg.clip_eps)));
      for (std::size_t q = 0; q < rec.positions.size(); ++q) {
        const double rho = std::exp(lp_tok.data()[q] - rec.logprobs[q]);
        if (rho < 1.0 - cfg.clip_eps || rho > 1.0 + cfg.clip_eps) ++clipped;
      }
      stats.eligible_tokens += static_cast<int>(rec.positions.size());
      if (cfg.kl_beta > 0.0) {
        Tensor ref_lp;
        {
          tensor::NoGradGuard no_grad;
          const Tensor ref_logits = ref_model.forward(ctx, path.snapshots[j], model::ExpertId::kGeneration);
          ref_lp = tensor::index_select_rows(tensor::log_softmax_rows(tensor::scale(ref_logits, inv_t)), rec.positions);
        }
        const Tensor kl = tensor::sum(tensor::mul(tensor::exp(lp), tensor::sub(lp, ref_lp)));
        kl_sum = tensor::add(kl_sum, kl);
      }
    }
    // Objective normalizations: 1/G over trajectories, 1/L over tokens; the KL
    // is averaged over all G*L eligible positions.
    const Tensor objective = tensor::scale(surrogate_sum, 1.0 / (static_cast<double>(g) * length));
    const Tensor kl_mean = tensor::scale(kl_sum, 1.0 / (static_cast<double>(g) * length));
    const Tensor loss = tensor::add(tensor::scale(objective, -1.0), tensor::scale(kl_mean, cfg.kl_beta));
    stats.objective += objective.item();
    stats.kl += kl_mean.item();
    stats.loss += loss.item();
    if (loss.requires_grad()) tensor::backward(loss);
  }
  stats.clip_fraction = stats.eligible_tokens > 0 ? static_cast<double>(clipped) / stats.eligible_tokens : 0.0;
  return stats;
}

}  // namespace mdplan::rl
