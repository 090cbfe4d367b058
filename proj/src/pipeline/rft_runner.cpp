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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "pipeline/training.hpp"

namespace mdplan::pipeline {

namespace {

void write_metrics_row(std::ofstream& out, const RftRow& r) {
  char buf[256];
  const auto& m = r.metrics;
  std::snprintf(buf, sizeof(buf), "%lld,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", static_cast<long long>(r.step),
                r.epoch, m.mean_reward, m.mean_refined_reward, m.clip_fraction, m.kl, m.grpo_loss, m.hybrid_loss);
  out << buf;
}

}  // namespace

std::vector<RftRow> run_rft(const RunConfig& cfg, model::PlannerModel& model, Progress& progress,
                            const std::vector<Example>& examples, const RftOptions& options) {
  if (examples.empty()) throw ConfigError("rft: no training scenes");
  if (progress.stage == "rft") throw ConfigError("rft: resuming an interrupted rft run is not supported");
  const model::PlannerModel ref_model = model.clone();
  std::ofstream csv;
  if (!options.metrics_csv.empty()) {
    csv.open(options.metrics_csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw ConfigError("cannot write metrics log '" + options.metrics_csv + "'");
    csv << "step,epoch,mean_r,mean_r_refined,clip_frac,kl,grpo_loss,hybrid_loss\n";
  }
  progress = Progress{"rft", 0, 0, -1.0};
  std::vector<RftRow> rows;
  const std::size_t n = examples.size();
  const std::size_t batch = static_cast<std::size_t>(cfg.rft_batch);
  for (int epoch = 1; epoch <= cfg.rft_epochs; ++epoch) {
    diffusion::Rng rng(derive_seed(cfg.seed, 0x2F7, static_cast<std::uint64_t>(epoch)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_reward = 0.0;
    int epoch_steps = 0;
    for (std::size_t b0 = 0; b0 < n; b0 += batch) {
      std::vector<rl::SceneInput> inputs;
      for (std::size_t q = b0; q < std::min(n, b0 + batch); ++q) {
        inputs.push_back({&examples[order[q]].scene, &examples[order[q]].context});
      }
      RftRow row;
      row.step = progress.step + 1;
      row.epoch = epoch;
      row.metrics = rl::rft_step(model, ref_model, inputs, cfg.rft, cfg.codec, cfg.sim, cfg.optimizer,
                                 derive_seed(cfg.seed, 0x2F8, static_cast<std::uint64_t>(row.step)));
      progress.step = row.step;
      epoch_reward += row.metrics.mean_reward;
      ++epoch_steps;
      if (csv.is_open()) {
        write_metrics_row(csv, row);
        csv.flush();
      }
      if (options.on_step) options.on_step(row);
      rows.push_back(row);
    }
    progress.epoch = epoch;
    const double mean = epoch_steps ? epoch_reward / epoch_steps : 0.0;
    if (mean > progress.best_reward) {
      progress.best_reward = mean;
      if (!options.best_checkpoint_path.empty()) save_checkpoint(options.best_checkpoint_path, cfg, model, progress);
    }
  }
  if (!options.checkpoint_path.empty()) save_checkpoint(options.checkpoint_path, cfg, model, progress);
  return rows;
}

}  // namespace mdplan::pipeline
