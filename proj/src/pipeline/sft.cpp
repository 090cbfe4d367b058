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
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "pipeline/training.hpp"

namespace mdplan::pipeline {

using tensor::ParamLabel;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t z = seed;
  for (std::uint64_t part : {a, b, c}) {
    z += 0x9E3779B97F4A7C15ULL + part;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
  }
  return z;
}

double sft_learning_rate(const SftConfig& cfg, std::int64_t step, std::int64_t total) {
  if (cfg.warmup_steps > 0 && step < cfg.warmup_steps) {
    return cfg.lr * static_cast<double>(step + 1) / static_cast<double>(cfg.warmup_steps);
  }
  const double span = static_cast<double>(std::max<std::int64_t>(1, total - cfg.warmup_steps));
  const double frac = std::clamp(static_cast<double>(step - cfg.warmup_steps) / span, 0.0, 1.0);
  return cfg.lr_min + 0.5 * (cfg.lr - cfg.lr_min) * (1.0 + std::cos(std::numbers::pi * frac));
}

namespace {

void append_row(const std::string& path, const SftEpoch& e, bool header) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw ConfigError("cannot write loss log '" + path + "'");
  if (header) out << "epoch,gen_loss,refine_loss,lr\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g\n", e.epoch, e.gen_loss, e.refine_loss, e.lr);
  out << buf;
}

// Keeps the header and rows up to `epoch`, so a resumed run continues the log.
void truncate_log(const std::string& path, int epoch) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  std::vector<std::string> keep;
  std::string line;
  while (std::getline(in, line)) {
    if (keep.empty()) {
      keep.push_back(line);
      continue;
    }
    if (std::stoi(line.substr(0, line.find(','))) <= epoch) keep.push_back(line);
  }
  in.close();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& l : keep) out << l << '\n';
}

}  // namespace

std::vector<SftEpoch> run_sft(const RunConfig& cfg, model::PlannerModel& model, Progress& progress,
                              const std::vector<Example>& examples, const SftOptions& options) {
  if (examples.empty()) throw ConfigError("sft: no training examples");
  if (progress.stage != "init" && progress.stage != "sft") {
    throw ConfigError("sft: cannot resume from a '" + progress.stage + "' checkpoint");
  }
  const SftConfig& sc = cfg.sft;
  const bool has_refiner = model.config().n_expert_blocks > 0;
  const std::size_t n = examples.size();
  const std::size_t batch = static_cast<std::size_t>(sc.batch);
  const std::int64_t steps_per_epoch = static_cast<std::int64_t>((n + batch - 1) / batch);
  const std::int64_t total_steps = steps_per_epoch * sc.epochs;
  const int length = model.config().response_len;

  if (!options.log_csv.empty()) {
    if (progress.epoch == 0) {
      std::ofstream(options.log_csv, std::ios::binary | std::ios::trunc);
    } else {
      truncate_log(options.log_csv, progress.epoch);
    }
  }
  diffusion::SampleOptions gen_opt;
  gen_opt.schedule = diffusion::Schedule::make(cfg.schedule, sc.refine_model_steps, length);
  gen_opt.temperature = 1.0;
  gen_opt.tau = sc.refine_model_steps;

  std::vector<SftEpoch> history;
  model.params().clear_grads();
  for (int epoch = progress.epoch + 1; epoch <= sc.epochs; ++epoch) {
    // Generation and refinement halves draw from separate streams, so the
    // generation path trains identically whatever the refiner does.
    diffusion::Rng gen_rng(derive_seed(cfg.seed, 0x5F7, static_cast<std::uint64_t>(epoch), 0));
    diffusion::Rng ref_rng(derive_seed(cfg.seed, 0x5F7, static_cast<std::uint64_t>(epoch), 1));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), gen_rng);

    SftEpoch stats;
    stats.epoch = epoch;
    for (std::size_t b0 = 0; b0 < n; b0 += batch) {
      const std::size_t b1 = std::min(n, b0 + batch);
      const double inv = 1.0 / static_cast<double>(b1 - b0);
      const double lr = sft_learning_rate(sc, progress.step, total_steps);
      stats.lr = lr;

      std::uniform_real_distribution<double> t_dist(sc.mask_t_min, 1.0);
      for (std::size_t q = b0; q < b1; ++q) {
        const Example& ex = examples[order[q]];
        // U(a, 1) on the open interval; 1 - U(0, 1 - a) lands in (a, 1].
        const double t = sc.mask_t_min >= 1.0 ? 1.0 : 1.0 - t_dist(gen_rng) + sc.mask_t_min;
        const diffusion::Corruption c = diffusion::corrupt(ex.target, t, gen_rng);
        const tensor::Tensor logits = model.forward(ex.context, c.tokens, model::ExpertId::kGeneration);
        const tensor::Tensor loss = tensor::scale(diffusion::sft_loss(logits, ex.target, c.tokens, t), inv);
        stats.gen_loss += loss.item();
        tensor::backward(loss);
      }
      tensor::optimizer_step(model.params(), {ParamLabel::kShared, ParamLabel::kGenerationExpert}, lr, cfg.optimizer);

      if (has_refiner) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t q = b0; q < b1; ++q) {
          const Example& ex = examples[order[q]];
          diffusion::Tokens input;
          const bool generated = epoch > sc.refine_model_warmup && u(ref_rng) < sc.refine_model_fraction;
          if (generated) {
            input = diffusion::sample(model, ex.context, gen_opt, ref_rng).tokens;
          } else {
            input = diffusion::refine_sft_pair(ex.target, ref_rng, sc.refine_corruption_rate, cfg.codec);
          }
          const tensor::Tensor logits = model.forward(ex.context, input, model::ExpertId::kRefinement);
          const tensor::Tensor loss = tensor::scale(diffusion::refine_loss(logits, ex.target), inv);
          stats.refine_loss += loss.item();
          tensor::backward(loss);
        }
        tensor::optimizer_step(model.params(), {ParamLabel::kRefinementExpert}, lr, cfg.optimizer);
      }
      ++progress.step;
    }
    const double nb = static_cast<double>(steps_per_epoch);
    stats.gen_loss /= nb;
    stats.refine_loss /= nb;
    progress.stage = "sft";
    progress.epoch = epoch;
    history.push_back(stats);
    if (!options.log_csv.empty()) {
      std::ifstream probe(options.log_csv, std::ios::binary | std::ios::ate);
      append_row(options.log_csv, stats, !probe || probe.tellg() == 0);
    }
    if (options.on_epoch) options.on_epoch(stats);
    const bool last = epoch == sc.epochs;
    const bool stop = options.stop_after_epoch > 0 && epoch >= options.stop_after_epoch;
    if (!options.checkpoint_path.empty() &&
        (last || stop || (sc.checkpoint_every > 0 && epoch % sc.checkpoint_every == 0))) {
      save_checkpoint(options.checkpoint_path, cfg, model, progress);
    }
    if (stop) break;
  }
  return history;
}

}  // namespace mdplan::pipeline
