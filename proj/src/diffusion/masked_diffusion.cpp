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

#include "diffusion/masked_diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mdplan::diffusion {

using codec::special::kMask;
using tensor::Tensor;

namespace {

constexpr double kArgmaxTemperature = 1e-9;

void log_softmax_scaled(std::span<const double> logits, double temperature, std::vector<double>& out) {
  const double inv_t = 1.0 / temperature;
  out.resize(logits.size());
  double mx = -INFINITY;
  for (double v : logits) mx = std::max(mx, v * inv_t);
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) s += std::exp(logits[i] * inv_t - mx);
  const double lse = mx + std::log(s);
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] * inv_t - lse;
}

std::pair<TokenId, double> argmax_row(std::span<const double> logits) {
  const auto it = std::max_element(logits.begin(), logits.end());
  const std::size_t best = static_cast<std::size_t>(it - logits.begin());
  std::vector<double> lp;
  log_softmax_scaled(logits, 1.0, lp);
  return {static_cast<TokenId>(best), std::exp(lp[best])};
}

}  // namespace

std::pair<TokenId, double> sample_row(std::span<const double> logits, double temperature, Rng& rng) {
  if (temperature <= kArgmaxTemperature) return argmax_row(logits);
  std::vector<double> lp;
  log_softmax_scaled(logits, temperature, lp);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  std::size_t pick = lp.size() - 1;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    acc += std::exp(lp[i]);
    if (u < acc) {
      pick = i;
      break;
    }
  }
  return {static_cast<TokenId>(pick), std::exp(lp[pick])};
}

Corruption corrupt(std::span<const TokenId> r0, double t, Rng& rng) {
  if (!(t > 0.0 && t <= 1.0)) throw DiffusionError("corrupt: mask probability must lie in (0, 1], got " + std::to_string(t));
  if (r0.empty()) throw DiffusionError("corrupt: empty response");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Corruption c;
  c.tokens.assign(r0.begin(), r0.end());
  c.masked.assign(r0.size(), false);
  bool any = false;
  for (std::size_t i = 0; i < r0.size(); ++i) any = any || r0[i] == kMask;
  while (true) {
    bool drawn = false;
    for (std::size_t i = 0; i < r0.size(); ++i) {
      c.masked[i] = r0[i] == kMask || unif(rng) < t;
      drawn = drawn || c.masked[i];
    }
    if (drawn || any) break;
  }
  for (std::size_t i = 0; i < r0.size(); ++i) {
    if (c.masked[i]) c.tokens[i] = kMask;
  }
  return c;
}

Tensor sft_loss(const Tensor& logits, std::span<const TokenId> r0, std::span<const TokenId> rt, double t) {
  if (r0.size() != rt.size() || logits.rank() != 2 || logits.rows() != r0.size()) {
    throw DiffusionError("sft_loss: logits " + tensor::shape_string(logits.shape()) + " vs " +
                         std::to_string(r0.size()) + " targets and " + std::to_string(rt.size()) + " inputs");
  }
  if (!(t > 0.0 && t <= 1.0)) throw DiffusionError("sft_loss: t must lie in (0, 1]");
  std::vector<double> w(r0.size(), 0.0);
  bool any = false;
  for (std::size_t i = 0; i < rt.size(); ++i) {
    if (rt[i] == kMask) {
      w[i] = 1.0 / t;
      any = true;
    }
  }
  if (!any) throw DiffusionError("sft_loss: the mask set is empty");
  return tensor::cross_entropy_with_logits(logits, r0, w);
}

Tokens refine_sft_pair(std::span<const TokenId> r0, Rng& rng, double rate, const codec::CodecConfig& cfg) {
  if (!(rate >= 0.0 && rate < 1.0)) throw DiffusionError("refine_sft_pair: corruption rate must lie in [0, 1)");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Tokens out(r0.begin(), r0.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (unif(rng) < rate) {
      std::uniform_int_distribution<int> pick(0, cfg.slot_size(i) - 1);
      out[i] = cfg.slot_first_id(i) + pick(rng);
    }
  }
  return out;
}

Tensor refine_loss(const Tensor& logits, std::span<const TokenId> target) {
  return tensor::cross_entropy_with_logits(logits, target);
}

SampleResult sample(const model::PlannerModel& model, const model::Context& ctx, const SampleOptions& opt,
                    Rng& rng) {
  const int length = model.config().response_len;
  const int steps = opt.schedule.steps;
  if (static_cast<int>(opt.schedule.counts.size()) != steps ||
      std::accumulate(opt.schedule.counts.begin(), opt.schedule.counts.end(), 0) != length) {
    throw DiffusionError("sample: schedule does not cover the response length " + std::to_string(length));
  }
  const int kept = snapshot_count(steps, opt.tau);
  const double policy_t = opt.temperature > kArgmaxTemperature ? opt.temperature : 1.0;

  SampleResult res;
  Tokens x(static_cast<std::size_t>(length), kMask);
  res.path.tau = opt.tau;
  res.path.snapshots.push_back(x);
  // Log-probability rows of the positions masked at the current window start.
  std::vector<std::vector<double>> window_rows;

  tensor::NoGradGuard no_grad;
  for (int t = 1; t <= steps; ++t) {
    const Tensor logits = model.forward(ctx, x, model::ExpertId::kGeneration);
    const std::size_t vocab = logits.cols();
    const bool window_start = (t - 1) % opt.tau == 0 && (t - 1) / opt.tau < kept;
    if (opt.record_logprobs && window_start) {
      window_rows.assign(x.size(), {});
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == kMask) log_softmax_scaled(logits.data().subspan(i * vocab, vocab), policy_t, window_rows[i]);
      }
    }
    struct Candidate {
      std::size_t pos;
      TokenId token;
      double confidence;
    };
    std::vector<Candidate> cand;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] != kMask) continue;
      const auto [tok, prob] = sample_row(logits.data().subspan(i * vocab, vocab), opt.temperature, rng);
      cand.push_back({i, tok, prob});
    }
    std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
      return a.confidence > b.confidence;
    });
    const int keep = std::min<int>(opt.schedule.counts[t - 1], static_cast<int>(cand.size()));
    for (int c = 0; c < keep; ++c) x[cand[c].pos] = cand[c].token;

    const bool snapshot = (t % opt.tau == 0 && t / opt.tau < kept) || t == steps;
    if (snapshot) {
      const Tokens& prev = res.path.snapshots.back();
      if (opt.record_logprobs) {
        SnapshotRecord rec;
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (prev[i] == kMask && x[i] != kMask) {
            rec.positions.push_back(i);
            rec.tokens.push_back(x[i]);
            rec.logprobs.push_back(window_rows[i][static_cast<std::size_t>(x[i])]);
          }
        }
        res.path.transitions.push_back(std::move(rec));
      }
      res.path.snapshots.push_back(x);
    }
  }
  res.tokens = x;
  return res;
}

Tokens refine(const model::PlannerModel& model, const model::Context& ctx, std::span<const TokenId> tokens,
              RefineMode mode, double temperature, Rng& rng) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == kMask) throw DiffusionError("refine: input holds MASK at position " + std::to_string(i));
  }
  tensor::NoGradGuard no_grad;
  const Tensor logits = model.forward(ctx, tokens, model::ExpertId::kRefinement);
  const std::size_t vocab = logits.cols();
  Tokens out(tokens.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto row = logits.data().subspan(i * vocab, vocab);
    out[i] = mode == RefineMode::kArgmax ? argmax_row(row).first : sample_row(row, temperature, rng).first;
  }
  return out;
}

}  // namespace mdplan::diffusion
