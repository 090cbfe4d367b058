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

#ifndef MDPLAN_DIFFUSION_MASKED_DIFFUSION_HPP_
#define MDPLAN_DIFFUSION_MASKED_DIFFUSION_HPP_

#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "codec/token_codec.hpp"
#include "model/planner_model.hpp"
#include "tensor/tensor.hpp"

namespace mdplan::diffusion {

using codec::TokenId;
using Tokens = std::vector<TokenId>;
using Rng = std::mt19937_64;

class DiffusionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScheduleKind { kCosine, kUniform };

std::string_view schedule_name(ScheduleKind kind);
ScheduleKind parse_schedule(std::string_view name);

/// Per-step unmask counts; entries are non-negative and sum to L.
std::vector<int> cosine_counts(int steps, int length);
std::vector<int> uniform_counts(int steps, int length);

struct Schedule {
  ScheduleKind kind = ScheduleKind::kCosine;
  int steps = 12;
  std::vector<int> counts;

  static Schedule make(ScheduleKind kind, int steps, int length);
};

// ---- Training objectives ----

struct Corruption {
  Tokens tokens;
  std::vector<bool> masked;
};

/// Masks each position independently with probability t, redrawing until at
/// least one position is masked. Positions already holding MASK stay masked.
Corruption corrupt(std::span<const TokenId> r0, double t, Rng& rng);

/// -(1/t) * sum over masked positions of log p(r0 | r_t).
tensor::Tensor sft_loss(const tensor::Tensor& logits, std::span<const TokenId> r0,
                        std::span<const TokenId> rt, double t);

/// Replaces each position, with probability `rate`, by a uniform token of the
/// position's sub-vocabulary.
Tokens refine_sft_pair(std::span<const TokenId> r0, Rng& rng, double rate, const codec::CodecConfig& cfg);

/// Plain cross-entropy summed over all positions.
tensor::Tensor refine_loss(const tensor::Tensor& logits, std::span<const TokenId> target);

// ---- Inference ----

struct SnapshotRecord {
  // Positions masked in this snapshot and decoded by the next one.
  std::vector<std::size_t> positions;
  Tokens tokens;                  // the decoded tokens at those positions
  std::vector<double> logprobs;   // their log-probability under the sampling policy
};

struct SamplePath {
  int tau = 1;
  std::vector<Tokens> snapshots;           // x^0 (all MASK) ... x^J (no MASK)
  std::vector<SnapshotRecord> transitions;  // J entries; filled when recording
};

struct SampleOptions {
  Schedule schedule;
  double temperature = 1.0;  // <= 0 selects argmax decoding
  int tau = 1;
  bool record_logprobs = false;
};

struct SampleResult {
  Tokens tokens;
  SamplePath path;
};

/// Confidence-prioritized iterative unmasking with the generation expert.
/// The path keeps x^0, then the state after every tau steps; when tau does
/// not divide the step count, the last kept state is the final one.
SampleResult sample(const model::PlannerModel& model, const model::Context& ctx,
                    const SampleOptions& options, Rng& rng);

/// Number of transitions kept for (steps, tau).
int snapshot_count(int steps, int tau);

enum class RefineMode { kArgmax, kSample };

/// One refinement-expert pass that re-emits every position.
Tokens refine(const model::PlannerModel& model, const model::Context& ctx, std::span<const TokenId> tokens,
              RefineMode mode, double temperature, Rng& rng);

/// Samples a token from softmax(logits / temperature); returns (token, prob).
std::pair<TokenId, double> sample_row(std::span<const double> logits, double temperature, Rng& rng);

}  // namespace mdplan::diffusion

#endif  // MDPLAN_DIFFUSION_MASKED_DIFFUSION_HPP_
