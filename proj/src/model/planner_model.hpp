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

#ifndef MDPLAN_MODEL_PLANNER_MODEL_HPP_
#define MDPLAN_MODEL_PLANNER_MODEL_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "codec/token_codec.hpp"
#include "sim/scene.hpp"
#include "tensor/optimizer.hpp"
#include "tensor/tensor.hpp"

namespace mdplan::model {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExpertId { kGeneration, kRefinement };

std::string_view expert_name(ExpertId e);

struct ModelConfig {
  int d_model = 128;
  int n_heads = 4;
  int n_shared_blocks = 6;
  int n_expert_blocks = 2;  // n
  int mlp_ratio = 4;
  int vocab_size = 5808;
  int response_len = 24;
  // Scene conditioning: a raster split into square patches plus one command token.
  int raster_channels = 4;
  int raster_size = 64;
  int patch_size = 8;
  // Detach the shared trunk and the output head on the refinement path.
  bool strict_confinement = true;
  std::uint64_t init_seed = 1;
  // Bin rows of the token table and head start from a sinusoidal code of the bin value.
  bool sinusoidal_bin_init = true;
  // Layout of the bin sub-vocabularies; needed for the sinusoidal init.
  int base_vocab_size = 8;
  int spatial_bins = 4000;
  int heading_bins = 1800;

  void validate() const;
  int patches_per_side() const { return raster_size / patch_size; }
  int n_patches() const { return patches_per_side() * patches_per_side(); }
  int patch_dim() const { return raster_channels * patch_size * patch_size; }
  /// Context rows: patch tokens plus the command token.
  int max_context_len() const { return n_patches() + 1; }
  int sequence_len() const { return max_context_len() + response_len; }
  int total_blocks() const { return n_shared_blocks + n_expert_blocks; }
  /// Scalars in one transformer block.
  std::size_t block_parameter_count() const;
};

/// Conditioning for one scene, precomputed once and reused across calls.
struct Context {
  tensor::Tensor patches;  // [n_patches, patch_dim]
  codec::TokenId command = codec::special::kCommandStraight;
};

Context make_context(const sim::Raster& raster, const ModelConfig& cfg);

class PlannerModel {
 public:
  explicit PlannerModel(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }
  tensor::ParameterSet& params() { return params_; }
  const tensor::ParameterSet& params() const { return params_; }

  /// Logits [L, vocab] at the response positions.
  tensor::Tensor forward(const Context& ctx, std::span<const codec::TokenId> response,
                         ExpertId expert) const;

  /// Copies the generation tail into the refinement tail.
  void init_refinement_from_generation();
  tensor::ParameterPartition parameter_partition() const { return params_.partition(); }

  /// Deep copy: parameter values and optimizer moments are duplicated.
  PlannerModel clone() const;

  /// Blocks traversed by the most recent forward call on this thread.
  static int last_forward_block_count();

 private:
  std::string block_prefix(int index, ExpertId expert) const;
  void add_block(const std::string& prefix, tensor::ParamLabel label);
  tensor::Tensor block_forward(const tensor::Tensor& x, const std::string& prefix) const;
  const tensor::Tensor& p(const std::string& id) const { return params_.get(id).value; }

  ModelConfig cfg_;
  tensor::ParameterSet params_;
  tensor::Tensor special_floor_;  // constant logit offset, -1e9 on special ids
};

}  // namespace mdplan::model

#endif  // MDPLAN_MODEL_PLANNER_MODEL_HPP_
