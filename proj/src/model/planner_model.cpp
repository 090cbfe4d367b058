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

#include "model/planner_model.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace mdplan::model {

using tensor::ParamLabel;
using tensor::Tensor;

namespace {

thread_local int g_last_block_count = 0;

std::uint64_t mix_seed(std::uint64_t seed, std::string_view id) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = seed ^ h;
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Each parameter draws from its own stream so that adding or removing
// parameters never shifts the initial values of the others.
Tensor normal_init(std::uint64_t seed, std::string_view id, tensor::Shape shape, double stddev) {
  std::mt19937_64 gen(mix_seed(seed, id));
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> v(tensor::shape_numel(shape));
  for (double& x : v) x = dist(gen);
  return Tensor::from_data(std::move(shape), std::move(v));
}

Tensor constant_init(tensor::Shape shape, double value) {
  std::vector<double> v(tensor::shape_numel(shape), value);
  return Tensor::from_data(std::move(shape), std::move(v));
}

// Writes a sinusoidal code of bin index b (out of `bins`) into row `row` of a
// [rows, d] table laid out row-major, scaled by `amp`.
void write_bin_code(std::span<double> table, std::size_t d, std::size_t row, int b, int bins,
                    double amp) {
  const std::size_t half = d / 2;
  const double u = (b + 0.5) / bins;
  const double top = std::log2(std::max(2.0, bins / 2.0));
  for (std::size_t k = 0; k < half; ++k) {
    const double expo = half > 1 ? top * static_cast<double>(k) / static_cast<double>(half - 1) : 0.0;
    const double w = std::numbers::pi * std::exp2(expo);
    table[row * d + 2 * k] = amp * std::sin(w * u);
    table[row * d + 2 * k + 1] = amp * std::cos(w * u);
  }
}

}  // namespace

std::string_view expert_name(ExpertId e) {
  return e == ExpertId::kGeneration ? "generation" : "refinement";
}

void ModelConfig::validate() const {
  if (d_model <= 0 || n_heads <= 0 || d_model % n_heads != 0) {
    throw ModelError("d_model (" + std::to_string(d_model) + ") must be a positive multiple of n_heads (" +
                     std::to_string(n_heads) + ")");
  }
  if (n_shared_blocks < 0 || n_expert_blocks < 0 || total_blocks() == 0) {
    throw ModelError("block counts must be non-negative with at least one block");
  }
  if (mlp_ratio <= 0 || response_len <= 0) throw ModelError("mlp_ratio and response_len must be positive");
  if (vocab_size != base_vocab_size + spatial_bins + heading_bins) {
    throw ModelError("vocab_size " + std::to_string(vocab_size) + " does not match the codec layout (" +
                     std::to_string(base_vocab_size + spatial_bins + heading_bins) + ")");
  }
  if (patch_size <= 0 || raster_size % patch_size != 0 || raster_channels <= 0) {
    throw ModelError("raster_size must be a positive multiple of patch_size");
  }
}

std::size_t ModelConfig::block_parameter_count() const {
  const std::size_t d = static_cast<std::size_t>(d_model);
  const std::size_t h = d * static_cast<std::size_t>(mlp_ratio);
  // Two layer norms, q/k/v/o projections with output bias, and the MLP.
  return 4 * d + 4 * d * d + d + (d * h + h) + (h * d + d);
}

Context make_context(const sim::Raster& raster, const ModelConfig& cfg) {
  if (raster.channels != cfg.raster_channels || raster.size != cfg.raster_size) {
    throw ModelError("raster shape " + std::to_string(raster.channels) + "x" + std::to_string(raster.size) +
                     " does not match the model (" + std::to_string(cfg.raster_channels) + "x" +
                     std::to_string(cfg.raster_size) + ")");
  }
  const int side = cfg.patches_per_side(), ps = cfg.patch_size;
  const std::size_t dim = static_cast<std::size_t>(cfg.patch_dim());
  std::vector<double> v(static_cast<std::size_t>(cfg.n_patches()) * dim);
  for (int pr = 0; pr < side; ++pr) {
    for (int pc = 0; pc < side; ++pc) {
      double* out = v.data() + static_cast<std::size_t>(pr * side + pc) * dim;
      for (int c = 0; c < cfg.raster_channels; ++c) {
        for (int y = 0; y < ps; ++y) {
          for (int x = 0; x < ps; ++x) *out++ = raster.at(c, pr * ps + y, pc * ps + x);
        }
      }
    }
  }
  Context ctx;
  ctx.patches = Tensor::from_data({static_cast<std::size_t>(cfg.n_patches()), dim}, std::move(v));
  ctx.command = raster.command;
  return ctx;
}

PlannerModel::PlannerModel(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const std::size_t d = static_cast<std::size_t>(cfg_.d_model);
  const std::size_t v = static_cast<std::size_t>(cfg_.vocab_size);
  const std::uint64_t seed = cfg_.init_seed;

  // Special ids never belong in a response; pin their logits far below the rest.
  std::vector<double> floor(v, 0.0);
  std::fill_n(floor.begin(), std::min<std::size_t>(v, static_cast<std::size_t>(cfg_.base_vocab_size)), -1e9);
  special_floor_ = Tensor::from_data({v}, floor);

  Tensor tok = normal_init(seed, "embed.token", {v, d}, 0.5);
  Tensor head_w = normal_init(seed, "head.w", {d, v}, 0.02);
  if (cfg_.sinusoidal_bin_init && d >= 2) {
    auto table = tok.mutable_data();
    std::vector<double> head_rows(v * d, 0.0);
    const auto code_range = [&](int first, int bins) {
      for (int b = 0; b < bins; ++b) {
        const std::size_t row = static_cast<std::size_t>(first + b);
        write_bin_code(table, d, row, b, bins, 0.5);
        write_bin_code(head_rows, d, row, b, bins, 0.1);
      }
    };
    code_range(cfg_.base_vocab_size, cfg_.spatial_bins);
    code_range(cfg_.base_vocab_size + cfg_.spatial_bins, cfg_.heading_bins);
    // The head is stored [d, vocab]; bin columns take the transposed code.
    auto hw = head_w.mutable_data();
    for (std::size_t r = static_cast<std::size_t>(cfg_.base_vocab_size); r < v; ++r) {
      for (std::size_t c = 0; c < d; ++c) hw[c * v + r] = head_rows[r * d + c];
    }
  }
  params_.add("embed.token", tok, ParamLabel::kShared);
  const std::size_t pd = static_cast<std::size_t>(cfg_.patch_dim());
  params_.add("embed.patch.w", normal_init(seed, "embed.patch.w", {pd, d}, 1.0 / std::sqrt(pd)),
              ParamLabel::kShared);
  params_.add("embed.patch.b", constant_init({d}, 0.0), ParamLabel::kShared);
  params_.add("embed.pos",
              normal_init(seed, "embed.pos", {static_cast<std::size_t>(cfg_.sequence_len()), d}, 0.1),
              ParamLabel::kShared);
  for (int i = 0; i < cfg_.total_blocks(); ++i) {
    add_block(block_prefix(i, ExpertId::kGeneration),
              i < cfg_.n_shared_blocks ? ParamLabel::kShared : ParamLabel::kGenerationExpert);
  }
  params_.add("head.ln.g", constant_init({d}, 1.0), ParamLabel::kShared);
  params_.add("head.ln.b", constant_init({d}, 0.0), ParamLabel::kShared);
  params_.add("head.w", head_w, ParamLabel::kShared);
  params_.add("head.b", constant_init({v}, 0.0), ParamLabel::kShared);
  init_refinement_from_generation();
}

std::string PlannerModel::block_prefix(int index, ExpertId expert) const {
  const bool tail = index >= cfg_.n_shared_blocks;
  if (expert == ExpertId::kRefinement && tail) return "refine.block." + std::to_string(index) + ".";
  return "block." + std::to_string(index) + ".";
}

void PlannerModel::add_block(const std::string& pre, ParamLabel label) {
  const std::size_t d = static_cast<std::size_t>(cfg_.d_model);
  const std::size_t h = d * static_cast<std::size_t>(cfg_.mlp_ratio);
  const std::uint64_t seed = cfg_.init_seed;
  const double in_std = 1.0 / std::sqrt(static_cast<double>(d));
  const double out_scale = 1.0 / std::sqrt(2.0 * cfg_.total_blocks());
  params_.add(pre + "ln1.g", constant_init({d}, 1.0), label);
  params_.add(pre + "ln1.b", constant_init({d}, 0.0), label);
  params_.add(pre + "wq", normal_init(seed, pre + "wq", {d, d}, in_std), label);
  params_.add(pre + "wk", normal_init(seed, pre + "wk", {d, d}, in_std), label);
  params_.add(pre + "wv", normal_init(seed, pre + "wv", {d, d}, in_std), label);
  params_.add(pre + "wo", normal_init(seed, pre + "wo", {d, d}, in_std * out_scale), label);
  params_.add(pre + "bo", constant_init({d}, 0.0), label);
  params_.add(pre + "ln2.g", constant_init({d}, 1.0), label);
  params_.add(pre + "ln2.b", constant_init({d}, 0.0), label);
  params_.add(pre + "w1", normal_init(seed, pre + "w1", {d, h}, in_std), label);
  params_.add(pre + "b1", constant_init({h}, 0.0), label);
  params_.add(pre + "w2", normal_init(seed, pre + "w2", {h, d}, out_scale / std::sqrt(static_cast<double>(h))),
              label);
  params_.add(pre + "b2", constant_init({d}, 0.0), label);
}

void PlannerModel::init_refinement_from_generation() {
  for (int i = cfg_.n_shared_blocks; i < cfg_.total_blocks(); ++i) {
    const std::string gen = block_prefix(i, ExpertId::kGeneration);
    const std::string ref = block_prefix(i, ExpertId::kRefinement);
    if (!params_.contains(ref + "wq")) add_block(ref, ParamLabel::kRefinementExpert);
    for (const char* name : {"ln1.g", "ln1.b", "wq", "wk", "wv", "wo", "bo", "ln2.g", "ln2.b", "w1", "b1",
                             "w2", "b2"}) {
      auto& dst = params_.get(ref + name);
      const auto src = params_.get(gen + name).value.data();
      auto out = dst.value.mutable_data();
      std::copy(src.begin(), src.end(), out.begin());
      dst.m.clear();
      dst.v.clear();
      dst.step = 0;
      dst.label = ParamLabel::kRefinementExpert;
    }
  }
}

Tensor PlannerModel::block_forward(const Tensor& x, const std::string& pre) const {
  const Tensor h = tensor::layer_norm(x, p(pre + "ln1.g"), p(pre + "ln1.b"));
  const Tensor att = tensor::multi_head_attention(tensor::matmul(h, p(pre + "wq")), tensor::matmul(h, p(pre + "wk")),
                                                  tensor::matmul(h, p(pre + "wv")), cfg_.n_heads);
  const Tensor x1 = tensor::add(x, tensor::add_bias(tensor::matmul(att, p(pre + "wo")), p(pre + "bo")));
  const Tensor h2 = tensor::layer_norm(x1, p(pre + "ln2.g"), p(pre + "ln2.b"));
  const Tensor mid = tensor::gelu(tensor::add_bias(tensor::matmul(h2, p(pre + "w1")), p(pre + "b1")));
  return tensor::add(x1, tensor::add_bias(tensor::matmul(mid, p(pre + "w2")), p(pre + "b2")));
}

Tensor PlannerModel::forward(const Context& ctx, std::span<const codec::TokenId> response,
                             ExpertId expert) const {
  if (!ctx.patches.defined() || ctx.patches.rows() != static_cast<std::size_t>(cfg_.n_patches()) ||
      ctx.patches.cols() != static_cast<std::size_t>(cfg_.patch_dim())) {
    throw ModelError("context patches do not match the model configuration");
  }
  const std::size_t total = static_cast<std::size_t>(cfg_.max_context_len()) + response.size();
  if (response.size() > static_cast<std::size_t>(cfg_.response_len)) {
    throw ModelError("sequence length " + std::to_string(total) + " exceeds the maximum " +
                     std::to_string(cfg_.sequence_len()));
  }
  if (response.size() != static_cast<std::size_t>(cfg_.response_len)) {
    throw ModelError("response length " + std::to_string(response.size()) + " differs from " +
                     std::to_string(cfg_.response_len));
  }
  // With no expert blocks both experts are the same function.
  const bool detach = expert == ExpertId::kRefinement && cfg_.n_expert_blocks > 0 && cfg_.strict_confinement;

  const auto trunk = [&]() {
    const Tensor patches = tensor::add_bias(tensor::matmul(ctx.patches, p("embed.patch.w")), p("embed.patch.b"));
    std::vector<codec::TokenId> ids;
    ids.reserve(response.size() + 1);
    ids.push_back(ctx.command);
    ids.insert(ids.end(), response.begin(), response.end());
    const Tensor tokens = tensor::embedding_lookup(p("embed.token"), ids);
    const Tensor parts[] = {patches, tokens};
    Tensor x = tensor::add(tensor::concat_rows(parts), p("embed.pos"));
    for (int i = 0; i < cfg_.n_shared_blocks; ++i) x = block_forward(x, block_prefix(i, ExpertId::kGeneration));
    return x;
  };

  Tensor x;
  if (detach) {
    tensor::NoGradGuard guard;
    x = trunk();
  } else {
    x = trunk();
  }
  if (detach) x = tensor::stop_gradient(x);
  for (int i = cfg_.n_shared_blocks; i < cfg_.total_blocks(); ++i) x = block_forward(x, block_prefix(i, expert));
  g_last_block_count = cfg_.total_blocks();

  std::vector<std::size_t> rows(response.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<std::size_t>(cfg_.max_context_len()) + i;
  const Tensor resp = tensor::index_select_rows(x, rows);
  const auto head = [&](const char* id) { return detach ? tensor::stop_gradient(p(id)) : p(id); };
  const Tensor h = tensor::layer_norm(resp, head("head.ln.g"), head("head.ln.b"));
  const Tensor logits = tensor::add_bias(tensor::matmul(h, head("head.w")), head("head.b"));
  return tensor::add_bias(logits, special_floor_);
}

PlannerModel PlannerModel::clone() const {
  PlannerModel out = *this;
  for (auto& prm : out.params_.items()) {
    const auto src = prm.value.data();
    prm.value = Tensor::from_data(prm.value.shape(), std::vector<double>(src.begin(), src.end()),
                                  prm.value.requires_grad());
  }
  return out;
}

int PlannerModel::last_forward_block_count() { return g_last_block_count; }

}  // namespace mdplan::model
