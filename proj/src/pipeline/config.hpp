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

#ifndef MDPLAN_PIPELINE_CONFIG_HPP_
#define MDPLAN_PIPELINE_CONFIG_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "codec/token_codec.hpp"
#include "diffusion/masked_diffusion.hpp"
#include "model/planner_model.hpp"
#include "rl/rl.hpp"
#include "sim/scene.hpp"
#include "tensor/optimizer.hpp"

namespace mdplan::pipeline {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SftConfig {
  int epochs = 60;
  int batch = 8;
  double lr = 1e-3;
  double lr_min = 5e-5;       // floor of the cosine decay
  int warmup_steps = 50;      // linear warmup, in optimizer steps
  double mask_t_min = 0.05;   // mask probability t is drawn from U(mask_t_min, 1]
  double refine_corruption_rate = 0.15;
  double refine_model_fraction = 0.3;  // share of refiner inputs sampled from the generator
  int refine_model_steps = 4;          // sampling steps for those inputs
  int refine_model_warmup = 10;        // epochs before generator samples are mixed in
  int checkpoint_every = 10;           // epochs; 0 keeps only the final checkpoint
};

struct EvalConfig {
  bool refine = true;
  int samples_per_scene = 1;
  double temperature = 0.0;           // first sample; 0 selects argmax decoding
  double best_of_temperature = 1.0;   // additional samples when samples_per_scene > 1
};

struct RunConfig {
  std::uint64_t seed = 0;
  codec::CodecConfig codec;
  model::ModelConfig model;
  sim::SimConfig sim;
  diffusion::ScheduleKind schedule = diffusion::ScheduleKind::kCosine;
  int steps = 12;
  int tau = 4;
  SftConfig sft;
  rl::RftConfig rft;
  int rft_epochs = 1;
  int rft_batch = 1;  // scenes per rft step
  tensor::OptimizerHyper optimizer;
  EvalConfig eval;

  RunConfig();

  /// Pushes shared fields (horizon, vocabulary layout, raster size, schedule)
  /// into the per-module configs and validates everything.
  void finalize();

  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  static const std::vector<std::string>& keys();
  static std::string describe(const std::string& key);

  /// `key = value` lines in key order.
  std::string serialize() const;
  static RunConfig parse(const std::string& text, const std::string& source = "<config>");
  static RunConfig load(const std::string& path);
  void save(const std::string& path) const;

  /// FNV-1a over the serialized form, as 16 hex digits.
  std::string hash() const;
};

std::uint64_t fnv1a(const std::string& bytes);

/// Default directory for outputs: $MDPLAN_OUT_DIR, else "mdplan_out".
std::string default_out_dir();

}  // namespace mdplan::pipeline

#endif  // MDPLAN_PIPELINE_CONFIG_HPP_
