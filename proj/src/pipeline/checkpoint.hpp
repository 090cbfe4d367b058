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

#ifndef MDPLAN_PIPELINE_CHECKPOINT_HPP_
#define MDPLAN_PIPELINE_CHECKPOINT_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

#include "model/planner_model.hpp"
#include "pipeline/config.hpp"

namespace mdplan::pipeline {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Progress {
  std::string stage = "init";  // init, sft or rft
  int epoch = 0;               // completed epochs of `stage`
  std::int64_t step = 0;       // completed optimizer steps of `stage`
  double best_reward = -1.0;   // rft only
};

struct Checkpoint {
  RunConfig config;
  model::PlannerModel model;
  Progress progress;
};

/// Layout: 8-byte magic, u32 version, u64 header length, JSON header, then
/// little-endian doubles (values, then AdamW moments where present).
void save_checkpoint(const std::string& path, const RunConfig& config, const model::PlannerModel& model,
                     const Progress& progress);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mdplan::pipeline

#endif  // MDPLAN_PIPELINE_CHECKPOINT_HPP_
