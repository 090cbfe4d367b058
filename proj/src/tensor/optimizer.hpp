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

#ifndef MDPLAN_TENSOR_OPTIMIZER_HPP_
#define MDPLAN_TENSOR_OPTIMIZER_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tensor/tensor.hpp"

namespace mdplan::tensor {

enum class ParamLabel { kShared, kGenerationExpert, kRefinementExpert };

std::string_view label_name(ParamLabel label);
ParamLabel parse_label(std::string_view name);

/// Total, disjoint labeling of a model's parameters by id.
using ParameterPartition = std::map<std::string, ParamLabel>;

struct Parameter {
  std::string id;
  Tensor value;
  ParamLabel label = ParamLabel::kShared;
  // AdamW moments; sized lazily on the first update.
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
};

/// Ordered, id-addressable parameter registry.
class ParameterSet {
 public:
  Tensor add(std::string id, Tensor value, ParamLabel label);
  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  Parameter& get(const std::string& id);
  const Parameter& get(const std::string& id) const;

  std::vector<Parameter>& items() { return params_; }
  const std::vector<Parameter>& items() const { return params_; }
  std::size_t size() const { return params_.size(); }

  ParameterPartition partition() const;
  void relabel(const std::string& id, ParamLabel label);
  void clear_grads();
  /// Number of scalar values carried by parameters with the given label.
  std::size_t scalar_count(ParamLabel label) const;
  std::size_t scalar_count() const;

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct OptimizerHyper {
  enum class Kind { kAdamW, kSgd };
  Kind kind = Kind::kAdamW;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Decoupled decay, applied to matrices only.
  double weight_decay = 0.0;
  // Global-norm clipping over the active parameters; 0 disables it.
  double max_grad_norm = 0.0;
};

/// Updates every parameter whose label is in `active`, leaves every other
/// parameter bit-identical, then clears all gradients. Throws EngineError
/// if an active parameter has no accumulated gradient.
void optimizer_step(ParameterSet& params, const std::set<ParamLabel>& active, double lr,
                    const OptimizerHyper& hyper);

}  // namespace mdplan::tensor

#endif  // MDPLAN_TENSOR_OPTIMIZER_HPP_
