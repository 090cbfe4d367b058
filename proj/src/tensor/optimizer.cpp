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

#include "tensor/optimizer.hpp"

#include <cmath>

namespace mdplan::tensor {

std::string_view label_name(ParamLabel label) {
  switch (label) {
    case ParamLabel::kShared: return "shared";
    case ParamLabel::kGenerationExpert: return "generation";
    case ParamLabel::kRefinementExpert: return "refinement";
  }
  return "shared";
}

ParamLabel parse_label(std::string_view name) {
  if (name == "shared") return ParamLabel::kShared;
  if (name == "generation") return ParamLabel::kGenerationExpert;
  if (name == "refinement") return ParamLabel::kRefinementExpert;
  throw EngineError("unknown parameter label '" + std::string(name) + "'");
}

Tensor ParameterSet::add(std::string id, Tensor value, ParamLabel label) {
  if (index_.count(id)) throw EngineError("duplicate parameter id '" + id + "'");
  value.set_requires_grad(true);
  index_.emplace(id, params_.size());
  params_.push_back(Parameter{std::move(id), value, label, {}, {}, 0});
  return value;
}

Parameter& ParameterSet::get(const std::string& id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw EngineError("unknown parameter id '" + id + "'");
  return params_[it->second];
}

const Parameter& ParameterSet::get(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw EngineError("unknown parameter id '" + id + "'");
  return params_[it->second];
}

ParameterPartition ParameterSet::partition() const {
  ParameterPartition out;
  for (const auto& p : params_) out.emplace(p.id, p.label);
  return out;
}

void ParameterSet::relabel(const std::string& id, ParamLabel label) { get(id).label = label; }

void ParameterSet::clear_grads() {
  for (auto& p : params_) p.value.clear_grad();
}

std::size_t ParameterSet::scalar_count(ParamLabel label) const {
  std::size_t n = 0;
  for (const auto& p : params_) {
    if (p.label == label) n += p.value.numel();
  }
  return n;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.numel();
  return n;
}

void optimizer_step(ParameterSet& params, const std::set<ParamLabel>& active, double lr,
                    const OptimizerHyper& hyper) {
  std::vector<Parameter*> targets;
  for (auto& p : params.items()) {
    if (!active.count(p.label)) continue;
    if (!p.value.has_grad()) {
      throw EngineError("optimizer_step: active parameter '" + p.id + "' has no gradient");
    }
    targets.push_back(&p);
  }

  double clip = 1.0;
  if (hyper.max_grad_norm > 0.0) {
    double sq = 0.0;
    for (const auto* p : targets) {
      for (double g : p->value.grad()) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > hyper.max_grad_norm) clip = hyper.max_grad_norm / norm;
  }

  for (auto* p : targets) {
    auto w = p->value.mutable_data();
    const auto g = p->value.grad();
    if (hyper.kind == OptimizerHyper::Kind::kSgd) {
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * clip * g[i];
      continue;
    }
    if (p->m.empty()) {
      p->m.assign(w.size(), 0.0);
      p->v.assign(w.size(), 0.0);
    }
    p->step += 1;
    const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(p->step));
    const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(p->step));
    const bool decay = hyper.weight_decay > 0.0 && p->value.rank() == 2;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = clip * g[i];
      p->m[i] = hyper.beta1 * p->m[i] + (1.0 - hyper.beta1) * gi;
      p->v[i] = hyper.beta2 * p->v[i] + (1.0 - hyper.beta2) * gi * gi;
      const double mhat = p->m[i] / bc1;
      const double vhat = p->v[i] / bc2;
      if (decay) w[i] -= lr * hyper.weight_decay * w[i];
      w[i] -= lr * mhat / (std::sqrt(vhat) + hyper.eps);
    }
  }
  params.clear_grads();
}

}  // namespace mdplan::tensor
