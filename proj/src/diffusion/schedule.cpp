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
#include <numbers>
#include <string>

#include "diffusion/masked_diffusion.hpp"

namespace mdplan::diffusion {

std::string_view schedule_name(ScheduleKind kind) {
  return kind == ScheduleKind::kCosine ? "cosine" : "uniform";
}

ScheduleKind parse_schedule(std::string_view name) {
  if (name == "cosine") return ScheduleKind::kCosine;
  if (name == "uniform") return ScheduleKind::kUniform;
  throw DiffusionError("unknown schedule '" + std::string(name) + "' (expected cosine or uniform)");
}

namespace {

void check_args(int steps, int length) {
  if (steps < 1 || length < 1) {
    throw DiffusionError("schedule needs steps >= 1 and length >= 1 (got " + std::to_string(steps) + ", " +
                         std::to_string(length) + ")");
  }
}

// Turns remaining-mask targets m_0..m_s into counts, forcing monotonicity and
// pushing any leftover masks into the final step.
std::vector<int> counts_from_remaining(std::vector<int> m, int length) {
  m.front() = length;
  for (std::size_t t = 1; t < m.size(); ++t) m[t] = std::clamp(m[t], 0, m[t - 1]);
  m.back() = 0;
  std::vector<int> u(m.size() - 1);
  for (std::size_t t = 1; t < m.size(); ++t) u[t - 1] = m[t - 1] - m[t];
  return u;
}

}  // namespace

std::vector<int> cosine_counts(int steps, int length) {
  check_args(steps, length);
  std::vector<int> m(static_cast<std::size_t>(steps) + 1);
  for (int t = 0; t <= steps; ++t) {
    m[t] = static_cast<int>(std::lround(length * std::cos(0.5 * std::numbers::pi * t / steps)));
  }
  return counts_from_remaining(std::move(m), length);
}

std::vector<int> uniform_counts(int steps, int length) {
  check_args(steps, length);
  std::vector<int> m(static_cast<std::size_t>(steps) + 1);
  for (int t = 0; t <= steps; ++t) {
    m[t] = length - static_cast<int>((static_cast<long long>(length) * t) / steps);
  }
  return counts_from_remaining(std::move(m), length);
}

Schedule Schedule::make(ScheduleKind kind, int steps, int length) {
  Schedule s;
  s.kind = kind;
  s.steps = steps;
  s.counts = kind == ScheduleKind::kCosine ? cosine_counts(steps, length) : uniform_counts(steps, length);
  return s;
}

int snapshot_count(int steps, int tau) {
  if (tau < 1 || tau > steps) {
    throw DiffusionError("tau must lie in [1, steps] (got tau " + std::to_string(tau) + ", steps " +
                         std::to_string(steps) + ")");
  }
  return steps / tau;
}

}  // namespace mdplan::diffusion
