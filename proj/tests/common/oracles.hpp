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

// Small instances with independently computed answers, shared by the unit
// and acceptance suites.

#ifndef MDPLAN_TESTS_COMMON_ORACLES_HPP_
#define MDPLAN_TESTS_COMMON_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "diffusion/masked_diffusion.hpp"
#include "rl/rl.hpp"
#include "tensor/tensor.hpp"

namespace mdplan::testing {

// ---- Masked-token objective on a 3-token, 4-symbol toy ----

/// A fixed "model": logits depend on the position, the symbol and which
/// positions of the input are masked.
struct MaskedToy {
  static constexpr int kLen = 3;
  static constexpr int kVocab = 4;
  std::vector<codec::TokenId> r0;  // ground truth, never the mask id
  double phase = 0.0;

  std::vector<double> logits(const std::vector<bool>& masked) const {
    int code = 0;
    for (int l = 0; l < kLen; ++l) code |= masked[static_cast<std::size_t>(l)] ? (1 << l) : 0;
    std::vector<double> out(kLen * kVocab);
    for (int l = 0; l < kLen; ++l) {
      for (int v = 0; v < kVocab; ++v) {
        out[static_cast<std::size_t>(l * kVocab + v)] = 2.0 * std::sin(phase + 1.3 * l + 0.7 * v + 0.5 * code);
      }
    }
    return out;
  }

  /// Loss for one mask pattern, by hand: (1/t) sum over masked l of
  /// -log softmax(logits_l)[r0_l].
  double pattern_loss(const std::vector<bool>& masked, double t) const {
    const auto z = logits(masked);
    double loss = 0.0;
    for (int l = 0; l < kLen; ++l) {
      if (!masked[static_cast<std::size_t>(l)]) continue;
      double mx = -1e300;
      for (int v = 0; v < kVocab; ++v) mx = std::max(mx, z[static_cast<std::size_t>(l * kVocab + v)]);
      double s = 0.0;
      for (int v = 0; v < kVocab; ++v) s += std::exp(z[static_cast<std::size_t>(l * kVocab + v)] - mx);
      loss += -(z[static_cast<std::size_t>(l * kVocab + r0[static_cast<std::size_t>(l)])] - mx - std::log(s));
    }
    return loss / t;
  }

  /// Exact expectation at fixed t over all 2^L mask patterns, conditioned on
  /// at least one masked position (the corruption redraws empty masks).
  double exact(double t) const {
    double num = 0.0, mass = 0.0;
    for (int code = 1; code < (1 << kLen); ++code) {
      std::vector<bool> masked(kLen);
      double p = 1.0;
      for (int l = 0; l < kLen; ++l) {
        masked[static_cast<std::size_t>(l)] = (code >> l) & 1;
        p *= masked[static_cast<std::size_t>(l)] ? t : 1.0 - t;
      }
      num += p * pattern_loss(masked, t);
      mass += p;
    }
    return num / mass;
  }

  /// Exact expectation with t ~ U(t_min, 1], by a fine midpoint rule.
  double exact_integrated(double t_min, int points = 20000) const {
    double acc = 0.0;
    const double h = (1.0 - t_min) / points;
    for (int i = 0; i < points; ++i) acc += exact(t_min + (i + 0.5) * h);
    return acc / points;
  }

  struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
  };

  /// Monte-Carlo average of the library objective over `n` corruptions.
  /// t_min < 0 keeps t fixed at |t_min|.
  Estimate monte_carlo(int n, std::uint64_t seed, double t_min) const {
    diffusion::Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = t_min < 0.0 ? -t_min : 1.0 - (1.0 - t_min) * unif(rng);
      const auto c = diffusion::corrupt(r0, t, rng);
      const auto z = tensor::Tensor::from_data({kLen, kVocab}, logits(c.masked));
      const double v = diffusion::sft_loss(z, r0, c.tokens, t).item();
      acc += v;
      acc2 += v * v;
    }
    const double mean = acc / n;
    return {mean, std::sqrt(std::max(0.0, acc2 / n - mean * mean) / n)};
  }
};

// ---- Hybrid refinement objective on a one-token, two-member toy ----

struct HybridToy {
  // Refiner probabilities over 3 symbols given each member as input, now
  // and at sampling time.
  std::vector<std::vector<double>> now = {{0.6, 0.3, 0.1}, {0.5, 0.25, 0.25}};
  std::vector<std::vector<double>> old = {{0.5, 0.4, 0.1}, {0.4, 0.4, 0.2}};
  std::vector<diffusion::Tokens> members = {{0}, {1}};
  std::vector<double> rewards = {1.0, 0.5};
  std::vector<diffusion::Tokens> refined = {{2}, {0}};
  std::vector<double> refined_rewards = {0.7, 0.9};

  // Worked by hand:
  //   offline (i=0, j=1): A = +0.5, ratio 0.5/0.4 = 1.25  ->  0.625
  //   offline (i=1, j=0): A = -0.5, ratio 0.3/0.4 = 0.75  -> -0.375
  //   offline sum 0.25 / (G^2 L = 4) = 0.0625
  //   online  (i=0): A = -0.3, ratio 0.1/0.1 = 1          -> -0.3
  //   online  (i=1): A = +0.4, ratio 0.5/0.4 = 1.25       ->  0.5
  //   online sum 0.2 / (G K L = 2) = 0.1
  static constexpr double kObjective = 0.1625;
  // With clipping at eps = 0.2 the terms become 0.6, -0.4, -0.3 and 0.48.
  static constexpr double kClippedObjective = 0.05 + 0.09;

  std::vector<tensor::Tensor> logp() const {
    std::vector<tensor::Tensor> out;
    for (const auto& row : now) {
      std::vector<double> lp;
      for (double p : row) lp.push_back(std::log(p));
      out.push_back(tensor::Tensor::from_data({1, lp.size()}, lp, true));
    }
    return out;
  }
  std::vector<std::vector<double>> old_logp() const {
    std::vector<std::vector<double>> out;
    for (const auto& row : old) {
      std::vector<double> lp;
      for (double p : row) lp.push_back(std::log(p));
      out.push_back(lp);
    }
    return out;
  }
  rl::OnlineAdvantage online() const {
    rl::OnlineAdvantage on;
    on.g = 2;
    on.k = 1;
    on.refined = refined;
    on.refined_rewards = refined_rewards;
    for (int i = 0; i < 2; ++i) on.values.push_back(refined_rewards[i] - rewards[i]);
    return on;
  }
};

}  // namespace mdplan::testing

#endif  // MDPLAN_TESTS_COMMON_ORACLES_HPP_
