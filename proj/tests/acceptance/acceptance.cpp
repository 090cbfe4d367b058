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

// Acceptance checks 1-12. Prints one PASS/FAIL line per criterion and exits
// nonzero when any selected criterion fails.
//
//   acceptance [--only N] [--work DIR] [--prepare]
//
// --prepare trains the shared desk model into DIR and exits. Criteria that
// need it load it from DIR, training it first when absent.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "common/grad_graphs.hpp"
#include "common/oracles.hpp"
#include "pipeline/checkpoint.hpp"
#include "pipeline/config.hpp"
#include "pipeline/dataset.hpp"
#include "pipeline/evaluate.hpp"
#include "pipeline/training.hpp"
#include "rl/rl.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mdplan;
using Clock = std::chrono::steady_clock;
using pipeline::Example;
using pipeline::RunConfig;
using tensor::ParamLabel;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0, double e = 0, double g = 0) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d, e, g);
  return buf;
}

void progress(const std::string& line) { std::cerr << "  .. " << line << std::endl; }

fs::path g_work = "acceptance_work";

// ---- Shared data and models ----

RunConfig desk_config() {
  RunConfig c;
  c.set("seed", "1");
  c.set("sft_epochs", "200");
  c.finalize();
  return c;
}

std::vector<Example> make_examples(int count, sim::Difficulty d, std::uint64_t base, pipeline::Split split,
                                   const RunConfig& cfg) {
  return pipeline::build_examples(pipeline::generate_scenes(count, d, base, split, cfg.sim), cfg);
}

// 32 easy training scenes for the supervised stage.
const std::vector<Example>& sft_scenes() {
  static const auto ex = make_examples(32, sim::Difficulty::kEasy, 1, pipeline::Split::kTrain, desk_config());
  return ex;
}

// 64 easy training scenes for the reinforcement stage.
const std::vector<Example>& rft_scenes() {
  static const auto ex = make_examples(64, sim::Difficulty::kEasy, 3, pipeline::Split::kTrain, desk_config());
  return ex;
}

// 64 easy holdout scenes.
const std::vector<Example>& holdout_scenes() {
  static const auto ex = make_examples(64, sim::Difficulty::kEasy, 1, pipeline::Split::kHoldout, desk_config());
  return ex;
}

struct Trained {
  model::PlannerModel model;
  pipeline::Progress progress;
  double seconds = 0.0;
  int epochs = 0;
};

fs::path model_path(const std::string& name, const RunConfig& cfg) {
  return g_work / (name + "_" + cfg.hash() + ".ckpt");
}

Trained train(const std::string& name, const RunConfig& cfg) {
  fs::create_directories(g_work);
  model::PlannerModel m(cfg.model);
  pipeline::Progress prog;
  pipeline::SftOptions opt;
  opt.on_epoch = [&](const pipeline::SftEpoch& e) {
    if (e.epoch % 10 == 0) progress(name + fmt(" epoch %.0f gen_loss %.3f", e.epoch, e.gen_loss));
  };
  const auto t0 = Clock::now();
  pipeline::run_sft(cfg, m, prog, sft_scenes(), opt);
  const double secs = seconds_since(t0);
  const fs::path path = model_path(name, cfg);
  pipeline::save_checkpoint(path.string(), cfg, m, prog);
  std::ofstream(path.string() + ".seconds") << fmt("%.3f\n", secs);
  return {std::move(m), prog, secs, prog.epoch};
}

Trained load_or_train(const std::string& name, const RunConfig& cfg) {
  const fs::path path = model_path(name, cfg);
  if (fs::exists(path) && fs::exists(path.string() + ".seconds")) {
    auto ck = pipeline::load_checkpoint(path.string());
    double secs = 0.0;
    std::ifstream(path.string() + ".seconds") >> secs;
    return {std::move(ck.model), ck.progress, secs, ck.progress.epoch};
  }
  progress("training " + name + " into " + path.string());
  return train(name, cfg);
}

const Trained& desk_model() {
  static const Trained t = load_or_train("desk_sft", desk_config());
  return t;
}

// ---- 1. Gradient fidelity ----

Outcome criterion1() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::uint64_t worst_seed = 0;
  const int graphs = 100;
  for (int i = 0; i < graphs; ++i) {
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(i);
    auto g = testing::make_random_graph(seed);
    const double err = testing::grad_check(g);
    if (err > worst) worst = err, worst_seed = seed;
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs < 60.0,
          fmt("%.0f graphs, worst relative error %.3g (seed %.0f), %.2f s", graphs, worst,
              static_cast<double>(worst_seed), secs)};
}

// ---- 2. Expert decoupling ----

using Values = std::map<std::string, std::vector<double>>;

Values snapshot(const model::PlannerModel& m) {
  Values v;
  for (const auto& p : m.params().items()) v[p.id].assign(p.value.data().begin(), p.value.data().end());
  return v;
}

int changed(const model::PlannerModel& m, const Values& before, ParamLabel label) {
  int n = 0;
  for (const auto& p : m.params().items()) {
    if (p.label != label) continue;
    const auto& old = before.at(p.id);
    n += !std::equal(old.begin(), old.end(), p.value.data().begin());
  }
  return n;
}

bool any_grad(const model::PlannerModel& m, std::set<ParamLabel> labels) {
  for (const auto& p : m.params().items()) {
    if (labels.count(p.label) && p.value.has_grad()) return true;
  }
  return false;
}

Outcome criterion2() {
  const RunConfig cfg = desk_config();
  model::PlannerModel m = desk_model().model.clone();
  const model::PlannerModel ref = m.clone();
  const std::set<ParamLabel> gen_side = {ParamLabel::kShared, ParamLabel::kGenerationExpert};
  int grpo_steps = 0, hybrid_steps = 0, leaks = 0, inert = 0;
  for (std::size_t s = 0; s < 8; ++s) {
    const Example& ex = rft_scenes()[s];
    rl::Rng rng(17 + s);
    const auto group = rl::rollout_group(m, ex.context, ex.scene, cfg.rft, cfg.codec, cfg.sim, rng);

    Values before = snapshot(m);
    rl::grpo_backward(m, ref, ex.context, group, cfg.rft);
    leaks += any_grad(m, {ParamLabel::kRefinementExpert});
    if (any_grad(m, gen_side)) {
      tensor::optimizer_step(m.params(), gen_side, 1e-3, cfg.optimizer);
      leaks += changed(m, before, ParamLabel::kRefinementExpert);
      inert += changed(m, before, ParamLabel::kGenerationExpert) == 0;
      ++grpo_steps;
    }
    m.params().clear_grads();

    before = snapshot(m);
    const auto snap = rl::refiner_snapshot(m, ex.context, group);
    auto off = rl::offline_advantages(group.rewards);
    off.group_id = group.id;
    const auto on =
        rl::online_refine(m, ex.scene, group, snap, cfg.rft.online_samples, 1.0, cfg.codec, cfg.sim, rng);
    rl::hybrid_backward(m, ex.context, group, snap, &off, &on, cfg.rft);
    leaks += any_grad(m, gen_side);
    if (any_grad(m, {ParamLabel::kRefinementExpert})) {
      tensor::optimizer_step(m.params(), {ParamLabel::kRefinementExpert}, 1e-3, cfg.optimizer);
      leaks += changed(m, before, ParamLabel::kShared) + changed(m, before, ParamLabel::kGenerationExpert);
      inert += changed(m, before, ParamLabel::kRefinementExpert) == 0;
      ++hybrid_steps;
    }
    m.params().clear_grads();
  }
  return {leaks == 0 && inert == 0 && grpo_steps >= 3 && hybrid_steps >= 3,
          fmt("%.0f grpo steps and %.0f hybrid steps on desk-model rollouts, %.0f cross-expert changes, "
              "%.0f steps that moved nothing",
              grpo_steps, hybrid_steps, leaks, inert)};
}

// ---- 3. Codec ----

// Bin whose half-open interval holds v, by linear scan. Edges are compared
// as b * span <= (v - lo) * n so that edges like x = 0 are exact.
int scan_bin(double v, codec::Axis axis, const codec::CodecConfig& c) {
  const int n = c.bins(axis);
  const long double lo = c.min(axis), span = static_cast<long double>(c.max(axis)) - lo;
  const long double pos = (static_cast<long double>(v) - lo) * n;
  if (v >= c.max(axis)) return n - 1;
  for (int b = 0; b < n; ++b) {
    if (b * span <= pos && pos < (b + 1) * span) return b;
  }
  return 0;
}

Outcome criterion3() {
  const codec::CodecConfig c;
  const double rs = c.resolution(codec::Axis::kSpatial), rh = c.resolution(codec::Axis::kHeading);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xy(c.spatial_min, c.spatial_max), hd(c.heading_min, c.heading_max);
  double worst_s = 0.0, worst_h = 0.0;
  int scan_mismatch = 0;
  const int trajectories = 10000;
  for (int n = 0; n < trajectories; ++n) {
    codec::Trajectory t;
    for (int k = 0; k < c.waypoints; ++k) t.waypoints.push_back({xy(rng), xy(rng), hd(rng)});
    const auto back = codec::decode_trajectory(codec::encode_trajectory(t, c), c);
    for (int k = 0; k < c.waypoints; ++k) {
      const auto& a = t.waypoints[static_cast<std::size_t>(k)];
      const auto& b = back.waypoints[static_cast<std::size_t>(k)];
      worst_s = std::max({worst_s, std::abs(a.x - b.x), std::abs(a.y - b.y)});
      worst_h = std::max(worst_h, std::abs(a.heading - b.heading));
    }
    if (n < 500) {
      scan_mismatch += codec::encode_coord(t.waypoints[0].x, codec::Axis::kSpatial, c) !=
                       scan_bin(t.waypoints[0].x, codec::Axis::kSpatial, c);
      scan_mismatch += codec::encode_coord(t.waypoints[0].heading, codec::Axis::kHeading, c) !=
                       scan_bin(t.waypoints[0].heading, codec::Axis::kHeading, c);
    }
  }
  const int x0 = codec::encode_coord(0.0, codec::Axis::kSpatial, c);
  const int h0 = codec::encode_coord(0.0, codec::Axis::kHeading, c);
  const bool anchors = x0 == 2000 && h0 == 900 && scan_bin(0.0, codec::Axis::kSpatial, c) == 2000 &&
                       scan_bin(0.0, codec::Axis::kHeading, c) == 900;
  // Rounding slack of 1e-9 on a bound of 0.025 m / 0.05 deg.
  const bool within = worst_s <= rs / 2 + 1e-9 && worst_h <= rh / 2 + 1e-9;
  return {within && anchors && scan_mismatch == 0,
          fmt("%.0f trajectories, worst error %.6f m (bound %.6f) and %.6f deg (bound %.6f); ", trajectories,
              worst_s, rs / 2, worst_h, rh / 2) +
              fmt("x=0 -> bin %.0f, heading 0 -> bin %.0f, %.0f scan mismatches", x0, h0, scan_mismatch)};
}

// ---- 4. Masked objective vs enumeration ----

Outcome criterion4() {
  const int n = 100000;
  bool pass = true;
  std::string detail;
  struct Case {
    std::vector<codec::TokenId> r0;
    double phase;
    double t;  // < 0: integrated with t_min = |t|
  };
  const std::vector<Case> cases = {{{0, 3, 2}, 0.4, 0.5}, {{2, 2, 0}, 1.7, 0.2}, {{0, 3, 2}, 0.4, -0.05}};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const testing::MaskedToy toy{cases[i].r0, cases[i].phase};
    const bool integrated = cases[i].t < 0;
    const double exact = integrated ? toy.exact_integrated(-cases[i].t) : toy.exact(cases[i].t);
    const auto mc = toy.monte_carlo(n, 40 + i, -cases[i].t);
    const double rel = std::abs(mc.mean - exact) / exact;
    pass = pass && rel <= 0.01;
    detail += fmt(integrated ? "t~U(%.2f,1]: " : "t=%.2f: ", std::abs(cases[i].t)) +
              fmt("mc %.5f exact %.5f rel %.4f; ", mc.mean, exact, rel);
  }
  return {pass, fmt("%.0f corruptions each; ", n) + detail};
}

// ---- 5. Advantage algebra ----

Outcome criterion5() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_sum = 0.0, worst_anti = 0.0, worst_mean = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> r(2 + trial % 15);
    for (double& x : r) x = u(rng);
    const auto a = rl::grpo_advantages(r);
    worst_sum = std::max(worst_sum, std::abs(std::accumulate(a.begin(), a.end(), 0.0)));
    const auto m = rl::offline_advantages(r);
    double total = 0.0;
    for (int i = 0; i < m.g; ++i) {
      for (int j = 0; j < m.g; ++j) {
        worst_anti = std::max(worst_anti, std::abs(m.at(i, j) + m.at(j, i)));
        total += m.at(i, j);
      }
    }
    worst_mean = std::max(worst_mean, std::abs(total / (m.g * m.g)));
  }
  const auto lp = tensor::Tensor::from_data({1}, {std::log(0.8)});
  const std::vector<double> old = {std::log(0.5)}, adv = {1.0};
  const double clip = rl::clipped_surrogate(lp, old, adv, 0.2).item();

  const testing::HybridToy toy;
  auto off = rl::offline_advantages(toy.rewards);
  const auto on = toy.online();
  auto logp = toy.logp();
  const double hybrid =
      -rl::hybrid_objective(logp, toy.old_logp(), toy.members, &off, &on, false, 0.2, nullptr).item();

  const bool pass = worst_sum <= 1e-12 && worst_anti <= 1e-12 && worst_mean <= 1e-12 &&
                    std::abs(clip - 1.2) <= 1e-12 && std::abs(hybrid - testing::HybridToy::kObjective) <= 1e-12;
  return {pass, fmt("500 groups: |sum grpo| <= %.2g, |A_ij + A_ji| <= %.2g, |mean| <= %.2g; ", worst_sum,
                    worst_anti, worst_mean) +
                    fmt("clip case %.15f (1.2); hybrid toy %.15f (%.4f)", clip, hybrid,
                        testing::HybridToy::kObjective)};
}

// ---- 6. Sampler structure ----

Outcome criterion6() {
  RunConfig base;
  for (const auto& [k, v] : std::vector<std::pair<std::string, std::string>>{
           {"spatial_bins", "40"}, {"heading_bins", "18"}, {"d_model", "16"}, {"n_heads", "2"},
           {"n_shared_blocks", "1"}, {"n_expert_blocks", "1"}, {"mlp_ratio", "2"}, {"raster_size", "16"},
           {"raster_resolution", "2"}, {"patch_size", "8"}}) {
    base.set(k, v);
  }
  base.finalize();
  const sim::Scene scene = sim::generate_scene(6, sim::Difficulty::kMedium, base.sim);
  const auto raster = sim::rasterize(scene, base.sim);

  int configs = 0, violations = 0;
  double worst_lp = 0.0;
  std::string first_violation;
  auto fail = [&](const std::string& what) {
    if (violations++ == 0) first_violation = what;
  };
  for (int len : {3, 12, 24}) {
    model::ModelConfig mc = base.model;
    mc.response_len = len;
    const model::PlannerModel model(mc);
    const auto ctx = model::make_context(raster, mc);
    for (int s = 1; s <= 24; ++s) {
      for (int tau = 1; tau <= std::min(s, 4); ++tau) {
        for (double temp : {1.0, 0.0}) {
          ++configs;
          const std::string tag = fmt("L=%.0f s=%.0f tau=%.0f T=%.0f", len, s, tau, temp);
          diffusion::SampleOptions opt;
          opt.schedule = diffusion::Schedule::make(diffusion::ScheduleKind::kCosine, s, len);
          opt.tau = tau;
          opt.temperature = temp;
          opt.record_logprobs = true;
          diffusion::Rng rng(static_cast<std::uint64_t>(len * 1000 + s * 10 + tau));
          const auto res = diffusion::sample(model, ctx, opt, rng);
          const auto& counts = opt.schedule.counts;
          if (std::accumulate(counts.begin(), counts.end(), 0) != len) fail(tag + ": counts do not sum to L");

          // Snapshot steps: every tau-th step while whole windows remain, then the last.
          std::vector<int> snap_steps = {0};
          for (int k = 1; k < s / tau; ++k) snap_steps.push_back(k * tau);
          snap_steps.push_back(s);
          const auto& snaps = res.path.snapshots;
          if (snaps.size() != snap_steps.size() || res.path.transitions.size() + 1 != snap_steps.size()) {
            fail(tag + ": wrong snapshot count");
            continue;
          }
          int remaining = len;
          int done_steps = 0;
          std::set<std::size_t> covered;
          for (std::size_t j = 0; j < snaps.size(); ++j) {
            while (done_steps < snap_steps[j]) remaining -= counts[static_cast<std::size_t>(done_steps++)];
            const int masks = static_cast<int>(std::count(snaps[j].begin(), snaps[j].end(), codec::special::kMask));
            if (masks != remaining) {
              fail(tag + fmt(": snapshot %.0f holds %.0f masks, schedule leaves %.0f", static_cast<double>(j), masks, remaining));
            }
            if (j == 0) continue;
            const auto& prev = snaps[j - 1];
            const auto& cur = snaps[j];
            std::vector<std::size_t> eligible;
            for (std::size_t i = 0; i < cur.size(); ++i) {
              if (prev[i] != codec::special::kMask && cur[i] != prev[i]) fail(tag + ": decoded token revised");
              if (prev[i] == codec::special::kMask && cur[i] != codec::special::kMask) eligible.push_back(i);
            }
            const auto& rec = res.path.transitions[j - 1];
            if (rec.positions != eligible) fail(tag + ": eligibility set differs");
            // Log-probabilities recomputed from the window-start state.
            const auto logits = model.forward(ctx, prev, model::ExpertId::kGeneration);
            const std::size_t v = logits.cols();
            for (std::size_t q = 0; q < rec.positions.size() && q < eligible.size(); ++q) {
              const std::size_t i = rec.positions[q];
              if (rec.tokens[q] != cur[i]) fail(tag + ": recorded token differs");
              const auto row = logits.data().subspan(i * v, v);
              const double mx = *std::max_element(row.begin(), row.end());
              double z = 0.0;
              for (double x : row) z += std::exp(x - mx);
              const double lp = row[static_cast<std::size_t>(cur[i])] - mx - std::log(z);
              worst_lp = std::max(worst_lp, std::abs(lp - rec.logprobs[q]));
              covered.insert(i);
            }
          }
          if (static_cast<int>(covered.size()) != len) fail(tag + ": transitions do not cover every position");
          if (std::count(res.tokens.begin(), res.tokens.end(), codec::special::kMask) != 0) {
            fail(tag + ": masks left after step s");
          }
        }
      }
    }
  }
  if (worst_lp > 1e-10) fail(fmt("log-probability mismatch %.3g", worst_lp));
  return {violations == 0, fmt("%.0f (L, s, tau, temperature) settings, %.0f violations, worst log-prob gap %.2g",
                               configs, violations, worst_lp) +
                               (violations ? "; first: " + first_violation : "")};
}

// ---- 7. Supervised convergence ----

Outcome criterion7() {
  const RunConfig cfg = desk_config();
  const Trained& t = desk_model();
  const auto rep = pipeline::evaluate(t.model, sft_scenes(), cfg);
  double expert = 0.0;
  for (const auto& ex : sft_scenes()) expert += ex.expert_reward;
  expert /= static_cast<double>(sft_scenes().size());
  const bool pass = rep.pdms >= expert - 0.05 && t.epochs <= 200 && t.seconds <= 900.0;
  return {pass, fmt("d_model %.0f, %.0f+%.0f blocks, %.0f scenes, %.0f epochs in %.1f s: ", cfg.model.d_model,
                    cfg.model.n_shared_blocks, cfg.model.n_expert_blocks,
                    static_cast<double>(sft_scenes().size()), t.epochs, t.seconds) +
                    fmt("score %.4f vs expert %.4f (threshold %.4f)", rep.pdms, expert, expert - 0.05)};
}

// ---- 8. Reinforcement direction of effect ----

// Reinforcement settings shared by every arm of the comparison.
RunConfig rft_config(std::uint64_t seed, bool offline, bool online) {
  RunConfig c = desk_config();
  c.set("seed", std::to_string(seed));
  c.set("rft_epochs", "1");
  c.set("lr_generation", "1e-4");
  c.set("lr_refinement", "1e-4");
  c.set("rollout_temperature", "0.5");
  c.set("use_grpo", "true");
  c.set("use_offline", offline ? "true" : "false");
  c.set("use_online", online ? "true" : "false");
  c.finalize();
  return c;
}

Outcome criterion8() {
  const auto t0 = Clock::now();
  const Trained& sft = desk_model();
  const RunConfig eval_cfg = desk_config();
  const double base = pipeline::evaluate(sft.model, holdout_scenes(), eval_cfg).pdms;
  const char* names[] = {"grpo", "grpo+offline", "grpo+offline+online"};
  double mean[3] = {0, 0, 0};
  std::string per_seed;
  for (std::uint64_t seed : {1, 2, 3}) {
    for (int arm = 0; arm < 3; ++arm) {
      const RunConfig cfg = rft_config(seed, arm >= 1, arm >= 2);
      model::PlannerModel m = sft.model.clone();
      pipeline::Progress prog = sft.progress;
      pipeline::RftOptions opt;
      pipeline::run_rft(cfg, m, prog, rft_scenes(), opt);
      const double score = pipeline::evaluate(m, holdout_scenes(), eval_cfg).pdms;
      mean[arm] += score / 3.0;
      progress(std::string(names[arm]) + fmt(" seed %.0f: %.4f (%.0f s elapsed)", static_cast<double>(seed), score,
                                              seconds_since(t0)));
      per_seed += fmt(arm == 0 ? " [%.4f" : arm == 1 ? " %.4f" : " %.4f]", score);
    }
  }
  const double secs = seconds_since(t0);
  const bool order = mean[0] - base >= 0.01 && mean[1] - mean[0] >= 0.01 && mean[2] - mean[1] >= 0.0;
  return {order && secs <= 7200.0,
          fmt("holdout means: sft %.4f, grpo %.4f, +offline %.4f, +online %.4f; ", base, mean[0], mean[1], mean[2]) +
              fmt("gaps %+.4f %+.4f %+.4f (need >= .01, .01, 0); %.0f s; per seed", mean[0] - base,
                  mean[1] - mean[0], mean[2] - mean[1], secs) +
              per_seed};
}

// ---- 9. Refinement repair ----

Outcome criterion9() {
  const RunConfig cfg = desk_config();
  const Trained& t = desk_model();
  const auto scenes = pipeline::generate_scenes(200, sim::Difficulty::kEasy, 9, pipeline::Split::kHoldout, cfg.sim);
  std::mt19937_64 rng(9);
  double sum_corrupt = 0.0, sum_refined = 0.0;
  int failing = 0, restored = 0;
  for (const auto& scene : scenes) {
    const auto clean = codec::encode_trajectory(sim::expert_plan(scene, cfg.sim), cfg.codec);
    auto bad = clean;
    const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, bad.size() - 1)(rng);
    std::uniform_int_distribution<int> pick(0, cfg.codec.slot_size(pos) - 1);
    do {
      bad[pos] = cfg.codec.slot_first_id(pos) + pick(rng);
    } while (bad[pos] == clean[pos]);
    const auto ctx = model::make_context(sim::rasterize(scene, cfg.sim), cfg.model);
    diffusion::Rng unused(0);
    const auto fixed = diffusion::refine(t.model, ctx, bad, diffusion::RefineMode::kArgmax, 0.0, unused);
    const double rc = rl::token_reward(scene, bad, cfg.codec, cfg.sim);
    const double rr = rl::token_reward(scene, fixed, cfg.codec, cfg.sim);
    sum_corrupt += rc;
    sum_refined += rr;
    if (rc == 0.0) {
      ++failing;
      restored += rr > 0.0;
    }
  }
  const double n = static_cast<double>(scenes.size());
  const double rate = failing ? static_cast<double>(restored) / failing : 0.0;
  return {sum_refined / n > sum_corrupt / n && failing > 0 && rate >= 0.6,
          fmt("%.0f sequences: corrupted mean %.4f, refined mean %.4f; %.0f failing, %.0f restored ", n,
              sum_corrupt / n, sum_refined / n, failing, restored) +
              fmt("(%.1f%%, need 60%%)", 100.0 * rate)};
}

// ---- 10. Refinement block count ----

Outcome criterion10() {
  RunConfig with = desk_config(), without = desk_config();
  with.set("n_shared_blocks", "7");
  with.set("n_expert_blocks", "1");
  without.set("n_shared_blocks", "8");
  without.set("n_expert_blocks", "0");
  with.finalize();
  without.finalize();
  const Trained a = load_or_train("n1", with);
  const Trained b = load_or_train("n0", without);
  const double s1 = pipeline::evaluate(a.model, holdout_scenes(), with).pdms;
  const double s0 = pipeline::evaluate(b.model, holdout_scenes(), without).pdms;
  return {s1 >= s0, fmt("8 blocks deep, same seeds: n=1 scores %.4f, n=0 scores %.4f on %.0f holdout scenes", s1, s0,
                        static_cast<double>(holdout_scenes().size()))};
}

// ---- 11. Steps trade-off ----

Outcome criterion11() {
  const Trained& t = desk_model();
  std::map<int, pipeline::EvalReport> rep;
  for (int s : {2, 4, 8, 12}) {
    RunConfig cfg = desk_config();
    cfg.steps = s;
    cfg.tau = std::min(cfg.tau, s);
    cfg.finalize();
    rep[s] = pipeline::evaluate(t.model, holdout_scenes(), cfg);
  }
  const bool monotone = rep[2].median_latency_ms < rep[4].median_latency_ms &&
                        rep[4].median_latency_ms < rep[8].median_latency_ms &&
                        rep[8].median_latency_ms < rep[12].median_latency_ms;
  const double gap = std::abs(rep[4].pdms - rep[12].pdms);
  std::string detail = "steps:score/latency";
  for (const auto& [s, r] : rep) detail += fmt(" %.0f:%.4f/%.1fms", s, r.pdms, r.median_latency_ms);
  return {monotone && gap <= 0.05, detail + fmt("; |score(4) - score(12)| = %.4f", gap)};
}

// ---- 12. Determinism ----

Outcome criterion12() {
  const Trained& t = desk_model();
  RunConfig cfg = desk_config();
  cfg.set("samples_per_scene", "3");
  cfg.finalize();
  const std::vector<Example> scenes(holdout_scenes().begin(), holdout_scenes().begin() + 16);
  fs::create_directories(g_work);
  const std::string a = (g_work / "det_a").string(), b = (g_work / "det_b").string();
  pipeline::write_report(pipeline::evaluate(t.model, scenes, cfg), a);
  pipeline::write_report(pipeline::evaluate(t.model, scenes, cfg), b);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string ja = slurp(a + ".json"), jb = slurp(b + ".json");
  const std::string ca = slurp(a + ".csv"), cb = slurp(b + ".csv");
  return {!ja.empty() && ja == jb && !ca.empty() && ca == cb,
          fmt("two runs over %.0f scenes with best-of-3 sampling: json %.0f bytes, csv %.0f bytes, ",
              static_cast<double>(scenes.size()), static_cast<double>(ja.size()), static_cast<double>(ca.size())) +
              (ja == jb && ca == cb ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  bool prepare = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = std::stoi(argv[++i]);
    } else if (a == "--work" && i + 1 < argc) {
      g_work = argv[++i];
    } else if (a == "--prepare") {
      prepare = true;
    } else {
      std::cerr << "usage: acceptance [--only N] [--work DIR] [--prepare]\n";
      return 2;
    }
  }
  if (prepare) {
    const Trained t = train("desk_sft", desk_config());
    std::cout << "desk model: " << t.epochs << " epochs in " << fmt("%.1f", t.seconds) << " s\n";
    return 0;
  }
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3,  criterion4,
                                                          criterion5, criterion6, criterion7,  criterion8,
                                                          criterion9, criterion10, criterion11, criterion12};
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  int failed = 0;
  for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) {
    if (only != 0 && n != only) continue;
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << n << " " << (o.pass ? "PASS" : "FAIL") << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
