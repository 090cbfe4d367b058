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

#include "pipeline/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "pipeline/training.hpp"

namespace mdplan::pipeline {

namespace {

sim::RewardBreakdown score_tokens(const sim::Scene& scene, const diffusion::Tokens& tokens, const RunConfig& cfg) {
  codec::Trajectory traj;
  if (!codec::try_decode_trajectory(tokens, cfg.codec, &traj)) {
    sim::RewardBreakdown r;
    r.malformed = true;
    return r;
  }
  return sim::score(scene, traj, cfg.sim);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

EvalReport evaluate(const model::PlannerModel& model, const std::vector<Example>& examples, const RunConfig& cfg) {
  EvalReport rep;
  rep.config_hash = cfg.hash();
  rep.seed = cfg.seed;
  rep.steps = cfg.steps;
  rep.refine = cfg.eval.refine && model.config().n_expert_blocks > 0;
  rep.samples_per_scene = cfg.eval.samples_per_scene;
  const int length = model.config().response_len;

  diffusion::SampleOptions opt;
  opt.schedule = diffusion::Schedule::make(cfg.schedule, cfg.steps, length);
  opt.tau = cfg.steps;

  std::vector<double> latencies;
  for (std::size_t q = 0; q < examples.size(); ++q) {
    const Example& ex = examples[q];
    diffusion::Rng rng(derive_seed(cfg.seed, 0xE7A1, q));
    SceneResult res;
    res.seed = ex.scene.seed;
    for (int k = 0; k < cfg.eval.samples_per_scene; ++k) {
      opt.temperature = k == 0 ? cfg.eval.temperature : cfg.eval.best_of_temperature;
      const auto t0 = std::chrono::steady_clock::now();
      diffusion::Tokens tokens = diffusion::sample(model, ex.context, opt, rng).tokens;
      if (rep.refine) {
        tokens = diffusion::refine(model, ex.context, tokens, diffusion::RefineMode::kArgmax, 0.0, rng);
      }
      const auto t1 = std::chrono::steady_clock::now();
      const sim::RewardBreakdown r = score_tokens(ex.scene, tokens, cfg);
      if (k == 0) {
        res.first = r;
        res.best_pdms = r.pdms;
        res.latency_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      } else {
        res.best_pdms = std::max(res.best_pdms, r.pdms);
      }
    }
    latencies.push_back(res.latency_ms);
    rep.scenes.push_back(res);
  }
  const double n = rep.scenes.empty() ? 1.0 : static_cast<double>(rep.scenes.size());
  for (const auto& s : rep.scenes) {
    rep.nc += s.first.nc / n;
    rep.dac += s.first.dac / n;
    rep.ttc += s.first.ttc / n;
    rep.comfort += s.first.comfort / n;
    rep.ep += s.first.ep / n;
    rep.pdms += s.first.pdms / n;
    rep.malformed_rate += (s.first.malformed ? 1.0 : 0.0) / n;
    rep.best_of_k_pdms += s.best_pdms / n;
  }
  if (!latencies.empty()) {
    std::sort(latencies.begin(), latencies.end());
    const std::size_t m = latencies.size();
    rep.median_latency_ms = m % 2 ? latencies[m / 2] : 0.5 * (latencies[m / 2 - 1] + latencies[m / 2]);
  }
  return rep;
}

std::string report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["steps"] = r.steps;
  j["refine"] = r.refine;
  j["samples_per_scene"] = r.samples_per_scene;
  j["scene_count"] = r.scenes.size();
  j["mean"] = {{"nc", r.nc}, {"dac", r.dac}, {"ttc", r.ttc}, {"comfort", r.comfort},
               {"ep", r.ep}, {"pdms", r.pdms}, {"malformed_rate", r.malformed_rate}};
  if (r.samples_per_scene > 1) j["best_of_k_pdms"] = r.best_of_k_pdms;
  return j.dump(2) + "\n";
}

std::string report_csv(const EvalReport& r) {
  std::string out = "scene_seed,nc,dac,ttc,comfort,ep,pdms,malformed,best_pdms\n";
  char buf[256];
  for (const auto& s : r.scenes) {
    std::snprintf(buf, sizeof(buf), "%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g\n",
                  static_cast<unsigned long long>(s.seed), s.first.nc, s.first.dac, s.first.ttc, s.first.comfort,
                  s.first.ep, s.first.pdms, s.first.malformed ? 1 : 0, s.best_pdms);
    out += buf;
  }
  return out;
}

std::string timing_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["config_hash"] = r.config_hash;
  j["steps"] = r.steps;
  j["refine"] = r.refine;
  j["median_latency_ms"] = r.median_latency_ms;
  std::vector<double> per_scene;
  for (const auto& s : r.scenes) per_scene.push_back(s.latency_ms);
  j["latency_ms"] = per_scene;
  return j.dump(2) + "\n";
}

void write_report(const EvalReport& report, const std::string& stem) {
  const std::filesystem::path p(stem);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  write_text(stem + ".json", report_json(report));
  write_text(stem + ".csv", report_csv(report));
  write_text(stem + ".timing.json", timing_json(report));
}

}  // namespace mdplan::pipeline
