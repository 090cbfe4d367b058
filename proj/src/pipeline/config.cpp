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

#include "pipeline/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace mdplan::pipeline {

namespace {

struct Entry {
  std::string key;
  std::string help;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  return d;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean (true/false)");
}

template <typename Field>
Entry dbl(std::string key, std::string help, Field field) {
  return {key, std::move(help), [field](const RunConfig& c) { return fmt_double(field(const_cast<RunConfig&>(c))); },
          [field, key](RunConfig& c, const std::string& v) { field(c) = parse_double(key, v); }};
}

template <typename Field>
Entry integer(std::string key, std::string help, Field field) {
  return {key, std::move(help), [field](const RunConfig& c) { return std::to_string(field(const_cast<RunConfig&>(c))); },
          [field, key](RunConfig& c, const std::string& v) {
            using T = std::remove_reference_t<decltype(field(c))>;
            field(c) = parse_int<T>(key, v);
          }};
}

template <typename Field>
Entry boolean(std::string key, std::string help, Field field) {
  return {key, std::move(help),
          [field](const RunConfig& c) { return std::string(field(const_cast<RunConfig&>(c)) ? "true" : "false"); },
          [field, key](RunConfig& c, const std::string& v) { field(c) = parse_bool(key, v); }};
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    e.push_back(integer("seed", "master seed for every stochastic choice", [](RunConfig& c) -> auto& { return c.seed; }));
    // Tokenization.
    e.push_back(dbl("spatial_min", "lower bound of x/y bins, meters", [](RunConfig& c) -> auto& { return c.codec.spatial_min; }));
    e.push_back(dbl("spatial_max", "upper bound of x/y bins, meters", [](RunConfig& c) -> auto& { return c.codec.spatial_max; }));
    e.push_back(integer("spatial_bins", "number of x/y bins", [](RunConfig& c) -> auto& { return c.codec.spatial_bins; }));
    e.push_back(dbl("heading_min", "lower bound of heading bins, degrees", [](RunConfig& c) -> auto& { return c.codec.heading_min; }));
    e.push_back(dbl("heading_max", "upper bound of heading bins, degrees", [](RunConfig& c) -> auto& { return c.codec.heading_max; }));
    e.push_back(integer("heading_bins", "number of heading bins", [](RunConfig& c) -> auto& { return c.codec.heading_bins; }));
    e.push_back(integer("waypoints", "trajectory horizon H", [](RunConfig& c) -> auto& { return c.codec.waypoints; }));
    e.push_back(dbl("dt", "seconds between waypoints", [](RunConfig& c) -> auto& { return c.codec.dt; }));
    e.push_back(integer("base_vocab_size", "special tokens before the bin tokens", [](RunConfig& c) -> auto& { return c.codec.base_vocab_size; }));
    // Model.
    e.push_back(integer("d_model", "transformer width", [](RunConfig& c) -> auto& { return c.model.d_model; }));
    e.push_back(integer("n_heads", "attention heads", [](RunConfig& c) -> auto& { return c.model.n_heads; }));
    e.push_back(integer("n_shared_blocks", "blocks shared by both experts", [](RunConfig& c) -> auto& { return c.model.n_shared_blocks; }));
    e.push_back(integer("n_expert_blocks", "tail blocks per expert (n)", [](RunConfig& c) -> auto& { return c.model.n_expert_blocks; }));
    e.push_back(integer("mlp_ratio", "MLP hidden width over d_model", [](RunConfig& c) -> auto& { return c.model.mlp_ratio; }));
    e.push_back(integer("patch_size", "raster patch side, cells", [](RunConfig& c) -> auto& { return c.model.patch_size; }));
    e.push_back(boolean("strict_confinement", "detach trunk and head on the refinement path", [](RunConfig& c) -> auto& { return c.model.strict_confinement; }));
    e.push_back(boolean("sinusoidal_bin_init", "sinusoidal init of bin embeddings and head", [](RunConfig& c) -> auto& { return c.model.sinusoidal_bin_init; }));
    // Sampling.
    e.push_back({"schedule", "unmasking schedule: cosine or uniform",
                 [](const RunConfig& c) { return std::string(diffusion::schedule_name(c.schedule)); },
                 [](RunConfig& c, const std::string& v) {
                   try {
                     c.schedule = diffusion::parse_schedule(v);
                   } catch (const std::exception& ex) {
                     throw ConfigError(std::string("key 'schedule': ") + ex.what());
                   }
                 }});
    e.push_back(integer("steps", "denoising steps s", [](RunConfig& c) -> auto& { return c.steps; }));
    e.push_back(integer("tau", "snapshot stride for rollouts", [](RunConfig& c) -> auto& { return c.tau; }));
    // Simulator.
    e.push_back(dbl("ego_length", "ego box length, meters", [](RunConfig& c) -> auto& { return c.sim.ego_length; }));
    e.push_back(dbl("ego_width", "ego box width, meters", [](RunConfig& c) -> auto& { return c.sim.ego_width; }));
    e.push_back(dbl("dac_exit_tolerance", "corridor exit that zeroes DAC, meters", [](RunConfig& c) -> auto& { return c.sim.dac_exit_tolerance; }));
    e.push_back(dbl("ttc_threshold", "minimum time-to-collision, seconds", [](RunConfig& c) -> auto& { return c.sim.ttc_threshold; }));
    e.push_back(dbl("ttc_step", "time-to-collision probe step, seconds", [](RunConfig& c) -> auto& { return c.sim.ttc_step; }));
    e.push_back(dbl("max_accel", "comfort bound on |accel|, m/s^2", [](RunConfig& c) -> auto& { return c.sim.max_accel; }));
    e.push_back(dbl("max_yaw_rate", "comfort bound on |yaw rate|, rad/s", [](RunConfig& c) -> auto& { return c.sim.max_yaw_rate; }));
    e.push_back(dbl("w_ttc", "score weight of TTC", [](RunConfig& c) -> auto& { return c.sim.w_ttc; }));
    e.push_back(dbl("w_comfort", "score weight of comfort", [](RunConfig& c) -> auto& { return c.sim.w_comfort; }));
    e.push_back(dbl("w_ep", "score weight of progress", [](RunConfig& c) -> auto& { return c.sim.w_ep; }));
    e.push_back(integer("lattice_lateral", "expert lateral samples", [](RunConfig& c) -> auto& { return c.sim.lattice_lateral; }));
    e.push_back(integer("lattice_speeds", "expert speed profiles", [](RunConfig& c) -> auto& { return c.sim.lattice_speeds; }));
    e.push_back(dbl("w_lateral", "expert cost on lateral offset", [](RunConfig& c) -> auto& { return c.sim.w_lateral; }));
    e.push_back(dbl("w_jerk", "expert cost on lateral jerk", [](RunConfig& c) -> auto& { return c.sim.w_jerk; }));
    e.push_back(dbl("w_speed", "expert cost on acceleration", [](RunConfig& c) -> auto& { return c.sim.w_speed; }));
    e.push_back(integer("raster_size", "raster side, cells", [](RunConfig& c) -> auto& { return c.sim.raster_size; }));
    e.push_back(dbl("raster_resolution", "raster cell size, meters", [](RunConfig& c) -> auto& { return c.sim.raster_resolution; }));
    e.push_back(dbl("speed_norm", "ego speed that saturates the speed plane, m/s", [](RunConfig& c) -> auto& { return c.sim.speed_norm; }));
    // Supervised stage.
    e.push_back(integer("sft_epochs", "supervised epochs", [](RunConfig& c) -> auto& { return c.sft.epochs; }));
    e.push_back(integer("sft_batch", "examples per supervised step", [](RunConfig& c) -> auto& { return c.sft.batch; }));
    e.push_back(dbl("sft_lr", "peak supervised learning rate", [](RunConfig& c) -> auto& { return c.sft.lr; }));
    e.push_back(dbl("sft_lr_min", "final supervised learning rate", [](RunConfig& c) -> auto& { return c.sft.lr_min; }));
    e.push_back(integer("sft_warmup_steps", "linear warmup steps", [](RunConfig& c) -> auto& { return c.sft.warmup_steps; }));
    e.push_back(dbl("mask_t_min", "lower bound of the mask probability draw", [](RunConfig& c) -> auto& { return c.sft.mask_t_min; }));
    e.push_back(dbl("refine_corruption_rate", "token corruption rate for refiner inputs", [](RunConfig& c) -> auto& { return c.sft.refine_corruption_rate; }));
    e.push_back(dbl("refine_model_fraction", "share of refiner inputs sampled from the generator", [](RunConfig& c) -> auto& { return c.sft.refine_model_fraction; }));
    e.push_back(integer("refine_model_steps", "sampling steps for generated refiner inputs", [](RunConfig& c) -> auto& { return c.sft.refine_model_steps; }));
    e.push_back(integer("refine_model_warmup", "epochs before generated refiner inputs", [](RunConfig& c) -> auto& { return c.sft.refine_model_warmup; }));
    e.push_back(integer("checkpoint_every", "epochs between checkpoints (0: final only)", [](RunConfig& c) -> auto& { return c.sft.checkpoint_every; }));
    // Optimizer.
    e.push_back(dbl("adam_beta1", "AdamW beta1", [](RunConfig& c) -> auto& { return c.optimizer.beta1; }));
    e.push_back(dbl("adam_beta2", "AdamW beta2", [](RunConfig& c) -> auto& { return c.optimizer.beta2; }));
    e.push_back(dbl("adam_eps", "AdamW epsilon", [](RunConfig& c) -> auto& { return c.optimizer.eps; }));
    e.push_back(dbl("weight_decay", "decoupled weight decay on matrices", [](RunConfig& c) -> auto& { return c.optimizer.weight_decay; }));
    e.push_back(dbl("max_grad_norm", "global gradient norm clip (0: off)", [](RunConfig& c) -> auto& { return c.optimizer.max_grad_norm; }));
    // Reinforcement stage.
    e.push_back(integer("group_size", "rollouts per scene (G)", [](RunConfig& c) -> auto& { return c.rft.group_size; }));
    e.push_back(integer("online_samples", "refinements per rollout (K)", [](RunConfig& c) -> auto& { return c.rft.online_samples; }));
    e.push_back(integer("rft_epochs", "passes over the training scenes", [](RunConfig& c) -> auto& { return c.rft_epochs; }));
    e.push_back(integer("rft_batch", "scenes per rft step", [](RunConfig& c) -> auto& { return c.rft_batch; }));
    e.push_back(dbl("rollout_temperature", "rollout sampling temperature", [](RunConfig& c) -> auto& { return c.rft.temperature; }));
    e.push_back(dbl("refine_temperature", "online refinement temperature", [](RunConfig& c) -> auto& { return c.rft.refine_temperature; }));
    e.push_back(dbl("clip_eps", "ratio clip range", [](RunConfig& c) -> auto& { return c.rft.clip_eps; }));
    e.push_back(dbl("kl_beta", "KL weight against the reference policy", [](RunConfig& c) -> auto& { return c.rft.kl_beta; }));
    e.push_back(dbl("lr_generation", "rft learning rate of the generation path", [](RunConfig& c) -> auto& { return c.rft.lr_generation; }));
    e.push_back(dbl("lr_refinement", "rft learning rate of the refinement expert", [](RunConfig& c) -> auto& { return c.rft.lr_refinement; }));
    e.push_back(boolean("clip_hybrid", "clip ratios in the hybrid objective", [](RunConfig& c) -> auto& { return c.rft.clip_hybrid; }));
    e.push_back(boolean("use_grpo", "train the generation path with GRPO", [](RunConfig& c) -> auto& { return c.rft.use_grpo; }));
    e.push_back(boolean("use_offline", "offline term of the hybrid objective", [](RunConfig& c) -> auto& { return c.rft.use_offline; }));
    e.push_back(boolean("use_online", "online term of the hybrid objective", [](RunConfig& c) -> auto& { return c.rft.use_online; }));
    // Evaluation.
    e.push_back(boolean("eval_refine", "apply the refinement pass at evaluation", [](RunConfig& c) -> auto& { return c.eval.refine; }));
    e.push_back(integer("samples_per_scene", "evaluation samples per scene (best-of-k)", [](RunConfig& c) -> auto& { return c.eval.samples_per_scene; }));
    e.push_back(dbl("eval_temperature", "temperature of the first evaluation sample (0: argmax)", [](RunConfig& c) -> auto& { return c.eval.temperature; }));
    e.push_back(dbl("best_of_temperature", "temperature of additional evaluation samples", [](RunConfig& c) -> auto& { return c.eval.best_of_temperature; }));
    return e;
  }();
  return entries;
}

const Entry& find(const std::string& key) {
  for (const auto& e : registry()) {
    if (e.key == key) return e;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

RunConfig::RunConfig() { finalize(); }

void RunConfig::finalize() {
  codec.validate();
  sim.waypoints = codec.waypoints;
  sim.dt = codec.dt;
  model.response_len = codec.response_length();
  model.base_vocab_size = codec.base_vocab_size;
  model.spatial_bins = codec.spatial_bins;
  model.heading_bins = codec.heading_bins;
  model.vocab_size = codec.vocab_size();
  model.raster_size = sim.raster_size;
  model.raster_channels = 4;
  model.init_seed = seed;
  rft.steps = steps;
  rft.tau = tau;
  rft.schedule = schedule;
  try {
    model.validate();
    sim.validate();
    rft.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (steps < 1) throw ConfigError("steps must be at least 1");
  if (sft.epochs < 0 || sft.batch < 1) throw ConfigError("sft_epochs must be >= 0 and sft_batch >= 1");
  if (!(sft.mask_t_min > 0.0 && sft.mask_t_min <= 1.0)) throw ConfigError("mask_t_min must lie in (0, 1]");
  if (!(sft.refine_corruption_rate >= 0.0 && sft.refine_corruption_rate < 1.0)) {
    throw ConfigError("refine_corruption_rate must lie in [0, 1)");
  }
  if (!(sft.refine_model_fraction >= 0.0 && sft.refine_model_fraction <= 1.0)) {
    throw ConfigError("refine_model_fraction must lie in [0, 1]");
  }
  if (sft.refine_model_steps < 1) throw ConfigError("refine_model_steps must be at least 1");
  if (rft_epochs < 0 || rft_batch < 1) throw ConfigError("rft_epochs must be >= 0 and rft_batch >= 1");
  if (eval.samples_per_scene < 1) throw ConfigError("samples_per_scene must be at least 1");
}

void RunConfig::set(const std::string& key, const std::string& value) { find(key).set(*this, trim(value)); }

std::string RunConfig::get(const std::string& key) const { return find(key).get(*this); }

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& e : registry()) out.push_back(e.key);
    return out;
  }();
  return k;
}

std::string RunConfig::describe(const std::string& key) { return find(key).help; }

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& e : registry()) out += e.key + " = " + e.get(*this) + "\n";
  return out;
}

RunConfig RunConfig::parse(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.finalize();
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write config file '" + path + "'");
  out << serialize();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(serialize())));
  return buf;
}

std::string default_out_dir() {
  const char* env = std::getenv("MDPLAN_OUT_DIR");
  return env && *env ? env : "mdplan_out";
}

}  // namespace mdplan::pipeline
