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

#include "mdplan/mdplan.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "codec/token_codec.hpp"
#include "model/planner_model.hpp"
#include "pipeline/checkpoint.hpp"
#include "pipeline/config.hpp"
#include "pipeline/csv.hpp"
#include "pipeline/dataset.hpp"
#include "pipeline/evaluate.hpp"
#include "pipeline/plot.hpp"
#include "pipeline/training.hpp"
#include "sim/scene.hpp"
#include "sim/scene_json.hpp"

namespace pl = mdplan::pipeline;

struct mdplan_config {
  pl::RunConfig cfg;
};

struct mdplan_scenes {
  std::vector<mdplan::sim::Scene> scenes;
};

struct mdplan_model {
  pl::RunConfig config;
  mdplan::model::PlannerModel model;
  pl::Progress progress;
};

namespace {

thread_local std::string g_last_error;

class StatusError : public std::runtime_error {
 public:
  StatusError(mdplan_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  mdplan_status status;
};

void require(bool ok, const char* what) {
  if (!ok) throw StatusError(MDPLAN_ERR_INVALID_ARGUMENT, what);
}

bool mentions_file_access(const std::string& msg) {
  return msg.find("cannot open") != std::string::npos || msg.find("cannot write") != std::string::npos ||
         msg.find("cannot create") != std::string::npos || msg.find("cannot rename") != std::string::npos;
}

template <typename F>
mdplan_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return MDPLAN_OK;
  } catch (const StatusError& e) {
    g_last_error = e.what();
    return e.status;
  } catch (const pl::ConfigError& e) {
    g_last_error = e.what();
    return mentions_file_access(e.what()) ? MDPLAN_ERR_IO : MDPLAN_ERR_CONFIG;
  } catch (const pl::CheckpointError& e) {
    g_last_error = e.what();
    return mentions_file_access(e.what()) ? MDPLAN_ERR_IO : MDPLAN_ERR_CHECKPOINT;
  } catch (const pl::ParseError& e) {
    g_last_error = e.what();
    return mentions_file_access(e.what()) ? MDPLAN_ERR_IO : MDPLAN_ERR_PARSE;
  } catch (const mdplan::sim::InfeasibleError& e) {
    g_last_error = e.what();
    return MDPLAN_ERR_INFEASIBLE;
  } catch (const mdplan::sim::SimError& e) {
    g_last_error = e.what();
    return mentions_file_access(e.what()) ? MDPLAN_ERR_IO : MDPLAN_ERR_PARSE;
  } catch (const mdplan::codec::CodecError& e) {
    g_last_error = e.what();
    return MDPLAN_ERR_INVALID_ARGUMENT;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return MDPLAN_ERR_IO;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return MDPLAN_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MDPLAN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MDPLAN_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MDPLAN_ERR_INTERNAL;
  }
}

void copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size();
  if (buf == nullptr && cap == 0) return;
  if (buf == nullptr || cap < s.size() + 1) {
    throw StatusError(MDPLAN_ERR_BUFFER, "buffer of " + std::to_string(cap) + " bytes cannot hold " +
                                             std::to_string(s.size() + 1));
  }
  std::memcpy(buf, s.data(), s.size());
  buf[s.size()] = '\0';
}

pl::RunConfig resolved(const mdplan_config* c) {
  require(c != nullptr, "config handle is null");
  pl::RunConfig cfg = c->cfg;
  cfg.finalize();
  return cfg;
}

const mdplan::sim::Scene& scene_at(const mdplan_scenes* s, size_t index) {
  require(s != nullptr, "scenes handle is null");
  if (index >= s->scenes.size()) {
    throw StatusError(MDPLAN_ERR_INVALID_ARGUMENT, "scene index " + std::to_string(index) + " out of range (" +
                                                       std::to_string(s->scenes.size()) + " scenes)");
  }
  return s->scenes[index];
}

mdplan::codec::Trajectory trajectory_from(const double* xyh, size_t n) {
  require(xyh != nullptr || n == 0, "waypoint array is null");
  mdplan::codec::Trajectory t;
  for (size_t i = 0; i < n; ++i) t.waypoints.push_back({xyh[3 * i], xyh[3 * i + 1], xyh[3 * i + 2]});
  return t;
}

void trajectory_to(const mdplan::codec::Trajectory& t, double* out, size_t cap, size_t* n) {
  if (n) *n = t.waypoints.size();
  if (cap < t.waypoints.size() || out == nullptr) {
    throw StatusError(MDPLAN_ERR_BUFFER, "waypoint buffer holds " + std::to_string(cap) + " of " +
                                             std::to_string(t.waypoints.size()) + " waypoints");
  }
  for (size_t i = 0; i < t.waypoints.size(); ++i) {
    out[3 * i] = t.waypoints[i].x;
    out[3 * i + 1] = t.waypoints[i].y;
    out[3 * i + 2] = t.waypoints[i].heading;
  }
}

void fill_score(const mdplan::sim::RewardBreakdown& r, mdplan_score* out) {
  if (!out) return;
  *out = mdplan_score{r.nc, r.dac, r.ttc, r.comfort, r.ep, r.pdms, r.malformed ? 1 : 0};
}

// Keys fixing tensor shapes or the token layout; a run config may not
// disagree with the model on these.
const char* const kArchitectureKeys[] = {"spatial_min", "spatial_max",     "spatial_bins", "heading_min",
                                         "heading_max", "heading_bins",    "waypoints",    "base_vocab_size",
                                         "d_model",     "n_heads",         "n_shared_blocks", "n_expert_blocks",
                                         "mlp_ratio",   "patch_size",      "raster_size"};

void check_compatible(const pl::RunConfig& cfg, const mdplan_model* m) {
  for (const char* key : kArchitectureKeys) {
    const std::string a = cfg.get(key), b = m->config.get(key);
    if (a != b) {
      throw StatusError(MDPLAN_ERR_CONFIG, std::string("key '") + key + "' is " + a + " but the model was built with " +
                                               b);
    }
  }
}

std::vector<pl::Example> examples_for(const mdplan_scenes* s, const pl::RunConfig& cfg, mdplan_log_fn log,
                                      void* user) {
  require(s != nullptr, "scenes handle is null");
  std::vector<std::string> warnings;
  auto ex = pl::build_examples(s->scenes, cfg, &warnings);
  if (log) {
    for (const auto& w : warnings) log(("warning: " + w).c_str(), user);
  }
  if (ex.empty()) throw StatusError(MDPLAN_ERR_INVALID_ARGUMENT, "no usable scenes");
  return ex;
}

void fill_summary(const pl::EvalReport& r, mdplan_eval_summary* out) {
  if (!out) return;
  out->scenes = r.scenes.size();
  out->nc = r.nc;
  out->dac = r.dac;
  out->ttc = r.ttc;
  out->comfort = r.comfort;
  out->ep = r.ep;
  out->pdms = r.pdms;
  out->malformed_rate = r.malformed_rate;
  out->best_of_k_pdms = r.samples_per_scene > 1 ? r.best_of_k_pdms : r.pdms;
  out->median_latency_ms = r.median_latency_ms;
}

std::string fmt(const char* f, double a, double b, double c, double d) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

}  // namespace

extern "C" {

const char* mdplan_version(void) { return "0.1.0"; }

const char* mdplan_status_name(mdplan_status status) {
  switch (status) {
    case MDPLAN_OK: return "ok";
    case MDPLAN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MDPLAN_ERR_CONFIG: return "config error";
    case MDPLAN_ERR_IO: return "i/o error";
    case MDPLAN_ERR_PARSE: return "parse error";
    case MDPLAN_ERR_CHECKPOINT: return "checkpoint error";
    case MDPLAN_ERR_INFEASIBLE: return "infeasible";
    case MDPLAN_ERR_BUFFER: return "buffer too small";
    case MDPLAN_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* mdplan_last_error(void) { return g_last_error.c_str(); }

mdplan_status mdplan_default_out_dir(char* buf, size_t cap, size_t* needed) {
  return guarded([&] { copy_out(pl::default_out_dir(), buf, cap, needed); });
}

// ---- configuration ----

mdplan_status mdplan_config_create(mdplan_config** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    *out = new mdplan_config{};
  });
}

mdplan_status mdplan_config_load(const char* path, mdplan_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new mdplan_config{pl::RunConfig::load(path)};
  });
}

mdplan_status mdplan_config_parse(const char* text, mdplan_config** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new mdplan_config{pl::RunConfig::parse(text)};
  });
}

mdplan_status mdplan_config_clone(const mdplan_config* cfg, mdplan_config** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    *out = new mdplan_config{cfg->cfg};
  });
}

void mdplan_config_destroy(mdplan_config* cfg) { delete cfg; }

mdplan_status mdplan_config_set(mdplan_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg != nullptr && key != nullptr && value != nullptr, "null argument");
    cfg->cfg.set(key, value);
  });
}

mdplan_status mdplan_config_get(const mdplan_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(cfg != nullptr && key != nullptr, "null argument");
    copy_out(cfg->cfg.get(key), buf, cap, needed);
  });
}

mdplan_status mdplan_config_save(const mdplan_config* cfg, const char* path) {
  return guarded([&] {
    require(path != nullptr, "path is null");
    resolved(cfg).save(path);
  });
}

mdplan_status mdplan_config_serialize(const mdplan_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guarded([&] { copy_out(resolved(cfg).serialize(), buf, cap, needed); });
}

mdplan_status mdplan_config_hash(const mdplan_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guarded([&] { copy_out(resolved(cfg).hash(), buf, cap, needed); });
}

size_t mdplan_config_key_count(void) { return pl::RunConfig::keys().size(); }

const char* mdplan_config_key_name(size_t index) {
  const auto& k = pl::RunConfig::keys();
  return index < k.size() ? k[index].c_str() : nullptr;
}

const char* mdplan_config_key_help(size_t index) {
  static const std::vector<std::string> help = [] {
    std::vector<std::string> out;
    for (const auto& k : pl::RunConfig::keys()) out.push_back(pl::RunConfig::describe(k));
    return out;
  }();
  return index < help.size() ? help[index].c_str() : nullptr;
}

// ---- scene sets ----

mdplan_status mdplan_scenes_generate(const mdplan_config* cfg, int count, const char* difficulty,
                                     uint64_t base_seed, const char* split, mdplan_scenes** out) {
  return guarded([&] {
    require(out != nullptr && difficulty != nullptr && split != nullptr, "null argument");
    require(count >= 0, "scene count must be non-negative");
    const pl::RunConfig c = resolved(cfg);
    mdplan::sim::Difficulty d;
    pl::Split sp;
    try {
      d = mdplan::sim::parse_difficulty(difficulty);
      sp = pl::parse_split(split);
    } catch (const std::exception& e) {
      throw StatusError(MDPLAN_ERR_INVALID_ARGUMENT, e.what());
    }
    auto scenes = pl::generate_scenes(count, d, base_seed, sp, c.sim);
    *out = new mdplan_scenes{std::move(scenes)};
  });
}

mdplan_status mdplan_scenes_load(const char* path, mdplan_scenes** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    if (!std::filesystem::exists(path)) {
      throw StatusError(MDPLAN_ERR_IO, std::string("scene file '") + path + "' does not exist");
    }
    *out = new mdplan_scenes{mdplan::sim::read_scene_file(path)};
  });
}

mdplan_status mdplan_scenes_save(const mdplan_scenes* scenes, const char* path, int force) {
  return guarded([&] {
    require(scenes != nullptr && path != nullptr, "null argument");
    if (!force && std::filesystem::exists(path)) {
      throw StatusError(MDPLAN_ERR_IO, std::string("'") + path + "' exists; pass force to overwrite");
    }
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    mdplan::sim::write_scene_file(path, scenes->scenes);
  });
}

void mdplan_scenes_destroy(mdplan_scenes* scenes) { delete scenes; }

mdplan_status mdplan_scenes_count(const mdplan_scenes* scenes, size_t* count) {
  return guarded([&] {
    require(scenes != nullptr && count != nullptr, "null argument");
    *count = scenes->scenes.size();
  });
}

mdplan_status mdplan_scenes_seed(const mdplan_scenes* scenes, size_t index, uint64_t* seed) {
  return guarded([&] {
    require(seed != nullptr, "null argument");
    *seed = scene_at(scenes, index).seed;
  });
}

mdplan_status mdplan_scenes_score(const mdplan_scenes* scenes, size_t index, const mdplan_config* cfg,
                                  const double* waypoints, size_t n_waypoints, mdplan_score* out) {
  return guarded([&] {
    const auto& scene = scene_at(scenes, index);
    const pl::RunConfig c = resolved(cfg);
    fill_score(mdplan::sim::score(scene, trajectory_from(waypoints, n_waypoints), c.sim), out);
  });
}

mdplan_status mdplan_scenes_expert(const mdplan_scenes* scenes, size_t index, const mdplan_config* cfg,
                                   double* waypoints, size_t cap_waypoints, size_t* n_waypoints) {
  return guarded([&] {
    const auto& scene = scene_at(scenes, index);
    const pl::RunConfig c = resolved(cfg);
    trajectory_to(mdplan::sim::expert_plan(scene, c.sim), waypoints, cap_waypoints, n_waypoints);
  });
}

// ---- codec ----

mdplan_status mdplan_encode(const mdplan_config* cfg, const double* waypoints, size_t n_waypoints, int32_t* tokens,
                            size_t cap, size_t* n_tokens) {
  return guarded([&] {
    const pl::RunConfig c = resolved(cfg);
    const auto ids = mdplan::codec::encode_trajectory(trajectory_from(waypoints, n_waypoints), c.codec);
    if (n_tokens) *n_tokens = ids.size();
    if (tokens == nullptr || cap < ids.size()) {
      throw StatusError(MDPLAN_ERR_BUFFER, "token buffer holds " + std::to_string(cap) + " of " +
                                               std::to_string(ids.size()));
    }
    std::copy(ids.begin(), ids.end(), tokens);
  });
}

mdplan_status mdplan_decode(const mdplan_config* cfg, const int32_t* tokens, size_t n_tokens, double* waypoints,
                            size_t cap_waypoints, size_t* n_waypoints) {
  return guarded([&] {
    require(tokens != nullptr || n_tokens == 0, "token array is null");
    const pl::RunConfig c = resolved(cfg);
    const auto t = mdplan::codec::decode_trajectory(std::span<const int32_t>(tokens, n_tokens), c.codec);
    trajectory_to(t, waypoints, cap_waypoints, n_waypoints);
  });
}

// ---- models ----

mdplan_status mdplan_model_create(const mdplan_config* cfg, mdplan_model** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    const pl::RunConfig c = resolved(cfg);
    *out = new mdplan_model{c, mdplan::model::PlannerModel(c.model), pl::Progress{}};
  });
}

mdplan_status mdplan_model_load(const char* path, mdplan_model** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    pl::Checkpoint ck = pl::load_checkpoint(path);
    *out = new mdplan_model{std::move(ck.config), std::move(ck.model), ck.progress};
  });
}

mdplan_status mdplan_model_save(const mdplan_model* model, const char* path) {
  return guarded([&] {
    require(model != nullptr && path != nullptr, "null argument");
    pl::save_checkpoint(path, model->config, model->model, model->progress);
  });
}

void mdplan_model_destroy(mdplan_model* model) { delete model; }

mdplan_status mdplan_model_config(const mdplan_model* model, mdplan_config** out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    *out = new mdplan_config{model->config};
  });
}

mdplan_status mdplan_model_progress(const mdplan_model* model, char* stage, size_t cap, size_t* needed, int* epoch) {
  return guarded([&] {
    require(model != nullptr, "model handle is null");
    if (epoch) *epoch = model->progress.epoch;
    copy_out(model->progress.stage, stage, cap, needed);
  });
}

mdplan_status mdplan_model_parameter_count(const mdplan_model* model, size_t* count) {
  return guarded([&] {
    require(model != nullptr && count != nullptr, "null argument");
    *count = model->model.params().scalar_count();
  });
}

mdplan_status mdplan_model_plan(const mdplan_model* model, const mdplan_config* cfg, const mdplan_scenes* scenes,
                                size_t index, int32_t* tokens, size_t cap, size_t* n_tokens, mdplan_score* score) {
  return guarded([&] {
    require(model != nullptr, "model handle is null");
    const pl::RunConfig c = resolved(cfg);
    check_compatible(c, model);
    const auto& scene = scene_at(scenes, index);
    const auto ctx = mdplan::model::make_context(mdplan::sim::rasterize(scene, c.sim), model->model.config());
    mdplan::diffusion::SampleOptions opt;
    opt.schedule = mdplan::diffusion::Schedule::make(c.schedule, c.steps, model->model.config().response_len);
    opt.tau = c.steps;
    opt.temperature = c.eval.temperature;
    mdplan::diffusion::Rng rng(pl::derive_seed(c.seed, 0xE7A1, index));
    auto out = mdplan::diffusion::sample(model->model, ctx, opt, rng).tokens;
    if (c.eval.refine && model->model.config().n_expert_blocks > 0) {
      out = mdplan::diffusion::refine(model->model, ctx, out, mdplan::diffusion::RefineMode::kArgmax, 0.0, rng);
    }
    if (score) {
      mdplan::codec::Trajectory traj;
      mdplan::sim::RewardBreakdown r;
      if (mdplan::codec::try_decode_trajectory(out, c.codec, &traj)) {
        r = mdplan::sim::score(scene, traj, c.sim);
      } else {
        r.malformed = true;
      }
      fill_score(r, score);
    }
    if (n_tokens) *n_tokens = out.size();
    if (tokens == nullptr || cap < out.size()) {
      throw StatusError(MDPLAN_ERR_BUFFER, "token buffer holds " + std::to_string(cap) + " of " +
                                               std::to_string(out.size()));
    }
    std::copy(out.begin(), out.end(), tokens);
  });
}

// ---- training ----

mdplan_status mdplan_train_sft(mdplan_model* model, const mdplan_config* cfg, const mdplan_scenes* scenes,
                               const char* checkpoint_path, const char* loss_csv, mdplan_log_fn log, void* user) {
  return guarded([&] {
    require(model != nullptr, "model handle is null");
    const pl::RunConfig c = resolved(cfg);
    check_compatible(c, model);
    const auto examples = examples_for(scenes, c, log, user);
    pl::SftOptions opt;
    if (checkpoint_path) opt.checkpoint_path = checkpoint_path;
    if (loss_csv) opt.log_csv = loss_csv;
    const int total = c.sft.epochs;
    if (log) {
      opt.on_epoch = [&](const pl::SftEpoch& e) {
        char head[64];
        std::snprintf(head, sizeof(head), "sft epoch %d/%d", e.epoch, total);
        log((head + fmt(" gen_loss=%.6f refine_loss=%.6f lr=%.3g", e.gen_loss, e.refine_loss, e.lr, 0)).c_str(), user);
      };
    }
    model->config = c;
    pl::run_sft(c, model->model, model->progress, examples, opt);
  });
}

mdplan_status mdplan_train_rft(mdplan_model* model, const mdplan_config* cfg, const mdplan_scenes* scenes,
                               const char* checkpoint_path, const char* best_checkpoint_path, const char* metrics_csv,
                               mdplan_log_fn log, void* user) {
  return guarded([&] {
    require(model != nullptr, "model handle is null");
    const pl::RunConfig c = resolved(cfg);
    check_compatible(c, model);
    const auto examples = examples_for(scenes, c, log, user);
    pl::RftOptions opt;
    if (checkpoint_path) opt.checkpoint_path = checkpoint_path;
    if (best_checkpoint_path) opt.best_checkpoint_path = best_checkpoint_path;
    if (metrics_csv) opt.metrics_csv = metrics_csv;
    if (log) {
      opt.on_step = [&](const pl::RftRow& r) {
        char head[64];
        std::snprintf(head, sizeof(head), "rft step %lld epoch %d", static_cast<long long>(r.step), r.epoch);
        log((head + fmt(" mean_r=%.4f refined=%.4f clip=%.3f kl=%.5f", r.metrics.mean_reward,
                        r.metrics.mean_refined_reward, r.metrics.clip_fraction, r.metrics.kl))
                .c_str(),
            user);
      };
    }
    model->config = c;
    pl::run_rft(c, model->model, model->progress, examples, opt);
  });
}

// ---- evaluation ----

mdplan_status mdplan_evaluate(const mdplan_model* model, const mdplan_config* cfg, const mdplan_scenes* scenes,
                              const char* out_stem, mdplan_eval_summary* summary) {
  return guarded([&] {
    require(model != nullptr, "model handle is null");
    const pl::RunConfig c = resolved(cfg);
    check_compatible(c, model);
    const auto examples = examples_for(scenes, c, nullptr, nullptr);
    const pl::EvalReport rep = pl::evaluate(model->model, examples, c);
    if (out_stem) pl::write_report(rep, out_stem);
    fill_summary(rep, summary);
  });
}

mdplan_status mdplan_evaluate_sweep(const mdplan_model* model, const mdplan_config* cfg, const mdplan_scenes* scenes,
                                    const int* steps, size_t n_steps, const char* sweep_csv,
                                    mdplan_eval_summary* summaries) {
  return guarded([&] {
    require(model != nullptr, "model handle is null");
    require(steps != nullptr && n_steps > 0, "no step counts given");
    const pl::RunConfig base = resolved(cfg);
    check_compatible(base, model);
    const auto examples = examples_for(scenes, base, nullptr, nullptr);
    std::vector<pl::SweepPoint> points;
    for (size_t i = 0; i < n_steps; ++i) {
      pl::RunConfig c = base;
      c.steps = steps[i];
      c.tau = std::min(c.tau, std::max(1, steps[i]));
      c.finalize();
      const pl::EvalReport rep = pl::evaluate(model->model, examples, c);
      points.push_back({steps[i], rep.pdms, rep.median_latency_ms});
      if (summaries) fill_summary(rep, &summaries[i]);
    }
    if (sweep_csv) {
      const std::filesystem::path p(sweep_csv);
      if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
      std::ofstream out(sweep_csv, std::ios::binary | std::ios::trunc);
      if (!out) throw StatusError(MDPLAN_ERR_IO, std::string("cannot write '") + sweep_csv + "'");
      out << pl::sweep_csv(points);
    }
  });
}

// ---- plots ----

mdplan_status mdplan_plot(const char* const* inputs, size_t n_inputs, const char* out_dir, size_t* n_written) {
  return guarded([&] {
    require(out_dir != nullptr && (inputs != nullptr || n_inputs == 0), "null argument");
    std::vector<std::string> in;
    for (size_t i = 0; i < n_inputs; ++i) {
      require(inputs[i] != nullptr, "null input path");
      in.emplace_back(inputs[i]);
    }
    const auto written = pl::plot_files(in, out_dir);
    if (n_written) *n_written = written.size();
  });
}

}  // extern "C"
