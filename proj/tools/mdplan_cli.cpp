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

// Command-line front end. Talks to the library only through mdplan.h.

#include <CLI11.hpp>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdplan/mdplan.h"

namespace {

struct Failure : std::runtime_error {
  Failure(mdplan_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  mdplan_status status;
};

void check(mdplan_status s, const std::string& context) {
  if (s != MDPLAN_OK) throw Failure(s, context + ": " + mdplan_last_error());
}

struct ConfigDeleter {
  void operator()(mdplan_config* c) const { mdplan_config_destroy(c); }
};
struct ScenesDeleter {
  void operator()(mdplan_scenes* s) const { mdplan_scenes_destroy(s); }
};
struct ModelDeleter {
  void operator()(mdplan_model* m) const { mdplan_model_destroy(m); }
};
using ConfigPtr = std::unique_ptr<mdplan_config, ConfigDeleter>;
using ScenesPtr = std::unique_ptr<mdplan_scenes, ScenesDeleter>;
using ModelPtr = std::unique_ptr<mdplan_model, ModelDeleter>;

std::string out_dir() {
  size_t n = 0;
  check(mdplan_default_out_dir(nullptr, 0, &n), "output directory");
  std::string s(n + 1, '\0');
  check(mdplan_default_out_dir(s.data(), s.size(), &n), "output directory");
  s.resize(n);
  return s;
}

std::string under_out(const std::string& name) { return out_dir() + "/" + name; }

// Options shared by every subcommand: a config file and one flag per key.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    const size_t n = mdplan_config_key_count();
    for (size_t i = 0; i < n; ++i) {
      const std::string key = mdplan_config_key_name(i);
      app->add_option("--" + key, values[key], mdplan_config_key_help(i))->group("Config keys");
    }
  }

  // Base: the config file when given, else `fallback` (a checkpoint's
  // config), else defaults. Flags are applied last.
  ConfigPtr resolve(const mdplan_config* fallback, const CLI::App* app) const {
    mdplan_config* raw = nullptr;
    if (!config_path.empty()) {
      check(mdplan_config_load(config_path.c_str(), &raw), "loading " + config_path);
    } else if (fallback != nullptr) {
      check(mdplan_config_clone(fallback, &raw), "config");
    } else {
      check(mdplan_config_create(&raw), "config");
    }
    ConfigPtr cfg(raw);
    for (const auto& [key, value] : values) {
      if (app->count("--" + key) == 0) continue;
      check(mdplan_config_set(cfg.get(), key.c_str(), value.c_str()), "--" + key);
    }
    return cfg;
  }
};

ScenesPtr load_scenes(const std::string& path) {
  mdplan_scenes* raw = nullptr;
  check(mdplan_scenes_load(path.c_str(), &raw), "loading scenes");
  return ScenesPtr(raw);
}

ModelPtr load_model(const std::string& path) {
  mdplan_model* raw = nullptr;
  check(mdplan_model_load(path.c_str(), &raw), "loading checkpoint");
  return ModelPtr(raw);
}

ConfigPtr model_config(const mdplan_model* m) {
  mdplan_config* raw = nullptr;
  check(mdplan_model_config(m, &raw), "checkpoint config");
  return ConfigPtr(raw);
}

void print_line(const char* line, void*) {
  std::printf("%s\n", line);
  std::fflush(stdout);
}

void print_summary(const mdplan_eval_summary& s, int samples) {
  std::printf("scenes %zu  pdms %.4f  nc %.4f  dac %.4f  ttc %.4f  comfort %.4f  ep %.4f  malformed %.4f\n", s.scenes,
              s.pdms, s.nc, s.dac, s.ttc, s.comfort, s.ep, s.malformed_rate);
  if (samples > 1) std::printf("best-of-%d pdms %.4f\n", samples, s.best_of_k_pdms);
  std::printf("median latency %.2f ms\n", s.median_latency_ms);
}

int get_int(const mdplan_config* cfg, const char* key) {
  char buf[64];
  size_t n = 0;
  check(mdplan_config_get(cfg, key, buf, sizeof(buf), &n), key);
  return std::stoi(buf);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Masked-diffusion trajectory planner: scenes, training, evaluation and plots"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mdplan_version()));

  // gen-scenes
  auto* gen = app.add_subcommand("gen-scenes", "Generate a scene file");
  ConfigFlags gen_flags;
  gen_flags.attach(gen);
  int count = 32;
  std::string difficulty = "easy", split = "train", gen_out;
  bool force = false;
  gen->add_option("--count", count, "number of scenes")->check(CLI::NonNegativeNumber);
  gen->add_option("--difficulty", difficulty, "easy, medium or hard");
  gen->add_option("--split", split, "train or holdout");
  gen->add_option("--out", gen_out, "scene file (default <out dir>/scenes.jsonl)");
  gen->add_flag("--force", force, "overwrite an existing file");

  // sft
  auto* sft = app.add_subcommand("sft", "Supervised stage");
  ConfigFlags sft_flags;
  sft_flags.attach(sft);
  std::string sft_scenes, sft_out, sft_log, sft_resume;
  sft->add_option("--scenes", sft_scenes, "training scene file")->required();
  sft->add_option("--out", sft_out, "checkpoint (default <out dir>/sft.ckpt)");
  sft->add_option("--log", sft_log, "per-epoch loss CSV (default <checkpoint>.loss.csv)");
  sft->add_option("--resume", sft_resume, "continue from this checkpoint")->check(CLI::ExistingFile);

  // rft
  auto* rft = app.add_subcommand("rft", "Reinforcement stage");
  ConfigFlags rft_flags;
  rft_flags.attach(rft);
  std::string rft_ckpt, rft_scenes, rft_out, rft_best, rft_metrics;
  rft->add_option("--ckpt", rft_ckpt, "supervised checkpoint")->required()->check(CLI::ExistingFile);
  rft->add_option("--scenes", rft_scenes, "training scene file")->required();
  rft->add_option("--out", rft_out, "final checkpoint (default <out dir>/rft.ckpt)");
  rft->add_option("--best", rft_best, "best-reward checkpoint (default <checkpoint>.best)");
  rft->add_option("--metrics", rft_metrics, "per-step metrics CSV (default <checkpoint>.metrics.csv)");

  // eval
  auto* ev = app.add_subcommand("eval", "Score a checkpoint on a scene file");
  ConfigFlags ev_flags;
  ev_flags.attach(ev);
  std::string ev_ckpt, ev_scenes, ev_out, ev_refine, ev_sweep_out;
  std::vector<int> ev_sweep;
  ev->add_option("--ckpt", ev_ckpt, "checkpoint")->required()->check(CLI::ExistingFile);
  ev->add_option("--scenes", ev_scenes, "scene file")->required();
  ev->add_option("--out", ev_out, "report stem (default <out dir>/eval)");
  ev->add_option("--refine", ev_refine, "on or off (same as --eval_refine)")->check(CLI::IsMember({"on", "off"}));
  ev->add_option("--steps-sweep", ev_sweep, "evaluate each of these step counts")->delimiter(',');
  ev->add_option("--sweep-out", ev_sweep_out, "sweep CSV (default <stem>.sweep.csv)");

  // plot
  auto* plot = app.add_subcommand("plot", "Render CSV logs and sweeps as SVG");
  std::vector<std::string> plot_inputs;
  std::string plot_out;
  std::string plot_seed;
  plot->add_option("inputs", plot_inputs, "loss logs, metric logs or sweep CSVs")->required();
  plot->add_option("--out-dir", plot_out, "directory for SVG files (default <out dir>/plots)");
  plot->add_option("--seed", plot_seed, "accepted for uniformity; plots are deterministic");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      ConfigPtr cfg = gen_flags.resolve(nullptr, gen);
      char seed[32];
      size_t n = 0;
      check(mdplan_config_get(cfg.get(), "seed", seed, sizeof(seed), &n), "seed");
      if (gen_out.empty()) gen_out = under_out("scenes.jsonl");
      mdplan_scenes* raw = nullptr;
      check(mdplan_scenes_generate(cfg.get(), count, difficulty.c_str(), std::stoull(seed), split.c_str(), &raw),
            "gen-scenes");
      ScenesPtr scenes(raw);
      check(mdplan_scenes_save(scenes.get(), gen_out.c_str(), force ? 1 : 0), "gen-scenes");
      std::printf("wrote %d %s %s scenes to %s\n", count, difficulty.c_str(), split.c_str(), gen_out.c_str());
    } else if (sft->parsed()) {
      ModelPtr model;
      if (!sft_resume.empty()) model = load_model(sft_resume);
      ConfigPtr fallback = model ? model_config(model.get()) : nullptr;
      ConfigPtr cfg = sft_flags.resolve(fallback.get(), sft);
      if (!model) {
        mdplan_model* raw = nullptr;
        check(mdplan_model_create(cfg.get(), &raw), "model");
        model.reset(raw);
      }
      ScenesPtr scenes = load_scenes(sft_scenes);
      if (sft_out.empty()) sft_out = under_out("sft.ckpt");
      if (sft_log.empty()) sft_log = sft_out + ".loss.csv";
      check(mdplan_train_sft(model.get(), cfg.get(), scenes.get(), sft_out.c_str(), sft_log.c_str(), print_line,
                             nullptr),
            "sft");
      std::printf("checkpoint %s\nloss log %s\n", sft_out.c_str(), sft_log.c_str());
    } else if (rft->parsed()) {
      ModelPtr model = load_model(rft_ckpt);
      ConfigPtr fallback = model_config(model.get());
      ConfigPtr cfg = rft_flags.resolve(fallback.get(), rft);
      ScenesPtr scenes = load_scenes(rft_scenes);
      if (rft_out.empty()) rft_out = under_out("rft.ckpt");
      if (rft_best.empty()) rft_best = rft_out + ".best";
      if (rft_metrics.empty()) rft_metrics = rft_out + ".metrics.csv";
      check(mdplan_train_rft(model.get(), cfg.get(), scenes.get(), rft_out.c_str(), rft_best.c_str(),
                             rft_metrics.c_str(), print_line, nullptr),
            "rft");
      std::printf("checkpoint %s\nbest %s\nmetrics %s\n", rft_out.c_str(), rft_best.c_str(), rft_metrics.c_str());
    } else if (ev->parsed()) {
      ModelPtr model = load_model(ev_ckpt);
      ConfigPtr fallback = model_config(model.get());
      ConfigPtr cfg = ev_flags.resolve(fallback.get(), ev);
      if (!ev_refine.empty()) {
        check(mdplan_config_set(cfg.get(), "eval_refine", ev_refine == "on" ? "true" : "false"), "--refine");
      }
      ScenesPtr scenes = load_scenes(ev_scenes);
      if (ev_out.empty()) ev_out = under_out("eval");
      mdplan_eval_summary summary{};
      check(mdplan_evaluate(model.get(), cfg.get(), scenes.get(), ev_out.c_str(), &summary), "eval");
      print_summary(summary, get_int(cfg.get(), "samples_per_scene"));
      std::printf("report %s.json\n", ev_out.c_str());
      if (!ev_sweep.empty()) {
        if (ev_sweep_out.empty()) ev_sweep_out = ev_out + ".sweep.csv";
        std::vector<mdplan_eval_summary> rows(ev_sweep.size());
        check(mdplan_evaluate_sweep(model.get(), cfg.get(), scenes.get(), ev_sweep.data(), ev_sweep.size(),
                                    ev_sweep_out.c_str(), rows.data()),
              "steps sweep");
        for (size_t i = 0; i < rows.size(); ++i) {
          std::printf("steps %2d  pdms %.4f  median latency %.2f ms\n", ev_sweep[i], rows[i].pdms,
                      rows[i].median_latency_ms);
        }
        std::printf("sweep %s\n", ev_sweep_out.c_str());
      }
    } else if (plot->parsed()) {
      if (plot_out.empty()) plot_out = under_out("plots");
      std::vector<const char*> in;
      for (const auto& p : plot_inputs) in.push_back(p.c_str());
      size_t written = 0;
      check(mdplan_plot(in.data(), in.size(), plot_out.c_str(), &written), "plot");
      std::printf("wrote %zu files to %s\n", written, plot_out.c_str());
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error (%s): %s\n", mdplan_status_name(f.status), f.what());
    return 1 + static_cast<int>(f.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
