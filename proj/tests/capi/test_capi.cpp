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

// Exercises the shared library through its C header only.

#include <doctest.h>
#include <mdplan/mdplan.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "capi/capi_util.hpp"

using mdplan::capi_test::TempDir;
using mdplan::capi_test::tiny_config;

TEST_CASE("library identity and status names") {
  CHECK(std::strlen(mdplan_version()) > 0);
  CHECK(std::string(mdplan_status_name(MDPLAN_OK)) == "ok");
  CHECK(std::string(mdplan_status_name(MDPLAN_ERR_BUFFER)) == "buffer too small");
  CHECK(std::string(mdplan_status_name(static_cast<mdplan_status>(99))) == "unknown status");
}

TEST_CASE("config keys, values and errors") {
  mdplan_config* cfg = nullptr;
  REQUIRE(mdplan_config_create(&cfg) == MDPLAN_OK);
  REQUIRE(mdplan_config_key_count() > 20);
  for (size_t i = 0; i < mdplan_config_key_count(); ++i) {
    CHECK(std::strlen(mdplan_config_key_name(i)) > 0);
    CHECK(std::strlen(mdplan_config_key_help(i)) > 0);
  }
  CHECK(mdplan_config_key_name(100000) == nullptr);

  CHECK(mdplan_config_set(cfg, "d_model", "64") == MDPLAN_OK);
  char buf[64];
  size_t needed = 0;
  CHECK(mdplan_config_get(cfg, "d_model", buf, sizeof(buf), &needed) == MDPLAN_OK);
  CHECK(std::string(buf) == "64");
  CHECK(needed == 2);

  CHECK(mdplan_config_set(cfg, "no_such_key", "1") == MDPLAN_ERR_CONFIG);
  CHECK(std::string(mdplan_last_error()).find("no_such_key") != std::string::npos);
  CHECK(mdplan_config_set(cfg, "d_model", "wide") == MDPLAN_ERR_CONFIG);
  CHECK(mdplan_config_set(nullptr, "d_model", "8") == MDPLAN_ERR_INVALID_ARGUMENT);

  // Size query, then a too-small buffer.
  CHECK(mdplan_config_serialize(cfg, nullptr, 0, &needed) == MDPLAN_OK);
  CHECK(needed > 100);
  char tiny[4];
  CHECK(mdplan_config_serialize(cfg, tiny, sizeof(tiny), &needed) == MDPLAN_ERR_BUFFER);
  std::string text(needed + 1, '\0');
  REQUIRE(mdplan_config_serialize(cfg, text.data(), text.size(), &needed) == MDPLAN_OK);

  mdplan_config* back = nullptr;
  REQUIRE(mdplan_config_parse(text.c_str(), &back) == MDPLAN_OK);
  char h1[32], h2[32];
  REQUIRE(mdplan_config_hash(cfg, h1, sizeof(h1), nullptr) == MDPLAN_OK);
  REQUIRE(mdplan_config_hash(back, h2, sizeof(h2), nullptr) == MDPLAN_OK);
  CHECK(std::string(h1) == std::string(h2));
  CHECK(mdplan_config_parse("seed = 1\nbroken line\n", &back) == MDPLAN_ERR_CONFIG);
  CHECK(std::string(mdplan_last_error()).find(":2") != std::string::npos);

  TempDir dir("capi_cfg");
  CHECK(mdplan_config_save(cfg, dir.file("a.cfg").c_str()) == MDPLAN_OK);
  mdplan_config* loaded = nullptr;
  REQUIRE(mdplan_config_load(dir.file("a.cfg").c_str(), &loaded) == MDPLAN_OK);
  CHECK(mdplan_config_get(loaded, "d_model", buf, sizeof(buf), nullptr) == MDPLAN_OK);
  CHECK(std::string(buf) == "64");
  CHECK(mdplan_config_load(dir.file("missing.cfg").c_str(), &loaded) == MDPLAN_ERR_IO);
  mdplan_config_destroy(loaded);
  mdplan_config_destroy(back);
  mdplan_config_destroy(cfg);
}

TEST_CASE("scenes: generate, persist, score and plan like the expert") {
  mdplan_config* cfg = tiny_config();
  mdplan_scenes* scenes = nullptr;
  REQUIRE(mdplan_scenes_generate(cfg, 6, "easy", 5, "train", &scenes) == MDPLAN_OK);
  size_t count = 0;
  CHECK(mdplan_scenes_count(scenes, &count) == MDPLAN_OK);
  CHECK(count == 6);
  CHECK(mdplan_scenes_generate(cfg, 2, "extreme", 5, "train", &scenes) == MDPLAN_ERR_INVALID_ARGUMENT);

  mdplan_scenes* hold = nullptr;
  REQUIRE(mdplan_scenes_generate(cfg, 3, "easy", 5, "holdout", &hold) == MDPLAN_OK);
  uint64_t train_seed = 0, hold_seed = 0;
  CHECK(mdplan_scenes_seed(scenes, 0, &train_seed) == MDPLAN_OK);
  CHECK(mdplan_scenes_seed(hold, 0, &hold_seed) == MDPLAN_OK);
  CHECK(train_seed != hold_seed);
  CHECK(mdplan_scenes_seed(scenes, 6, &train_seed) == MDPLAN_ERR_INVALID_ARGUMENT);

  TempDir dir("capi_scenes");
  const std::string path = dir.file("s.jsonl");
  CHECK(mdplan_scenes_save(scenes, path.c_str(), 0) == MDPLAN_OK);
  CHECK(mdplan_scenes_save(scenes, path.c_str(), 0) == MDPLAN_ERR_IO);
  CHECK(mdplan_scenes_save(scenes, path.c_str(), 1) == MDPLAN_OK);
  mdplan_scenes* loaded = nullptr;
  REQUIRE(mdplan_scenes_load(path.c_str(), &loaded) == MDPLAN_OK);
  uint64_t s0 = 0, s1 = 0;
  mdplan_scenes_seed(scenes, 3, &s0);
  mdplan_scenes_seed(loaded, 3, &s1);
  CHECK(s0 == s1);
  mdplan_scenes_destroy(loaded);
  CHECK(mdplan_scenes_load(dir.file("none.jsonl").c_str(), &loaded) == MDPLAN_ERR_IO);

  // Expert plan: query the size, then fetch, score, encode and decode.
  size_t n = 0;
  CHECK(mdplan_scenes_expert(scenes, 0, cfg, nullptr, 0, &n) == MDPLAN_ERR_BUFFER);
  REQUIRE(n == 4);
  std::vector<double> wp(3 * n);
  REQUIRE(mdplan_scenes_expert(scenes, 0, cfg, wp.data(), n, &n) == MDPLAN_OK);
  mdplan_score score{};
  REQUIRE(mdplan_scenes_score(scenes, 0, cfg, wp.data(), n, &score) == MDPLAN_OK);
  CHECK(score.nc == 1.0);
  CHECK(score.pdms >= 0.9);
  CHECK(score.malformed == 0);

  std::vector<int32_t> tokens(12);
  size_t nt = 0;
  REQUIRE(mdplan_encode(cfg, wp.data(), n, tokens.data(), tokens.size(), &nt) == MDPLAN_OK);
  CHECK(nt == 12);
  std::vector<double> back(3 * n);
  size_t nb = 0;
  REQUIRE(mdplan_decode(cfg, tokens.data(), nt, back.data(), n, &nb) == MDPLAN_OK);
  CHECK(nb == n);
  // 400 bins over 200 m and 180 bins over 180 degrees.
  for (size_t k = 0; k < n; ++k) {
    CHECK(std::abs(back[3 * k] - wp[3 * k]) <= 0.25 + 1e-9);
    CHECK(std::abs(back[3 * k + 1] - wp[3 * k + 1]) <= 0.25 + 1e-9);
    CHECK(std::abs(back[3 * k + 2] - wp[3 * k + 2]) <= 0.5 + 1e-9);
  }
  tokens[1] = 1;  // MASK
  CHECK(mdplan_decode(cfg, tokens.data(), nt, back.data(), n, &nb) == MDPLAN_ERR_INVALID_ARGUMENT);

  mdplan_scenes_destroy(hold);
  mdplan_scenes_destroy(scenes);
  mdplan_config_destroy(cfg);
}

namespace {

void count_lines(const char* line, void* user) {
  CHECK(std::strlen(line) > 0);
  ++*static_cast<int*>(user);
}

}  // namespace

TEST_CASE("model lifecycle: train, save, load, plan and evaluate") {
  mdplan_config* cfg = tiny_config();
  REQUIRE(mdplan_config_set(cfg, "sft_epochs", "2") == MDPLAN_OK);
  mdplan_scenes* scenes = nullptr;
  REQUIRE(mdplan_scenes_generate(cfg, 4, "easy", 9, "train", &scenes) == MDPLAN_OK);
  mdplan_model* model = nullptr;
  REQUIRE(mdplan_model_create(cfg, &model) == MDPLAN_OK);
  size_t params = 0;
  CHECK(mdplan_model_parameter_count(model, &params) == MDPLAN_OK);
  CHECK(params > 1000);

  TempDir dir("capi_model");
  int lines = 0;
  REQUIRE(mdplan_train_sft(model, cfg, scenes, dir.file("sft.ckpt").c_str(), dir.file("loss.csv").c_str(),
                           count_lines, &lines) == MDPLAN_OK);
  CHECK(lines >= 2);
  char stage[16];
  int epoch = -1;
  REQUIRE(mdplan_model_progress(model, stage, sizeof(stage), nullptr, &epoch) == MDPLAN_OK);
  CHECK(std::string(stage) == "sft");
  CHECK(epoch == 2);

  mdplan_model* loaded = nullptr;
  REQUIRE(mdplan_model_load(dir.file("sft.ckpt").c_str(), &loaded) == MDPLAN_OK);
  std::vector<int32_t> a(12), b(12);
  size_t na = 0, nb = 0;
  mdplan_score sa{}, sb{};
  REQUIRE(mdplan_model_plan(model, cfg, scenes, 1, a.data(), a.size(), &na, &sa) == MDPLAN_OK);
  REQUIRE(mdplan_model_plan(loaded, cfg, scenes, 1, b.data(), b.size(), &nb, &sb) == MDPLAN_OK);
  CHECK(na == 12);
  CHECK(a == b);
  CHECK(sa.pdms == sb.pdms);

  mdplan_eval_summary s1{}, s2{};
  REQUIRE(mdplan_evaluate(loaded, cfg, scenes, dir.file("e1").c_str(), &s1) == MDPLAN_OK);
  REQUIRE(mdplan_evaluate(loaded, cfg, scenes, dir.file("e2").c_str(), &s2) == MDPLAN_OK);
  CHECK(s1.scenes == 4);
  CHECK(s1.pdms == s2.pdms);
  CHECK(mdplan::capi_test::slurp(dir.file("e1.json")) == mdplan::capi_test::slurp(dir.file("e2.json")));
  CHECK(s1.best_of_k_pdms == s1.pdms);

  const int steps[] = {2, 4};
  mdplan_eval_summary sweep[2];
  REQUIRE(mdplan_evaluate_sweep(loaded, cfg, scenes, steps, 2, dir.file("sweep.csv").c_str(), sweep) ==
          MDPLAN_OK);
  CHECK(sweep[0].scenes == 4);

  const char* inputs[] = {nullptr, nullptr};
  const std::string loss = dir.file("loss.csv"), sw = dir.file("sweep.csv");
  inputs[0] = loss.c_str();
  inputs[1] = sw.c_str();
  size_t written = 0;
  REQUIRE(mdplan_plot(inputs, 2, dir.file("plots").c_str(), &written) == MDPLAN_OK);
  CHECK(written == 3);

  // A config whose architecture differs from the model is refused.
  mdplan_config* other = nullptr;
  REQUIRE(mdplan_config_clone(cfg, &other) == MDPLAN_OK);
  REQUIRE(mdplan_config_set(other, "d_model", "32") == MDPLAN_OK);
  CHECK(mdplan_evaluate(loaded, other, scenes, dir.file("e3").c_str(), &s1) == MDPLAN_ERR_CONFIG);

  CHECK(mdplan_model_load(dir.file("loss.csv").c_str(), &loaded) == MDPLAN_ERR_CHECKPOINT);

  mdplan_config_destroy(other);
  mdplan_model_destroy(loaded);
  mdplan_model_destroy(model);
  mdplan_scenes_destroy(scenes);
  mdplan_config_destroy(cfg);
}

TEST_CASE("destroying null handles is harmless") {
  mdplan_config_destroy(nullptr);
  mdplan_scenes_destroy(nullptr);
  mdplan_model_destroy(nullptr);
  mdplan_model* m = nullptr;
  CHECK(mdplan_model_create(nullptr, &m) == MDPLAN_ERR_INVALID_ARGUMENT);
}
