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

#ifndef MDPLAN_TESTS_CAPI_CAPI_UTIL_HPP_
#define MDPLAN_TESTS_CAPI_CAPI_UTIL_HPP_

#include <mdplan/mdplan.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace mdplan::capi_test {

/// Small architecture set through the public setters; the caller destroys it.
inline mdplan_config* tiny_config() {
  mdplan_config* cfg = nullptr;
  if (mdplan_config_create(&cfg) != MDPLAN_OK) throw std::runtime_error(mdplan_last_error());
  const std::pair<const char*, const char*> kv[] = {
      {"spatial_bins", "400"}, {"heading_bins", "180"}, {"waypoints", "4"},     {"d_model", "16"},
      {"n_heads", "2"},        {"n_shared_blocks", "2"}, {"n_expert_blocks", "1"}, {"mlp_ratio", "2"},
      {"raster_size", "16"},   {"raster_resolution", "2"}, {"patch_size", "8"},  {"steps", "6"},
      {"tau", "2"},            {"group_size", "4"},     {"online_samples", "2"}, {"sft_batch", "2"},
      {"sft_warmup_steps", "0"}, {"sft_lr", "0.003"},   {"refine_model_warmup", "1"}};
  for (const auto& [k, v] : kv) {
    if (mdplan_config_set(cfg, k, v) != MDPLAN_OK) throw std::runtime_error(mdplan_last_error());
  }
  return cfg;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("mdplan_capi_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mdplan::capi_test

#endif  // MDPLAN_TESTS_CAPI_CAPI_UTIL_HPP_
