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

#include "pipeline/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>

namespace mdplan::pipeline {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'M', 'D', 'P', 'L', 'A', 'N', 'C', 'K'};

static_assert(std::endian::native == std::endian::little, "checkpoint payloads assume a little-endian host");

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw CheckpointError("'" + path + "': truncated header");
  return v;
}

void write_doubles(std::ostream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::istream& in, std::span<double> v, const std::string& path, const std::string& id) {
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!in) throw CheckpointError("'" + path + "': truncated payload for parameter '" + id + "'");
}

}  // namespace

void save_checkpoint(const std::string& path, const RunConfig& config, const model::PlannerModel& model,
                     const Progress& progress) {
  json header;
  header["format_version"] = kCheckpointVersion;
  json cfg = json::object();
  for (const auto& key : RunConfig::keys()) cfg[key] = config.get(key);
  header["config"] = cfg;
  const auto& mc = model.config();
  header["model"] = {{"d_model", mc.d_model},           {"n_heads", mc.n_heads},
                     {"n_shared_blocks", mc.n_shared_blocks}, {"n_expert_blocks", mc.n_expert_blocks},
                     {"vocab_size", mc.vocab_size},     {"response_len", mc.response_len},
                     {"strict_confinement", mc.strict_confinement}};
  header["progress"] = {{"stage", progress.stage},
                        {"epoch", progress.epoch},
                        {"step", progress.step},
                        {"best_reward", progress.best_reward}};
  json params = json::array();
  for (const auto& p : model.params().items()) {
    params.push_back({{"id", p.id},
                      {"label", std::string(tensor::label_name(p.label))},
                      {"shape", p.value.shape()},
                      {"moments", !p.m.empty()},
                      {"adam_step", p.step}});
  }
  header["params"] = params;
  const std::string text = header.dump();

  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open '" + tmp + "' for writing");
    out.write(kMagic, sizeof(kMagic));
    write_pod<std::uint32_t>(out, kCheckpointVersion);
    write_pod<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& p : model.params().items()) {
      const auto d = p.value.data();
      out.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
      if (!p.m.empty()) {
        write_doubles(out, p.m);
        write_doubles(out, p.v);
      }
    }
    if (!out) throw CheckpointError("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("'" + path + "' is not an mdplan checkpoint");
  }
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw CheckpointError("'" + path + "': unsupported checkpoint version " + std::to_string(version));
  }
  const auto len = read_pod<std::uint64_t>(in, path);
  if (len > (1ULL << 30)) throw CheckpointError("'" + path + "': implausible header length");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw CheckpointError("'" + path + "': truncated header");

  json header;
  try {
    header = json::parse(text);
  } catch (const std::exception& e) {
    throw CheckpointError("'" + path + "': bad header: " + e.what());
  }
  RunConfig cfg;
  try {
    for (const auto& [key, value] : header.at("config").items()) cfg.set(key, value.get<std::string>());
    cfg.finalize();
  } catch (const std::exception& e) {
    throw CheckpointError("'" + path + "': bad config: " + e.what());
  }
  model::PlannerModel model(cfg.model);
  const auto& plist = header.at("params");
  if (plist.size() != model.params().size()) {
    throw CheckpointError("'" + path + "': " + std::to_string(plist.size()) + " parameters, model expects " +
                          std::to_string(model.params().size()));
  }
  for (const auto& entry : plist) {
    const std::string id = entry.at("id");
    if (!model.params().contains(id)) throw CheckpointError("'" + path + "': unknown parameter '" + id + "'");
    auto& p = model.params().get(id);
    if (entry.at("shape").get<tensor::Shape>() != p.value.shape()) {
      throw CheckpointError("'" + path + "': shape mismatch for '" + id + "'");
    }
    p.label = tensor::parse_label(entry.at("label").get<std::string>());
    read_doubles(in, p.value.mutable_data(), path, id);
    p.step = entry.at("adam_step").get<std::int64_t>();
    if (entry.at("moments").get<bool>()) {
      p.m.assign(p.value.numel(), 0.0);
      p.v.assign(p.value.numel(), 0.0);
      read_doubles(in, p.m, path, id);
      read_doubles(in, p.v, path, id);
    } else {
      p.m.clear();
      p.v.clear();
    }
  }
  Progress prog;
  const auto& pj = header.at("progress");
  prog.stage = pj.at("stage");
  prog.epoch = pj.at("epoch");
  prog.step = pj.at("step");
  prog.best_reward = pj.at("best_reward");
  return Checkpoint{cfg, std::move(model), prog};
}

}  // namespace mdplan::pipeline
