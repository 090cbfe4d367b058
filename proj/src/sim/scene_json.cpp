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

#include "sim/scene_json.hpp"

#include <fstream>
#include <json.hpp>

namespace mdplan::sim {

using nlohmann::json;

std::string scene_to_json_line(const Scene& sc) {
  json j;
  j["schema"] = kSceneSchemaVersion;
  j["seed"] = sc.seed;
  j["difficulty"] = difficulty_name(sc.difficulty);
  j["command"] = command_name(sc.command);
  j["half_width"] = sc.half_width;
  json line = json::array();
  for (const auto& p : sc.centerline) line.push_back({p.x, p.y});
  j["centerline"] = line;
  j["ego"] = {{"x", sc.ego_position.x},
              {"y", sc.ego_position.y},
              {"heading", sc.ego_heading},
              {"speed", sc.ego_speed}};
  json obs = json::array();
  for (const auto& o : sc.obstacles) {
    obs.push_back({{"x", o.box.center.x},
                   {"y", o.box.center.y},
                   {"heading", o.box.heading},
                   {"length", o.box.length},
                   {"width", o.box.width},
                   {"vx", o.velocity.x},
                   {"vy", o.velocity.y}});
  }
  j["obstacles"] = obs;
  j["waypoints"] = sc.waypoints;
  j["dt"] = sc.dt;
  j["reference_progress"] = sc.reference_progress;
  return j.dump();
}

Scene scene_from_json_line(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("schema").get<int>() != kSceneSchemaVersion) {
    throw SimError("unsupported scene schema " + std::to_string(j.at("schema").get<int>()));
  }
  Scene sc;
  sc.seed = j.at("seed").get<std::uint64_t>();
  sc.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
  sc.command = parse_command(j.at("command").get<std::string>());
  sc.half_width = j.at("half_width").get<double>();
  for (const auto& p : j.at("centerline")) sc.centerline.push_back({p.at(0), p.at(1)});
  const auto& ego = j.at("ego");
  sc.ego_position = {ego.at("x"), ego.at("y")};
  sc.ego_heading = ego.at("heading");
  sc.ego_speed = ego.at("speed");
  for (const auto& o : j.at("obstacles")) {
    Obstacle ob;
    ob.box = {{o.at("x"), o.at("y")}, o.at("heading"), o.at("length"), o.at("width")};
    ob.velocity = {o.at("vx"), o.at("vy")};
    if (!(ob.box.length > 0.0 && ob.box.width > 0.0)) {
      throw SimError("obstacle extents must be positive");
    }
    sc.obstacles.push_back(ob);
  }
  sc.waypoints = j.at("waypoints");
  sc.dt = j.at("dt");
  sc.reference_progress = j.at("reference_progress");
  if (sc.centerline.size() < 2) throw SimError("centerline needs at least two points");
  return sc;
}

void write_scene_file(const std::string& path, const std::vector<Scene>& scenes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SimError("cannot open '" + path + "' for writing");
  for (const auto& sc : scenes) out << scene_to_json_line(sc) << '\n';
  if (!out) throw SimError("write to '" + path + "' failed");
}

std::vector<Scene> read_scene_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SimError("cannot open scene file '" + path + "'");
  std::vector<Scene> scenes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      scenes.push_back(scene_from_json_line(line));
    } catch (const std::exception& e) {
      throw SimError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return scenes;
}

}  // namespace mdplan::sim
