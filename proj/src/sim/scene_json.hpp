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

#ifndef MDPLAN_SIM_SCENE_JSON_HPP_
#define MDPLAN_SIM_SCENE_JSON_HPP_

#include <string>
#include <vector>

#include "sim/scene.hpp"

namespace mdplan::sim {

inline constexpr int kSceneSchemaVersion = 1;

/// One scene as a single-line JSON object.
std::string scene_to_json_line(const Scene& scene);
Scene scene_from_json_line(const std::string& line);

/// Line-delimited scene files. Reading reports the offending line number.
void write_scene_file(const std::string& path, const std::vector<Scene>& scenes);
std::vector<Scene> read_scene_file(const std::string& path);

}  // namespace mdplan::sim

#endif  // MDPLAN_SIM_SCENE_JSON_HPP_
