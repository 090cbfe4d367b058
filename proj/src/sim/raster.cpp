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

#include <algorithm>

#include "sim/scene.hpp"

namespace mdplan::sim {

Raster rasterize(const Scene& scene, const SimConfig& cfg) {
  Raster r;
  r.channels = 4;
  r.size = cfg.raster_size;
  r.command = command_token(scene.command);
  const int n = r.size;
  r.cells.assign(static_cast<std::size_t>(r.channels) * n * n, 0.0);
  const Polyline path = scene.corridor();
  const double mid_t = 0.5 * scene.waypoints * scene.dt;
  const double speed = std::clamp(scene.ego_speed / cfg.speed_norm, 0.0, 1.0);
  const double half = 0.5 * n - 0.5;

  std::vector<OrientedBox> now, mid;
  for (const auto& ob : scene.obstacles) {
    now.push_back(ob.at(0.0));
    mid.push_back(ob.at(mid_t));
  }
  const auto cell = [&](int c, int row, int col) -> double& {
    return r.cells[(static_cast<std::size_t>(c) * n + row) * n + col];
  };
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const Vec2 ego{(half - row) * cfg.raster_resolution, (half - col) * cfg.raster_resolution};
      const Vec2 w = scene.to_world(ego);
      if (std::abs(path.project(w).lateral) <= scene.half_width) cell(kDrivable, row, col) = 1.0;
      for (const auto& b : now) {
        if (b.contains(w)) cell(kObstaclesNow, row, col) = 1.0;
      }
      for (const auto& b : mid) {
        if (b.contains(w)) cell(kObstaclesMid, row, col) = 1.0;
      }
      cell(kEgoSpeed, row, col) = speed;
    }
  }
  return r;
}

}  // namespace mdplan::sim
