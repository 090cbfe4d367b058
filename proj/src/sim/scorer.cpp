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
#include <cmath>
#include <numbers>

#include "sim/scene.hpp"

namespace mdplan::sim {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kTol = 1e-9;
}  // namespace

std::string_view difficulty_name(Difficulty d) {
  switch (d) {
    case Difficulty::kEasy: return "easy";
    case Difficulty::kMedium: return "medium";
    case Difficulty::kHard: return "hard";
  }
  return "easy";
}

Difficulty parse_difficulty(std::string_view name) {
  if (name == "easy") return Difficulty::kEasy;
  if (name == "medium") return Difficulty::kMedium;
  if (name == "hard") return Difficulty::kHard;
  throw SimError("unknown difficulty '" + std::string(name) + "'");
}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::kStraight: return "straight";
    case Command::kLeft: return "left";
    case Command::kRight: return "right";
  }
  return "straight";
}

Command parse_command(std::string_view name) {
  if (name == "straight") return Command::kStraight;
  if (name == "left") return Command::kLeft;
  if (name == "right") return Command::kRight;
  throw SimError("unknown command '" + std::string(name) + "'");
}

codec::TokenId command_token(Command c) {
  switch (c) {
    case Command::kStraight: return codec::special::kCommandStraight;
    case Command::kLeft: return codec::special::kCommandLeft;
    case Command::kRight: return codec::special::kCommandRight;
  }
  return codec::special::kCommandStraight;
}

void SimConfig::validate() const {
  if (waypoints < 1) throw SimError("sim: waypoints must be >= 1");
  if (!(dt > 0.0)) throw SimError("sim: dt must be positive");
  if (lattice_lateral < 2) throw SimError("sim: lattice_lateral must be >= 2");
  if (lattice_speeds < 1 || lattice_speeds % 2 == 0) {
    throw SimError("sim: lattice_speeds must be odd and >= 1");
  }
  if (w_ttc < 0 || w_comfort < 0 || w_ep < 0 || w_ttc + w_comfort + w_ep <= 0) {
    throw SimError("sim: score weights must be non-negative with a positive sum");
  }
  if (raster_size < 2 || !(raster_resolution > 0.0)) throw SimError("sim: bad raster geometry");
}

Vec2 Scene::to_world(Vec2 ego_frame) const {
  return ego_position + rotate(ego_frame, ego_heading);
}

Vec2 Scene::to_ego(Vec2 world) const { return rotate(world - ego_position, -ego_heading); }

namespace checks {

OrientedBox ego_box(Vec2 world_pos, double world_heading, const SimConfig& cfg) {
  return OrientedBox{world_pos, world_heading, cfg.ego_length, cfg.ego_width};
}

bool collides(const Scene& scene, const OrientedBox& ego, double t) {
  for (const auto& ob : scene.obstacles) {
    if (boxes_intersect(ego, ob.at(t))) return true;
  }
  return false;
}

bool ttc_violation(const Scene& scene, Vec2 world_pos, double world_heading, double speed,
                   double t, const SimConfig& cfg) {
  if (speed <= 1e-6 || scene.obstacles.empty()) return false;
  const Vec2 dir = unit(world_heading);
  const int steps = static_cast<int>(std::round(cfg.ttc_threshold / cfg.ttc_step));
  for (int i = 1; i <= steps; ++i) {
    const double tau = i * cfg.ttc_step;
    if (collides(scene, ego_box(world_pos + dir * (speed * tau), world_heading, cfg), t + tau)) {
      return true;
    }
  }
  return false;
}

}  // namespace checks

double aggregate_pdms(const RewardBreakdown& r, const SimConfig& cfg) {
  const double soft = (cfg.w_ttc * r.ttc + cfg.w_comfort * r.comfort + cfg.w_ep * r.ep) /
                      (cfg.w_ttc + cfg.w_comfort + cfg.w_ep);
  return std::clamp(r.nc * r.dac * soft, 0.0, 1.0);
}

double arc_progress(const Scene& scene, const codec::Trajectory& traj) {
  if (traj.waypoints.empty()) return 0.0;
  const Polyline path = scene.corridor();
  const auto& last = traj.waypoints.back();
  return path.project(scene.to_world({last.x, last.y})).s - path.project(scene.ego_position).s;
}

RewardBreakdown score(const Scene& scene, const codec::Trajectory& traj, const SimConfig& cfg) {
  RewardBreakdown out;
  const std::size_t h = traj.waypoints.size();
  bool finite = true;
  for (const auto& wp : traj.waypoints) {
    finite = finite && std::isfinite(wp.x) && std::isfinite(wp.y) && std::isfinite(wp.heading);
  }
  if (h != static_cast<std::size_t>(scene.waypoints) || h == 0 || !finite) {
    out.malformed = true;
    return out;
  }

  const Polyline path = scene.corridor();
  std::vector<Vec2> pos(h + 1);
  std::vector<double> psi(h + 1);
  pos[0] = scene.ego_position;
  psi[0] = scene.ego_heading;
  for (std::size_t k = 0; k < h; ++k) {
    const auto& wp = traj.waypoints[k];
    pos[k + 1] = scene.to_world({wp.x, wp.y});
    psi[k + 1] = scene.ego_heading + wp.heading * kDegToRad;
  }
  std::vector<double> speed(h + 1, 0.0);
  for (std::size_t k = 1; k <= h; ++k) speed[k] = (pos[k] - pos[k - 1]).norm() / scene.dt;

  bool collision = false, ttc_bad = false, far_exit = false;
  int inside = 0;
  for (std::size_t k = 1; k <= h; ++k) {
    const double t = static_cast<double>(k) * scene.dt;
    const OrientedBox box = checks::ego_box(pos[k], psi[k], cfg);
    collision = collision || checks::collides(scene, box, t);
    ttc_bad = ttc_bad || checks::ttc_violation(scene, pos[k], psi[k], speed[k], t, cfg);
    const double lat = std::abs(path.project(pos[k]).lateral);
    if (lat <= scene.half_width + 1e-6) {
      ++inside;
    } else if (lat > scene.half_width + cfg.dac_exit_tolerance) {
      far_exit = true;
    }
  }

  bool comfortable = true;
  for (std::size_t k = 1; k <= h; ++k) {
    const double yaw_rate = std::abs(wrap_angle(psi[k] - psi[k - 1])) / scene.dt;
    comfortable = comfortable && yaw_rate <= cfg.max_yaw_rate + kTol;
    if (k >= 2) {
      const double accel = std::abs(speed[k] - speed[k - 1]) / scene.dt;
      comfortable = comfortable && accel <= cfg.max_accel + kTol;
    }
  }

  const double progress = path.project(pos[h]).s - path.project(pos[0]).s;
  double ep;
  if (scene.reference_progress > 1e-9) {
    ep = std::clamp(progress / scene.reference_progress, 0.0, 1.0);
  } else {
    ep = progress >= -1e-9 ? 1.0 : 0.0;
  }

  out.nc = collision ? 0.0 : 1.0;
  out.dac = far_exit ? 0.0 : static_cast<double>(inside) / static_cast<double>(h);
  out.ttc = ttc_bad ? 0.0 : 1.0;
  out.comfort = comfortable ? 1.0 : 0.0;
  out.ep = ep;
  out.pdms = aggregate_pdms(out, cfg);
  return out;
}

}  // namespace mdplan::sim
