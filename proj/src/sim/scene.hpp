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

// Procedural 2D driving scenes, a lattice expert planner and a PDMS-style
// scorer. World frame is arbitrary; trajectories are expressed in the ego
// frame at t = 0 (x forward, y left, heading in degrees).

#ifndef MDPLAN_SIM_SCENE_HPP_
#define MDPLAN_SIM_SCENE_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "codec/token_codec.hpp"
#include "sim/geometry.hpp"

namespace mdplan::sim {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleError : public SimError {
 public:
  using SimError::SimError;
};

enum class Difficulty { kEasy, kMedium, kHard };
enum class Command { kStraight, kLeft, kRight };

std::string_view difficulty_name(Difficulty d);
Difficulty parse_difficulty(std::string_view name);
std::string_view command_name(Command c);
Command parse_command(std::string_view name);
codec::TokenId command_token(Command c);

struct SimConfig {
  int waypoints = 8;
  double dt = 0.5;
  double ego_length = 4.0;
  double ego_width = 1.8;
  // Scorer thresholds.
  double dac_exit_tolerance = 1.0;  // meters beyond the corridor edge
  double ttc_threshold = 1.0;       // seconds
  double ttc_step = 0.1;
  double max_accel = 4.0;     // m/s^2
  double max_yaw_rate = 0.6;  // rad/s
  double w_ttc = 5.0;
  double w_comfort = 2.0;
  double w_ep = 5.0;
  // Expert lattice.
  int lattice_lateral = 9;
  int lattice_speeds = 5;
  double w_lateral = 1.0;
  double w_jerk = 4.0;
  double w_speed = 2.0;
  // Raster.
  int raster_size = 64;
  double raster_resolution = 0.5;  // meters per cell
  double speed_norm = 10.0;

  void validate() const;
};

struct Obstacle {
  OrientedBox box;  // at t = 0
  Vec2 velocity;

  bool is_static() const { return velocity.x == 0.0 && velocity.y == 0.0; }
  OrientedBox at(double t) const {
    OrientedBox b = box;
    b.center = b.center + velocity * t;
    return b;
  }
  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

struct Scene {
  std::uint64_t seed = 0;
  Difficulty difficulty = Difficulty::kEasy;
  std::vector<Vec2> centerline;
  double half_width = 4.0;
  Vec2 ego_position;
  double ego_heading = 0.0;  // radians, world frame
  double ego_speed = 0.0;
  std::vector<Obstacle> obstacles;
  Command command = Command::kStraight;
  int waypoints = 8;
  double dt = 0.5;
  // Arc progress of the expert plan; normalizes the EP term.
  double reference_progress = 0.0;

  Polyline corridor() const { return Polyline(centerline); }
  Vec2 to_world(Vec2 ego_frame) const;
  Vec2 to_ego(Vec2 world) const;
  friend bool operator==(const Scene&, const Scene&) = default;
};

struct RewardBreakdown {
  double nc = 0.0;
  double dac = 0.0;
  double ttc = 0.0;
  double comfort = 0.0;
  double ep = 0.0;
  double pdms = 0.0;
  bool malformed = false;
};

/// Deterministic in seed; regenerates internally until the expert finds a
/// collision-free, corridor-compliant plan (at most 100 attempts).
Scene generate_scene(std::uint64_t seed, Difficulty difficulty, const SimConfig& cfg);

/// Minimum-cost lattice trajectory. Throws InfeasibleError when no lattice
/// member is collision-free and corridor-compliant.
codec::Trajectory expert_plan(const Scene& scene, const SimConfig& cfg);

/// Every trajectory in the expert's search lattice; exponential in the
/// horizon, intended for brute-force checks on short horizons.
std::vector<codec::Trajectory> enumerate_lattice(const Scene& scene, const SimConfig& cfg);

RewardBreakdown score(const Scene& scene, const codec::Trajectory& traj, const SimConfig& cfg);
/// Score with the gates relaxed into a breakdown from known components.
double aggregate_pdms(const RewardBreakdown& r, const SimConfig& cfg);
/// Signed arc-length progress of the final waypoint along the corridor.
double arc_progress(const Scene& scene, const codec::Trajectory& traj);

struct Raster {
  int channels = 4;
  int size = 64;
  std::vector<double> cells;  // channel-major: [c][row][col]
  codec::TokenId command = codec::special::kCommandStraight;

  double at(int c, int row, int col) const {
    return cells[(static_cast<std::size_t>(c) * size + row) * size + col];
  }
};

enum RasterChannel { kDrivable = 0, kObstaclesNow = 1, kObstaclesMid = 2, kEgoSpeed = 3 };

/// Ego-centered, heading-aligned occupancy grid. Row 0 is the far-forward
/// edge and column 0 the far-left edge.
Raster rasterize(const Scene& scene, const SimConfig& cfg);

// Per-waypoint checks shared by the scorer and the expert planner.
namespace checks {
OrientedBox ego_box(Vec2 world_pos, double world_heading, const SimConfig& cfg);
bool collides(const Scene& scene, const OrientedBox& ego, double t);
bool ttc_violation(const Scene& scene, Vec2 world_pos, double world_heading, double speed,
                   double t, const SimConfig& cfg);
}  // namespace checks

}  // namespace mdplan::sim

#endif  // MDPLAN_SIM_SCENE_HPP_
