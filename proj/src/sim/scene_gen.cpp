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

#include <cmath>
#include <numbers>
#include <random>

#include "sim/scene.hpp"

namespace mdplan::sim {

namespace {

struct DifficultyProfile {
  int min_obstacles;
  int max_obstacles;
  double max_curvature;
  double min_lateral;  // obstacle offset from the centerline, meters
  double max_lateral;
  double moving_probability;
};

DifficultyProfile profile_for(Difficulty d) {
  switch (d) {
    case Difficulty::kEasy: return {1, 2, 0.010, 2.8, 4.5, 0.3};
    case Difficulty::kMedium: return {3, 4, 0.020, 1.2, 3.8, 0.4};
    case Difficulty::kHard: return {5, 6, 0.030, 0.0, 2.5, 0.4};
  }
  return {1, 2, 0.010, 2.8, 4.5, 0.3};
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

 private:
  std::mt19937_64 gen_;
};

constexpr double kBehind = 15.0;  // centerline length behind the ego
constexpr double kLength = 90.0;

Scene attempt(Sampler& rng, std::uint64_t seed, Difficulty difficulty, const SimConfig& cfg) {
  const DifficultyProfile prof = profile_for(difficulty);
  Scene sc;
  sc.seed = seed;
  sc.difficulty = difficulty;
  sc.waypoints = cfg.waypoints;
  sc.dt = cfg.dt;
  sc.half_width = rng.uniform(3.5, 4.5);

  // Centerline in a local frame: straight, then a constant-curvature arc.
  const bool straight = rng.bernoulli(difficulty == Difficulty::kEasy ? 0.4 : 0.25);
  const double kappa = straight ? 0.0 : rng.uniform(-prof.max_curvature, prof.max_curvature);
  const double curve_start = kBehind + rng.uniform(0.0, 10.0);
  std::vector<Vec2> local;
  Vec2 p{0.0, 0.0};
  local.push_back(p);
  for (int i = 1; i <= static_cast<int>(kLength); ++i) {
    const double s_mid = i - 0.5;
    const double th = s_mid < curve_start ? 0.0 : kappa * (s_mid - curve_start);
    p = p + unit(th);
    local.push_back(p);
  }
  const Polyline local_path(local);

  const double e0 = rng.uniform(-0.5, 0.5);
  const Vec2 ego_local = local_path.point_at(kBehind) +
                         unit(local_path.heading_at(kBehind) + 0.5 * std::numbers::pi) * e0;
  const double ego_local_heading = local_path.heading_at(kBehind) + rng.uniform(-0.03, 0.03);

  // Place the ego at a random world pose and carry the corridor along.
  sc.ego_position = {rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)};
  sc.ego_heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
  const double rot = sc.ego_heading - ego_local_heading;
  const auto to_world = [&](Vec2 q) { return sc.ego_position + rotate(q - ego_local, rot); };
  for (const auto& q : local) sc.centerline.push_back(to_world(q));
  sc.ego_speed = rng.uniform(2.5, 4.5);

  const double turn = local_path.heading_at(kBehind + 30.0) - local_path.heading_at(kBehind);
  sc.command = turn > 0.15 ? Command::kLeft : (turn < -0.15 ? Command::kRight : Command::kStraight);

  const OrientedBox ego_box = checks::ego_box(sc.ego_position, sc.ego_heading, cfg);
  const int count = rng.integer(prof.min_obstacles, prof.max_obstacles);
  for (int i = 0; i < count; ++i) {
    for (int tries = 0; tries < 20; ++tries) {
      const double s = kBehind + rng.uniform(6.0, 22.0);
      const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
      const double lat = side * rng.uniform(prof.min_lateral, prof.max_lateral);
      const bool vehicle = rng.bernoulli(0.7);
      Obstacle ob;
      ob.box.length = vehicle ? rng.uniform(3.5, 4.8) : rng.uniform(0.8, 1.5);
      ob.box.width = vehicle ? rng.uniform(1.6, 2.0) : rng.uniform(0.8, 1.5);
      const double tangent = local_path.heading_at(s);
      const Vec2 c_local = local_path.point_at(s) + unit(tangent + 0.5 * std::numbers::pi) * lat;
      ob.box.center = to_world(c_local);
      ob.box.heading = wrap_angle(tangent + rot + rng.uniform(-0.1, 0.1));
      if (vehicle && rng.bernoulli(prof.moving_probability)) {
        ob.velocity = unit(tangent + rot) * (sc.ego_speed * rng.uniform(0.3, 0.6));
      }
      OrientedBox padded = ob.box;
      padded.length += 1.0;
      padded.width += 1.0;
      bool clash = boxes_intersect(padded, ego_box);
      for (const auto& other : sc.obstacles) clash = clash || boxes_intersect(padded, other.box);
      if (clash) continue;
      sc.obstacles.push_back(ob);
      break;
    }
  }
  return sc;
}

}  // namespace

Scene generate_scene(std::uint64_t seed, Difficulty difficulty, const SimConfig& cfg) {
  cfg.validate();
  Sampler rng(seed);
  for (int attempt_no = 0; attempt_no < 100; ++attempt_no) {
    Scene sc = attempt(rng, seed, difficulty, cfg);
    try {
      const codec::Trajectory plan = expert_plan(sc, cfg);
      sc.reference_progress = arc_progress(sc, plan);
      return sc;
    } catch (const InfeasibleError&) {
      continue;
    }
  }
  throw InfeasibleError("generate_scene: no feasible scene after 100 attempts (seed " +
                        std::to_string(seed) + ")");
}

}  // namespace mdplan::sim
