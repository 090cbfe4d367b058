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

// Lattice expert: lateral offsets x constant-acceleration speed profiles,
// solved by dynamic programming over (previous lateral, current lateral)
// states so that heading, yaw-rate and acceleration checks stay local.
//
// Feasibility classes are tried in order of the soft score they guarantee
// (TTC and comfort both satisfied, TTC only, comfort only, neither). The
// first class with a feasible plan wins; within it the cheapest plan over all
// speed profiles is returned. Collision and corridor exit are always hard.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "sim/scene.hpp"

namespace mdplan::sim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-9;

std::vector<double> profile_accels(const SimConfig& cfg) {
  std::vector<double> a(static_cast<std::size_t>(cfg.lattice_speeds));
  if (a.size() == 1) return {0.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(a.size() - 1);
  }
  return a;
}

// Distance travelled after time t under constant acceleration, never
// reversing.
double travelled(double v0, double accel, double t) {
  if (accel < 0.0) {
    const double t_stop = v0 / -accel;
    if (t >= t_stop) return v0 * t_stop + 0.5 * accel * t_stop * t_stop;
  }
  return v0 * t + 0.5 * accel * t * t;
}

struct Node {
  Vec2 world;           // as the scorer will reconstruct it
  codec::Waypoint wp;   // ego frame
  double psi = 0.0;     // world heading as the scorer will reconstruct it
  double speed = 0.0;
  bool collision = false;
  bool ttc_bad = false;
};

class Lattice {
 public:
  Lattice(const Scene& scene, const SimConfig& cfg, double accel)
      : scene_(scene), cfg_(cfg), path_(scene.corridor()) {
    h_ = scene.waypoints;
    n_ = cfg.lattice_lateral;
    const double s0 = path_.project(scene.ego_position).s;
    e0_ = path_.project(scene.ego_position).lateral;
    station_.resize(static_cast<std::size_t>(h_) + 1);
    for (int k = 0; k <= h_; ++k) {
      station_[k] = s0 + travelled(scene.ego_speed, accel, k * scene.dt);
    }
    lateral_.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
      lateral_[j] = -scene.half_width + 2.0 * scene.half_width * j / (n_ - 1);
    }
  }

  int horizon() const { return h_; }
  int width() const { return n_; }
  int start() const { return n_; }  // pseudo lateral index for the ego pose
  double lateral(int j) const { return j == n_ ? e0_ : lateral_[j]; }

  Vec2 raw_position(int k, int j) const {
    if (k == 0) return scene_.ego_position;
    const double s = station_[k];
    const Vec2 normal = unit(path_.heading_at(s) + 0.5 * std::numbers::pi);
    return path_.point_at(s) + normal * lateral_[j];
  }

  // Waypoint k reached from lateral `a` at k - 1 into lateral `b` at k.
  Node node(int k, int a, int b) const {
    const Vec2 prev = k == 1 ? scene_.ego_position : round_trip(raw_position(k - 1, a));
    const Vec2 raw = raw_position(k, b);
    Node n;
    const Vec2 ego = scene_.to_ego(raw);
    n.world = scene_.to_world(ego);
    const Vec2 d = n.world - prev;
    double psi_raw = d.norm() > 1e-6 ? std::atan2(d.y, d.x) : path_.heading_at(station_[k]);
    n.wp = {ego.x, ego.y, wrap_angle(psi_raw - scene_.ego_heading) * kRadToDeg};
    n.psi = scene_.ego_heading + n.wp.heading * kDegToRad;
    n.speed = d.norm() / scene_.dt;
    const double t = k * scene_.dt;
    n.collision = checks::collides(scene_, checks::ego_box(n.world, n.psi, cfg_), t);
    n.ttc_bad = checks::ttc_violation(scene_, n.world, n.psi, n.speed, t, cfg_);
    return n;
  }

  bool comfortable(const Node& prev, const Node& cur, bool first_accel) const {
    const double yaw = std::abs(wrap_angle(cur.psi - prev.psi)) / scene_.dt;
    if (yaw > cfg_.max_yaw_rate + kTol) return false;
    if (first_accel) {
      const double acc = std::abs(cur.speed - prev.speed) / scene_.dt;
      if (acc > cfg_.max_accel + kTol) return false;
    }
    return true;
  }

 private:
  Vec2 round_trip(Vec2 world) const { return scene_.to_world(scene_.to_ego(world)); }

  const Scene& scene_;
  const SimConfig& cfg_;
  Polyline path_;
  int h_ = 0;
  int n_ = 0;
  double e0_ = 0.0;
  std::vector<double> station_;
  std::vector<double> lateral_;
};

struct Plan {
  double cost = kInf;
  codec::Trajectory traj;
};

// nodes[k][a][b] for k = 1..H, a in [0, n] (n = start), b in [0, n).
using NodeTable = std::vector<std::vector<std::vector<Node>>>;

NodeTable build_nodes(const Lattice& lat) {
  const int h = lat.horizon(), n = lat.width();
  NodeTable t(static_cast<std::size_t>(h) + 1);
  for (int k = 1; k <= h; ++k) {
    t[k].resize(static_cast<std::size_t>(n) + 1);
    for (int a = 0; a <= n; ++a) {
      if ((k == 1) != (a == n)) continue;
      t[k][a].resize(static_cast<std::size_t>(n));
      for (int b = 0; b < n; ++b) t[k][a][b] = lat.node(k, a, b);
    }
  }
  return t;
}

Plan solve(const Lattice& lat, const NodeTable& nodes, const Scene& scene, const SimConfig& cfg,
           bool enforce_ttc, bool enforce_comfort) {
  const int h = lat.horizon(), n = lat.width(), s = lat.start();
  const auto idx = [n](int a, int b) { return static_cast<std::size_t>(a * n + b); };
  const std::size_t states = static_cast<std::size_t>((n + 1) * n);
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(h) + 1,
                                        std::vector<double>(states, kInf));
  std::vector<std::vector<int>> back(static_cast<std::size_t>(h) + 1,
                                     std::vector<int>(states, -1));

  Node ego;
  ego.psi = scene.ego_heading;
  ego.speed = scene.ego_speed;
  const auto admissible = [&](const Node& nd) {
    return !nd.collision && !(enforce_ttc && nd.ttc_bad);
  };

  for (int b = 0; b < n; ++b) {
    const Node& nd = nodes[1][s][b];
    if (!admissible(nd)) continue;
    // The first yaw step is measured from the ego heading; speed is not
    // compared against the ego speed, matching the scorer.
    if (enforce_comfort && !lat.comfortable(ego, nd, false)) continue;
    cost[1][idx(s, b)] = cfg.w_lateral * lat.lateral(b) * lat.lateral(b);
  }
  for (int k = 1; k < h; ++k) {
    for (int a = 0; a <= n; ++a) {
      if ((k == 1) != (a == s)) continue;
      for (int b = 0; b < n; ++b) {
        const double c0 = cost[k][idx(a, b)];
        if (c0 == kInf) continue;
        const Node& cur = nodes[k][a][b];
        for (int c = 0; c < n; ++c) {
          const Node& nxt = nodes[k + 1][b][c];
          if (!admissible(nxt)) continue;
          if (enforce_comfort && !lat.comfortable(cur, nxt, true)) continue;
          const double jerk = lat.lateral(c) - 2.0 * lat.lateral(b) + lat.lateral(a);
          const double total =
              c0 + cfg.w_lateral * lat.lateral(c) * lat.lateral(c) + cfg.w_jerk * jerk * jerk;
          if (total < cost[k + 1][idx(b, c)]) {
            cost[k + 1][idx(b, c)] = total;
            back[k + 1][idx(b, c)] = a;
          }
        }
      }
    }
  }

  Plan best;
  int ba = -1, bb = -1;
  for (int a = 0; a <= n; ++a) {
    if ((h == 1) != (a == s)) continue;
    for (int b = 0; b < n; ++b) {
      if (cost[h][idx(a, b)] < best.cost) {
        best.cost = cost[h][idx(a, b)];
        ba = a;
        bb = b;
      }
    }
  }
  if (ba < 0) return best;
  std::vector<int> lats(static_cast<std::size_t>(h) + 1);
  lats[h] = bb;
  lats[h - 1] = ba;
  for (int k = h; k >= 2; --k) {
    const int prev = back[k][idx(lats[k - 1], lats[k])];
    lats[k - 2] = prev < 0 ? s : prev;
  }
  best.traj.waypoints.resize(static_cast<std::size_t>(h));
  for (int k = 1; k <= h; ++k) best.traj.waypoints[k - 1] = nodes[k][lats[k - 1]][lats[k]].wp;
  return best;
}

}  // namespace

codec::Trajectory expert_plan(const Scene& scene, const SimConfig& cfg) {
  const auto accels = profile_accels(cfg);
  std::vector<Lattice> lattices;
  std::vector<NodeTable> tables;
  for (double a : accels) {
    lattices.emplace_back(scene, cfg, a);
    tables.push_back(build_nodes(lattices.back()));
  }
  constexpr std::array<std::pair<bool, bool>, 4> kClasses = {
      {{true, true}, {true, false}, {false, true}, {false, false}}};
  for (const auto& [ttc, comfort] : kClasses) {
    Plan best;
    for (std::size_t p = 0; p < accels.size(); ++p) {
      Plan plan = solve(lattices[p], tables[p], scene, cfg, ttc, comfort);
      plan.cost += cfg.w_speed * accels[p] * accels[p] * scene.waypoints;
      if (plan.cost < best.cost) best = std::move(plan);
    }
    if (best.cost < kInf) return best.traj;
  }
  throw InfeasibleError("expert_plan: no collision-free corridor-compliant lattice path");
}

std::vector<codec::Trajectory> enumerate_lattice(const Scene& scene, const SimConfig& cfg) {
  std::vector<codec::Trajectory> out;
  for (double a : profile_accels(cfg)) {
    const Lattice lat(scene, cfg, a);
    const int h = lat.horizon(), n = lat.width();
    std::vector<int> seq(static_cast<std::size_t>(h), 0);
    while (true) {
      codec::Trajectory t;
      int prev = lat.start();
      for (int k = 1; k <= h; ++k) {
        t.waypoints.push_back(lat.node(k, prev, seq[k - 1]).wp);
        prev = seq[k - 1];
      }
      out.push_back(std::move(t));
      int pos = h - 1;
      while (pos >= 0 && ++seq[pos] == n) seq[pos--] = 0;
      if (pos < 0) break;
    }
  }
  return out;
}

}  // namespace mdplan::sim
