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

#ifndef MDPLAN_SIM_GEOMETRY_HPP_
#define MDPLAN_SIM_GEOMETRY_HPP_

#include <cmath>
#include <vector>

namespace mdplan::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 unit(double heading) { return {std::cos(heading), std::sin(heading)}; }
inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}
/// Wraps an angle in radians into (-pi, pi].
double wrap_angle(double a);

struct OrientedBox {
  Vec2 center;
  double heading = 0.0;  // radians
  double length = 0.0;   // along heading
  double width = 0.0;

  bool contains(Vec2 p) const;
  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;
};

/// Separating-axis test; touching boxes count as intersecting.
bool boxes_intersect(const OrientedBox& a, const OrientedBox& b);

/// Piecewise-linear path parameterized by arc length.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  struct Projection {
    double s = 0.0;        // arc length of the closest point
    double lateral = 0.0;  // signed distance, positive to the left
    double distance = 0.0;
  };

  Projection project(Vec2 p) const;
  Vec2 point_at(double s) const;
  double heading_at(double s) const;
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  const std::vector<Vec2>& points() const { return points_; }

 private:
  std::size_t segment_at(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

}  // namespace mdplan::sim

#endif  // MDPLAN_SIM_GEOMETRY_HPP_
