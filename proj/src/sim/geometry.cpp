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

#include "sim/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mdplan::sim {

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

bool OrientedBox::contains(Vec2 p) const {
  const Vec2 d = rotate(p - center, -heading);
  return std::abs(d.x) <= 0.5 * length && std::abs(d.y) <= 0.5 * width;
}

namespace {

std::array<Vec2, 4> corners(const OrientedBox& b) {
  const Vec2 f = unit(b.heading) * (0.5 * b.length);
  const Vec2 l = unit(b.heading + 0.5 * std::numbers::pi) * (0.5 * b.width);
  return {b.center + f + l, b.center + f - l, b.center - f - l, b.center - f + l};
}

bool separated_along(Vec2 axis, const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  double amin = std::numeric_limits<double>::infinity(), amax = -amin;
  double bmin = amin, bmax = -amin;
  for (const auto& p : a) {
    const double v = axis.dot(p);
    amin = std::min(amin, v);
    amax = std::max(amax, v);
  }
  for (const auto& p : b) {
    const double v = axis.dot(p);
    bmin = std::min(bmin, v);
    bmax = std::max(bmax, v);
  }
  return amax < bmin || bmax < amin;
}

}  // namespace

bool boxes_intersect(const OrientedBox& a, const OrientedBox& b) {
  // Bounding-circle early out.
  const double ra = 0.5 * std::hypot(a.length, a.width);
  const double rb = 0.5 * std::hypot(b.length, b.width);
  if ((a.center - b.center).norm() > ra + rb) return false;
  const auto ca = corners(a);
  const auto cb = corners(b);
  for (double h : {a.heading, a.heading + 0.5 * std::numbers::pi, b.heading,
                   b.heading + 0.5 * std::numbers::pi}) {
    if (separated_along(unit(h), ca, cb)) return false;
  }
  return true;
}

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("polyline needs at least two points");
  cumulative_.resize(points_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + (points_[i] - points_[i - 1]).norm();
  }
}

Polyline::Projection Polyline::project(Vec2 p) const {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 a = points_[i];
    const Vec2 seg = points_[i + 1] - a;
    const double len2 = seg.dot(seg);
    double u = len2 > 0.0 ? (p - a).dot(seg) / len2 : 0.0;
    // The first and last segments extend indefinitely so that points beyond
    // the ends still get a meaningful arc coordinate.
    if (i > 0) u = std::max(u, 0.0);
    if (i + 2 < points_.size()) u = std::min(u, 1.0);
    const Vec2 q = a + seg * u;
    const double dist = (p - q).norm();
    if (dist < best.distance) {
      const double seg_len = std::sqrt(len2);
      best.distance = dist;
      best.s = cumulative_[i] + u * seg_len;
      best.lateral = seg_len > 0.0 ? seg.cross(p - a) / seg_len : 0.0;
    }
  }
  return best;
}

std::size_t Polyline::segment_at(double s) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t i = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  return std::min(i, points_.size() - 2);
}

Vec2 Polyline::point_at(double s) const {
  const std::size_t i = segment_at(s);
  const Vec2 seg = points_[i + 1] - points_[i];
  const double len = cumulative_[i + 1] - cumulative_[i];
  const double u = len > 0.0 ? (s - cumulative_[i]) / len : 0.0;
  return points_[i] + seg * u;
}

double Polyline::heading_at(double s) const {
  const std::size_t i = segment_at(s);
  const Vec2 seg = points_[i + 1] - points_[i];
  return std::atan2(seg.y, seg.x);
}

}  // namespace mdplan::sim
