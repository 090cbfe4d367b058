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

#include <doctest.h>

#include <cmath>
#include <random>

#include "codec/token_codec.hpp"

using namespace mdplan::codec;

namespace {

// Independent bin search: the bin whose half-open interval contains v,
// found by scanning every edge.
int scan_bin(double v, double lo, double hi, int bins) {
  for (int b = 0; b < bins; ++b) {
    const double left = lo + (hi - lo) * b / bins, right = lo + (hi - lo) * (b + 1) / bins;
    if (v >= left && (v < right || b == bins - 1)) return b;
  }
  return -1;
}

}  // namespace

TEST_CASE("codec defaults give the expected vocabulary layout") {
  CodecConfig cfg;
  CHECK(cfg.vocab_size() == 8 + 4000 + 1800);
  CHECK(cfg.response_length() == 24);
  CHECK(cfg.resolution(Axis::kSpatial) == doctest::Approx(0.05));
  CHECK(cfg.resolution(Axis::kHeading) == doctest::Approx(0.1));
  CHECK(cfg.slot_first_id(0) == 8);
  CHECK(cfg.slot_first_id(1) == 8);
  CHECK(cfg.slot_first_id(2) == 8 + 4000);
}

TEST_CASE("bin boundaries and centers") {
  CodecConfig cfg;
  CHECK(encode_coord(-100.0, Axis::kSpatial, cfg) == 0);
  CHECK(encode_coord(0.0, Axis::kSpatial, cfg) == 2000);
  CHECK(encode_coord(0.0, Axis::kHeading, cfg) == 900);
  CHECK(scan_bin(0.0, -100, 100, 4000) == 2000);
  CHECK(scan_bin(0.0, -90, 90, 1800) == 900);
  CHECK(encode_coord(100.0, Axis::kSpatial, cfg) == 3999);
  CHECK(encode_coord(250.0, Axis::kSpatial, cfg) == 3999);
  CHECK(encode_coord(-250.0, Axis::kSpatial, cfg) == 0);
  CHECK(decode_bin(0, Axis::kSpatial, cfg) == doctest::Approx(-99.975).epsilon(1e-12));
  CHECK(decode_bin(2000, Axis::kSpatial, cfg) == doctest::Approx(0.025).epsilon(1e-9));
  CHECK(decode_bin(1799, Axis::kHeading, cfg) == doctest::Approx(89.95).epsilon(1e-12));
  CHECK_THROWS_AS(decode_bin(4000, Axis::kSpatial, cfg), CodecError);
}

TEST_CASE("encode agrees with an edge scan at every bin center and edge") {
  CodecConfig cfg;
  for (Axis axis : {Axis::kSpatial, Axis::kHeading}) {
    const int bins = cfg.bins(axis);
    const double lo = cfg.min(axis), hi = cfg.max(axis), w = cfg.resolution(axis);
    for (int b = 0; b < bins; ++b) {
      const double center = lo + (b + 0.5) * w;
      REQUIRE(encode_coord(center, axis, cfg) == b);
      REQUIRE(scan_bin(center, lo, hi, bins) == b);
      const double left_inside = lo + (hi - lo) * b / bins + 1e-9;
      REQUIRE(encode_coord(left_inside, axis, cfg) == b);
      REQUIRE(scan_bin(left_inside, lo, hi, bins) == b);
    }
  }
}

TEST_CASE("single waypoint at the origin") {
  CodecConfig cfg;
  cfg.waypoints = 1;
  const auto ids = encode_trajectory(Trajectory{{{0.0, 0.0, 0.0}}}, cfg);
  REQUIRE(ids.size() == 3);
  CHECK(ids[0] == 8 + 2000);
  CHECK(ids[1] == 8 + 2000);
  CHECK(ids[2] == 8 + 4000 + 900);
}

TEST_CASE("all-minimum waypoints map to the first id of each slot") {
  CodecConfig cfg;
  Trajectory t;
  for (int i = 0; i < cfg.waypoints; ++i) t.waypoints.push_back({-100.0, -100.0, -90.0});
  const auto ids = encode_trajectory(t, cfg);
  for (std::size_t p = 0; p < ids.size(); ++p) CHECK(ids[p] == cfg.slot_first_id(p));
}

TEST_CASE("round trip stays within half a bin on random trajectories") {
  CodecConfig cfg;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xy(-100.0, 100.0), hd(-90.0, 90.0);
  double worst_xy = 0.0, worst_h = 0.0;
  for (int n = 0; n < 10000; ++n) {
    Trajectory t;
    for (int i = 0; i < cfg.waypoints; ++i) t.waypoints.push_back({xy(rng), xy(rng), hd(rng)});
    const Trajectory back = decode_trajectory(encode_trajectory(t, cfg), cfg);
    for (int i = 0; i < cfg.waypoints; ++i) {
      worst_xy = std::max({worst_xy, std::abs(back.waypoints[i].x - t.waypoints[i].x),
                           std::abs(back.waypoints[i].y - t.waypoints[i].y)});
      worst_h = std::max(worst_h, std::abs(back.waypoints[i].heading - t.waypoints[i].heading));
    }
  }
  CHECK(worst_xy <= 0.025 + 1e-9);
  CHECK(worst_h <= 0.05 + 1e-9);
}

TEST_CASE("decode rejects masks, wrong lengths and cross-slot ids") {
  CodecConfig cfg;
  auto ids = encode_trajectory(Trajectory{std::vector<Waypoint>(8)}, cfg);
  auto masked = ids;
  masked[5] = special::kMask;
  CHECK_THROWS_AS(decode_trajectory(masked, cfg), CodecError);
  CHECK_THROWS_AS(decode_trajectory(std::span<const TokenId>(ids).first(23), cfg), CodecError);
  auto swapped = ids;
  swapped[2] = cfg.spatial_offset() + 10;  // spatial id in a heading slot
  try {
    decode_trajectory(swapped, cfg);
    FAIL("expected a decode error");
  } catch (const DecodeError& e) {
    CHECK(e.position() == 2);
  }
  Trajectory out;
  CHECK_FALSE(try_decode_trajectory(swapped, cfg, &out));
  CHECK(try_decode_trajectory(ids, cfg, &out));
}

TEST_CASE("clamping wraps headings and saturates coordinates") {
  CodecConfig cfg;
  CHECK(clamp_to_range(500.0, Axis::kSpatial, cfg) == 100.0);
  CHECK(clamp_to_range(-500.0, Axis::kSpatial, cfg) == -100.0);
  CHECK(clamp_to_range(120.0, Axis::kHeading, cfg) == 90.0);
  CHECK_THROWS_AS(encode_coord(NAN, Axis::kSpatial, cfg), CodecError);
}

TEST_CASE("invalid configurations are rejected") {
  CodecConfig cfg;
  cfg.spatial_bins = 1;
  CHECK_THROWS_AS(cfg.validate(), CodecError);
  cfg = CodecConfig{};
  cfg.spatial_min = 5;
  cfg.spatial_max = 5;
  CHECK_THROWS_AS(cfg.validate(), CodecError);
  cfg = CodecConfig{};
  cfg.base_vocab_size = 3;
  CHECK_THROWS_AS(cfg.validate(), CodecError);
}
