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

#include "codec/token_codec.hpp"

#include <algorithm>
#include <cmath>

namespace mdplan::codec {

void CodecConfig::validate() const {
  if (!(spatial_min < spatial_max)) throw CodecError("codec: spatial_min must be < spatial_max");
  if (!(heading_min < heading_max)) throw CodecError("codec: heading_min must be < heading_max");
  if (spatial_bins < 2) throw CodecError("codec: spatial_bins must be >= 2");
  if (heading_bins < 2) throw CodecError("codec: heading_bins must be >= 2");
  if (waypoints < 1) throw CodecError("codec: waypoints must be >= 1");
  if (!(dt > 0.0)) throw CodecError("codec: dt must be positive");
  if (base_vocab_size <= special::kCommandRight) {
    throw CodecError("codec: base_vocab_size must cover the special tokens");
  }
}

double CodecConfig::resolution(Axis axis) const {
  return (max(axis) - min(axis)) / bins(axis);
}

TokenId CodecConfig::slot_first_id(std::size_t position) const {
  return slot_axis(position) == Axis::kSpatial ? spatial_offset() : heading_offset();
}

bool CodecConfig::in_slot_vocab(std::size_t position, TokenId id) const {
  const TokenId first = slot_first_id(position);
  return id >= first && id < first + slot_size(position);
}

double clamp_to_range(double value, Axis axis, const CodecConfig& cfg) {
  if (!std::isfinite(value)) throw CodecError("codec: non-finite coordinate");
  if (axis == Axis::kHeading) {
    value = std::remainder(value, 360.0);  // (-180, 180]
    if (value == -180.0) value = 180.0;
  }
  return std::clamp(value, cfg.min(axis), cfg.max(axis));
}

Trajectory clamp_to_range(const Trajectory& traj, const CodecConfig& cfg) {
  Trajectory out = traj;
  for (auto& wp : out.waypoints) {
    wp.x = clamp_to_range(wp.x, Axis::kSpatial, cfg);
    wp.y = clamp_to_range(wp.y, Axis::kSpatial, cfg);
    wp.heading = clamp_to_range(wp.heading, Axis::kHeading, cfg);
  }
  return out;
}

int encode_coord(double value, Axis axis, const CodecConfig& cfg) {
  if (!std::isfinite(value)) throw CodecError("codec: non-finite coordinate");
  const int bins = cfg.bins(axis);
  // Scale before dividing so that exact bin edges (e.g. 0 m) stay exact.
  const double scaled = (value - cfg.min(axis)) * bins / (cfg.max(axis) - cfg.min(axis));
  const double bin = std::floor(scaled);
  if (bin < 0.0) return 0;
  if (bin > bins - 1) return bins - 1;
  return static_cast<int>(bin);
}

double decode_bin(int bin, Axis axis, const CodecConfig& cfg) {
  if (bin < 0 || bin >= cfg.bins(axis)) {
    throw CodecError("codec: bin " + std::to_string(bin) + " out of range [0, " +
                     std::to_string(cfg.bins(axis)) + ")");
  }
  return cfg.min(axis) + (bin + 0.5) * cfg.resolution(axis);
}

std::vector<TokenId> encode_trajectory(const Trajectory& traj, const CodecConfig& cfg) {
  if (traj.waypoints.size() != static_cast<std::size_t>(cfg.waypoints)) {
    throw CodecError("codec: trajectory has " + std::to_string(traj.waypoints.size()) +
                     " waypoints, expected " + std::to_string(cfg.waypoints));
  }
  std::vector<TokenId> tokens;
  tokens.reserve(cfg.response_length());
  for (const auto& wp : traj.waypoints) {
    tokens.push_back(cfg.spatial_offset() + encode_coord(wp.x, Axis::kSpatial, cfg));
    tokens.push_back(cfg.spatial_offset() + encode_coord(wp.y, Axis::kSpatial, cfg));
    tokens.push_back(cfg.heading_offset() + encode_coord(wp.heading, Axis::kHeading, cfg));
  }
  return tokens;
}

Trajectory decode_trajectory(std::span<const TokenId> tokens, const CodecConfig& cfg) {
  if (tokens.size() != static_cast<std::size_t>(cfg.response_length())) {
    throw CodecError("codec: response has " + std::to_string(tokens.size()) +
                     " tokens, expected " + std::to_string(cfg.response_length()));
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == special::kMask) {
      throw CodecError("codec: response still holds [MASK] at position " + std::to_string(i));
    }
  }
  Trajectory traj;
  traj.waypoints.resize(cfg.waypoints);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!cfg.in_slot_vocab(i, tokens[i])) {
      throw DecodeError(i, "codec: token " + std::to_string(tokens[i]) + " at position " +
                               std::to_string(i) + " is outside its sub-vocabulary");
    }
    const Axis axis = CodecConfig::slot_axis(i);
    const double v = decode_bin(tokens[i] - cfg.slot_first_id(i), axis, cfg);
    auto& wp = traj.waypoints[i / 3];
    switch (i % 3) {
      case 0: wp.x = v; break;
      case 1: wp.y = v; break;
      default: wp.heading = v; break;
    }
  }
  return traj;
}

bool try_decode_trajectory(std::span<const TokenId> tokens, const CodecConfig& cfg,
                           Trajectory* out) {
  try {
    *out = decode_trajectory(tokens, cfg);
    return true;
  } catch (const CodecError&) {
    return false;
  }
}

}  // namespace mdplan::codec
