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

#ifndef MDPLAN_CODEC_TOKEN_CODEC_HPP_
#define MDPLAN_CODEC_TOKEN_CODEC_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdplan::codec {

using TokenId = std::int32_t;

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by decode_trajectory when a response token does not belong to the
/// sub-vocabulary of its slot. `position` is the index into the response.
class DecodeError : public CodecError {
 public:
  DecodeError(std::size_t position, const std::string& what)
      : CodecError(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Fixed special-token ids. Everything below base_vocab_size is reserved for
// these and for future context tokens.
namespace special {
inline constexpr TokenId kPad = 0;
inline constexpr TokenId kMask = 1;
inline constexpr TokenId kBos = 2;
inline constexpr TokenId kCommandStraight = 3;
inline constexpr TokenId kCommandLeft = 4;
inline constexpr TokenId kCommandRight = 5;
}  // namespace special

enum class Axis { kSpatial, kHeading };

struct CodecConfig {
  double spatial_min = -100.0;
  double spatial_max = 100.0;
  int spatial_bins = 4000;
  double heading_min = -90.0;  // degrees
  double heading_max = 90.0;
  int heading_bins = 1800;
  int waypoints = 8;  // H
  double dt = 0.5;    // seconds between waypoints
  int base_vocab_size = 8;

  /// Throws CodecError when an invariant is violated.
  void validate() const;

  double resolution(Axis axis) const;
  int bins(Axis axis) const { return axis == Axis::kSpatial ? spatial_bins : heading_bins; }
  double min(Axis axis) const { return axis == Axis::kSpatial ? spatial_min : heading_min; }
  double max(Axis axis) const { return axis == Axis::kSpatial ? spatial_max : heading_max; }

  TokenId spatial_offset() const { return base_vocab_size; }
  TokenId heading_offset() const { return base_vocab_size + spatial_bins; }
  int vocab_size() const { return base_vocab_size + spatial_bins + heading_bins; }
  int response_length() const { return 3 * waypoints; }

  /// Axis of response slot `position` (x, y, heading repeating).
  static Axis slot_axis(std::size_t position) {
    return position % 3 == 2 ? Axis::kHeading : Axis::kSpatial;
  }
  /// First global id of the slot's sub-vocabulary and its size.
  TokenId slot_first_id(std::size_t position) const;
  int slot_size(std::size_t position) const { return bins(slot_axis(position)); }
  bool in_slot_vocab(std::size_t position, TokenId id) const;
};

struct Waypoint {
  double x = 0.0;        // meters, ego frame, forward
  double y = 0.0;        // meters, ego frame, left
  double heading = 0.0;  // degrees, relative to initial ego heading

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct Trajectory {
  std::vector<Waypoint> waypoints;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Wraps headings into (-180, 180] and clamps every coordinate into the
/// codec's closed range for its axis.
double clamp_to_range(double value, Axis axis, const CodecConfig& cfg);
Trajectory clamp_to_range(const Trajectory& traj, const CodecConfig& cfg);

int encode_coord(double value, Axis axis, const CodecConfig& cfg);
double decode_bin(int bin, Axis axis, const CodecConfig& cfg);

std::vector<TokenId> encode_trajectory(const Trajectory& traj, const CodecConfig& cfg);
Trajectory decode_trajectory(std::span<const TokenId> tokens, const CodecConfig& cfg);

/// Non-throwing decode used by reward code: returns false on any violation.
bool try_decode_trajectory(std::span<const TokenId> tokens, const CodecConfig& cfg,
                           Trajectory* out);

}  // namespace mdplan::codec

#endif  // MDPLAN_CODEC_TOKEN_CODEC_HPP_
