//==============================================================================
// Copyright 2026 The lidargait Authors
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
//==============================================================================

#pragma once

#include "lidargait/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

namespace lidargait {

/// Per-identity body and gait parameters. Every field is drawn uniformly from
/// the range documented next to it.
struct IdentityProfile
{
  double height = 1.70;           ///< [1.50, 1.90] m
  double leg_ratio = 0.49;        ///< [0.45, 0.53]
  double shoulder_width = 0.43;   ///< [0.36, 0.50] m
  double limb_radius = 0.055;     ///< [0.04, 0.07] m
  double stride_freq = 1.0;       ///< [0.8, 1.2] Hz, gait cycles per second
  double stride_amplitude = 0.45; ///< [0.35, 0.60] rad
  double arm_swing = 0.35;        ///< [0.2, 0.5] rad

  bool valid() const;
  friend bool operator==(const IdentityProfile&, const IdentityProfile&) = default;
};

/// Draws the seven fields in declaration order from Xorshift64Star(seed).
IdentityProfile sample_identity(std::uint64_t seed);

struct LidarModel
{
  double delta_theta = 0.192;
  double delta_phi = 0.2;
  double azimuth_fov = 70.0; ///< total, centred on +x
  double elevation_min = -20.0;
  double elevation_max = 20.0;
  double max_range = 30.0;
  double frame_rate = 10.0;
  double sensor_height = 1.2; ///< mounting height above the ground plane

  void validate() const;
};

struct Capsule
{
  Point3 a;
  Point3 b;
  double radius = 0.0;
};

/// Flat disc (umbrella canopy, ground patch).
struct Disc
{
  Point3 center;
  Point3 normal{0.0, 0.0, 1.0};
  double radius = 0.0;
};

using Shape = std::variant<Capsule, Disc>;

/// Nearest positive ray parameter of origin + t * dir (dir unit length).
std::optional<double> intersect(const Point3& origin, const Point3& dir, const Capsule& c);
std::optional<double> intersect(const Point3& origin, const Point3& dir, const Disc& d);
std::optional<double> intersect(const Point3& origin, const Point3& dir, const Shape& s);

enum class BodyPart
{
  Torso,
  Head,
  UpperArmLeft,
  UpperArmRight,
  ForearmLeft,
  ForearmRight,
  ThighLeft,
  ThighRight,
  ShinLeft,
  ShinRight
};

/// Capsule skeleton in the body frame: origin on the ground below the pelvis,
/// x along the walking direction, y to the subject's left, z up.
struct BodyPose
{
  std::array<Capsule, 10> capsules{};
  std::array<double, 2> thigh_angle{};  ///< left, right; positive swings forward
  std::array<double, 2> knee_flexion{}; ///< left, right
  std::array<double, 2> arm_angle{};    ///< left, right

  const Capsule& part(BodyPart p) const { return capsules[static_cast<std::size_t>(p)]; }
  Point3 right_hand() const { return part(BodyPart::ForearmRight).b; }
  double head_top() const;
  double lowest_point() const;
};

/// Sinusoidal gait at `phase` radians; `limb_scale` multiplies every limb radius.
BodyPose pose_at(const IdentityProfile& profile, double phase, double limb_scale = 1.0);

/// Rotation about z by `yaw` followed by a translation.
struct RigidTransform
{
  double yaw = 0.0;
  Point3 translation;

  Point3 apply(const Point3& p) const;
  Point3 rotate(const Point3& v) const;
};

Capsule transformed(const Capsule& c, const RigidTransform& t);
Disc transformed(const Disc& d, const RigidTransform& t);
Shape transformed(const Shape& s, const RigidTransform& t);

/// One ray per (azimuth, elevation) cell centre of the LiDAR grid; the nearest
/// hit within max_range becomes a point, misses produce nothing.
PointFrame scan_shapes(const std::vector<Shape>& shapes, const LidarModel& lidar);

/// Scans a posed body placed in the sensor frame by `body_to_sensor`.
PointFrame scan_frame(const BodyPose& pose, const RigidTransform& body_to_sensor, const LidarModel& lidar);

struct SequenceOptions
{
  double duration = 3.0;       ///< seconds; frames = round(duration * frame_rate)
  bool ground_patch = true;    ///< disc of ground under the subject's feet
  double ground_radius = 0.6;
  bool occluder = true;        ///< honour Attribute::Occlusion
};

inline constexpr double kNearCrossing = 7.0;
inline constexpr double kFarCrossing = 12.0;

// Occlusion post, placed towards the walking path.
inline constexpr double kOccluderRange = 1.5;   ///< horizontal distance from the sensor
inline constexpr double kOccluderHeight = 1.15; ///< above the ground plane
inline constexpr double kOccluderRadius = 0.15;

/// Walking speed implied by the profile: 4 * leg length * f * sin(amplitude).
double walking_speed(const IdentityProfile& profile);

/// Subject placement at time t for a sequence (for tests and tooling).
RigidTransform body_placement(const IdentityProfile& profile, int view_deg, DistanceTag distance, double t,
                              double mid_time, const LidarModel& lidar);

/// Attribute-specific props attached to a posed body (body frame).
std::vector<Shape> attribute_props(const BodyPose& pose, Attribute attribute);

/// Straight walk whose midpoint crosses the boresight at 7 m (near) or 12 m
/// (far), heading rotated `view_deg` from "towards the sensor". The seed only
/// chooses the initial gait phase.
GaitSequence generate_sequence(const IdentityProfile& profile, int view_deg, DistanceTag distance,
                               Attribute attribute, const LidarModel& lidar, std::uint64_t seed,
                               const SequenceOptions& options = {});

struct DatasetConfig
{
  int n_ids = 2;
  std::vector<Attribute> attributes = {Attribute::Normal};
  std::vector<int> views = {kViewAngles.begin(), kViewAngles.end()};
  int seqs_per_attribute = 1;
  double far_fraction = 0.25; ///< probability a sequence is recorded at the far crossing
  std::uint64_t seed = 0;
  LidarModel lidar;
  SequenceOptions sequence;
  unsigned threads = 0; ///< 0 = hardware concurrency
};

struct DatasetSummary
{
  std::size_t sequences = 0;
  std::size_t frames = 0;
  std::filesystem::path manifest;
};

/// Zero-padded identity label ("0007").
std::string identity_label(int index);

/// Writes PCF1 frames under `root` plus `root/manifest.csv`. Throws on I/O
/// failure after deleting everything it created.
DatasetSummary generate_dataset(const DatasetConfig& cfg, const std::filesystem::path& root);

} // namespace lidargait
