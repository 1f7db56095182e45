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

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lidargait {

/// Sensor-frame point in meters: x forward, y left, z up.
struct Point3
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;

  Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Point3& o) const { return x * o.x + y * o.y + z * o.z; }
  Point3 cross(const Point3& o) const { return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x}; }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

/// One LiDAR sweep.
struct PointFrame
{
  std::vector<Point3> points;
  double timestamp = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

enum class Attribute
{
  Normal,
  Bag,
  Clothing,
  Carrying,
  Umbrella,
  Uniform,
  Occlusion,
  Night
};

inline constexpr std::array<Attribute, 8> kAllAttributes = {
  Attribute::Normal,   Attribute::Bag,     Attribute::Clothing,  Attribute::Carrying,
  Attribute::Umbrella, Attribute::Uniform, Attribute::Occlusion, Attribute::Night};

/// Lower-case name used in directory names, manifests and CLI flags.
std::string_view attribute_name(Attribute a);
/// Title-case column label ("Bag", "Occlusion", ...).
std::string_view attribute_label(Attribute a);
std::optional<Attribute> parse_attribute(std::string_view name);

enum class DistanceTag
{
  Near,
  Far
};

std::string_view distance_name(DistanceTag d);
std::optional<DistanceTag> parse_distance(std::string_view name);

/// Twelve walking directions, 30 degrees apart.
inline constexpr std::array<int, 12> kViewAngles = {0, 30, 60, 90, 120, 150, 180, 210, 240, 270, 300, 330};

struct GaitSequence
{
  std::vector<PointFrame> frames;
  std::string identity;
  int view_deg = 0;
  Attribute attribute = Attribute::Normal;
  DistanceTag distance = DistanceTag::Near;

  /// Throws std::invalid_argument if frames are empty or timestamps do not increase.
  void validate() const;
};

/// Closed axis-aligned box in sensor coordinates.
struct Region3
{
  double x_min, x_max;
  double y_min, y_max;
  double z_min, z_max;

  bool valid() const { return x_min < x_max && y_min < y_max && z_min < z_max; }
  bool contains(const Point3& p) const
  {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max && p.z >= z_min && p.z <= z_max;
  }

  /// The released SUSTech1K area: X [-12, -5], Y [-3, 3], Z [-2, 3] meters.
  static Region3 released_area() { return {-12.0, -5.0, -3.0, 3.0, -2.0, 3.0}; }
  /// Area covering every walking path of the built-in simulator.
  static Region3 synthetic_area() { return {2.0, 16.0, -8.0, 8.0, -2.0, 3.0}; }
};

/// Points inside the closed region, input order preserved.
PointFrame crop_roi(const PointFrame& frame, const Region3& region);

inline constexpr double kDefaultGroundLift = 0.15;
inline constexpr std::size_t kMinGroundEstimatePoints = 20;

/// Drops everything below (5th percentile of z) + lift. Frames with fewer than
/// 20 points are returned unchanged.
PointFrame remove_ground(const PointFrame& frame, double lift = kDefaultGroundLift);

inline constexpr double kDefaultDenoiseCell = 0.3;

/// Keeps the largest 26-connected cluster of occupied voxels. Equal-size
/// clusters are resolved in favour of the one whose centroid is closest to
/// the sensor origin.
PointFrame denoise(const PointFrame& frame, double cell = kDefaultDenoiseCell);

/// Cluster id per point under the same voxel adjacency `denoise` uses.
std::vector<int> voxel_clusters(const PointFrame& frame, double cell);

} // namespace lidargait
