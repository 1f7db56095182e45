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

#include "lidargait/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace lidargait {

namespace {

struct AttributeNames
{
  Attribute value;
  std::string_view name;
  std::string_view label;
};

constexpr std::array<AttributeNames, 8> kAttributeNames = {{
  {Attribute::Normal, "normal", "Normal"},
  {Attribute::Bag, "bag", "Bag"},
  {Attribute::Clothing, "clothing", "Clothing"},
  {Attribute::Carrying, "carrying", "Carrying"},
  {Attribute::Umbrella, "umbrella", "Umbrella"},
  {Attribute::Uniform, "uniform", "Uniform"},
  {Attribute::Occlusion, "occlusion", "Occlusion"},
  {Attribute::Night, "night", "Night"},
}};

struct VoxelKey
{
  std::int64_t x, y, z;
  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
};

struct VoxelKeyHash
{
  std::size_t operator()(const VoxelKey& k) const noexcept
  {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

class DisjointSets
{
public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i)
  {
    while (parent_[i] != i)
    {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b)
  {
    a = find(a);
    b = find(b);
    if (a != b)
      parent_[std::max(a, b)] = std::min(a, b);
  }

private:
  std::vector<std::size_t> parent_;
};

} // namespace

std::string_view attribute_name(Attribute a)
{
  return kAttributeNames[static_cast<std::size_t>(a)].name;
}

std::string_view attribute_label(Attribute a)
{
  return kAttributeNames[static_cast<std::size_t>(a)].label;
}

std::optional<Attribute> parse_attribute(std::string_view name)
{
  for (const auto& n : kAttributeNames)
    if (n.name == name || n.label == name)
      return n.value;
  return std::nullopt;
}

std::string_view distance_name(DistanceTag d)
{
  return d == DistanceTag::Near ? "near" : "far";
}

std::optional<DistanceTag> parse_distance(std::string_view name)
{
  if (name == "near")
    return DistanceTag::Near;
  if (name == "far")
    return DistanceTag::Far;
  return std::nullopt;
}

void GaitSequence::validate() const
{
  if (frames.empty())
    throw std::invalid_argument("gait sequence has no frames");
  for (std::size_t i = 1; i < frames.size(); ++i)
    if (!(frames[i].timestamp > frames[i - 1].timestamp))
      throw std::invalid_argument("gait sequence timestamps are not strictly increasing");
}

PointFrame crop_roi(const PointFrame& frame, const Region3& region)
{
  if (!region.valid())
    throw std::invalid_argument("crop_roi: region bounds must satisfy min < max on every axis");
  PointFrame out;
  out.timestamp = frame.timestamp;
  out.points.reserve(frame.points.size());
  std::copy_if(frame.points.begin(), frame.points.end(), std::back_inserter(out.points),
               [&](const Point3& p) { return region.contains(p); });
  return out;
}

PointFrame remove_ground(const PointFrame& frame, double lift)
{
  if (!(lift > 0.0))
    throw std::invalid_argument("remove_ground: lift must be positive");
  if (frame.points.size() < kMinGroundEstimatePoints)
    return frame;

  std::vector<double> z(frame.points.size());
  std::transform(frame.points.begin(), frame.points.end(), z.begin(), [](const Point3& p) { return p.z; });
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  // A single stratum thinner than the lift has no separable ground.
  if (*hi - *lo < lift)
    return frame;

  // Lower nearest-rank 5th percentile.
  const std::size_t rank = static_cast<std::size_t>(0.05 * static_cast<double>(z.size() - 1));
  std::nth_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(rank), z.end());
  const double threshold = z[rank] + lift;

  PointFrame out;
  out.timestamp = frame.timestamp;
  out.points.reserve(frame.points.size());
  std::copy_if(frame.points.begin(), frame.points.end(), std::back_inserter(out.points),
               [&](const Point3& p) { return p.z >= threshold; });
  return out;
}

std::vector<int> voxel_clusters(const PointFrame& frame, double cell)
{
  if (!(cell > 0.0))
    throw std::invalid_argument("voxel cell size must be positive");

  std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> voxels;
  std::vector<std::size_t> point_voxel(frame.points.size());
  std::vector<VoxelKey> keys;
  for (std::size_t i = 0; i < frame.points.size(); ++i)
  {
    const Point3& p = frame.points[i];
    const VoxelKey key{static_cast<std::int64_t>(std::floor(p.x / cell)),
                       static_cast<std::int64_t>(std::floor(p.y / cell)),
                       static_cast<std::int64_t>(std::floor(p.z / cell))};
    auto [it, inserted] = voxels.try_emplace(key, keys.size());
    if (inserted)
      keys.push_back(key);
    point_voxel[i] = it->second;
  }

  DisjointSets sets(keys.size());
  for (std::size_t v = 0; v < keys.size(); ++v)
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -1; dz <= 1; ++dz)
        {
          if (dx == 0 && dy == 0 && dz == 0)
            continue;
          auto it = voxels.find({keys[v].x + dx, keys[v].y + dy, keys[v].z + dz});
          if (it != voxels.end())
            sets.unite(v, it->second);
        }

  // Relabel roots densely in first-seen order.
  std::unordered_map<std::size_t, int> label_of_root;
  std::vector<int> labels(frame.points.size());
  for (std::size_t i = 0; i < frame.points.size(); ++i)
  {
    const std::size_t root = sets.find(point_voxel[i]);
    auto [it, inserted] = label_of_root.try_emplace(root, static_cast<int>(label_of_root.size()));
    labels[i] = it->second;
  }
  return labels;
}

PointFrame denoise(const PointFrame& frame, double cell)
{
  if (!(cell > 0.0))
    throw std::invalid_argument("denoise: cell must be positive");
  if (frame.points.empty())
    return frame;

  const std::vector<int> labels = voxel_clusters(frame, cell);
  const int n_clusters = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::size_t> count(static_cast<std::size_t>(n_clusters), 0);
  std::vector<Point3> sum(static_cast<std::size_t>(n_clusters));
  for (std::size_t i = 0; i < labels.size(); ++i)
  {
    const auto l = static_cast<std::size_t>(labels[i]);
    ++count[l];
    sum[l] = sum[l] + frame.points[i];
  }

  std::size_t best = 0;
  double best_range = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < count.size(); ++c)
  {
    const double range = (sum[c] * (1.0 / static_cast<double>(count[c]))).norm();
    if (count[c] > count[best] || (count[c] == count[best] && range < best_range))
    {
      best = c;
      best_range = range;
    }
  }

  PointFrame out;
  out.timestamp = frame.timestamp;
  out.points.reserve(count[best]);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (static_cast<std::size_t>(labels[i]) == best)
      out.points.push_back(frame.points[i]);
  return out;
}

} // namespace lidargait
