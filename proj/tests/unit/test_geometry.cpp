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
#include "lidargait/rng.hpp"
#include "lidargait/synth.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

namespace lidargait {
namespace {

bool is_subset(const PointFrame& sub, const PointFrame& super)
{
  auto key = [](const Point3& p) { return std::tuple(p.x, p.y, p.z); };
  std::multiset<std::tuple<double, double, double>> pool;
  for (const auto& p : super.points)
    pool.insert(key(p));
  for (const auto& p : sub.points)
  {
    auto it = pool.find(key(p));
    if (it == pool.end())
      return false;
    pool.erase(it);
  }
  return true;
}

PointFrame blob(Point3 c, int n, double spread, std::uint64_t seed)
{
  Xorshift64Star rng(seed);
  PointFrame f;
  for (int i = 0; i < n; ++i)
    f.points.push_back({c.x + rng.uniform(-spread, spread), c.y + rng.uniform(-spread, spread),
                        c.z + rng.uniform(-spread, spread)});
  return f;
}

TEST(Labels, AttributeNamesRoundTrip)
{
  for (Attribute a : kAllAttributes)
  {
    EXPECT_EQ(parse_attribute(attribute_name(a)), a);
    EXPECT_EQ(parse_attribute(attribute_label(a)), a);
  }
  EXPECT_FALSE(parse_attribute("backpack").has_value());
  EXPECT_EQ(parse_distance("far"), DistanceTag::Far);
  EXPECT_FALSE(parse_distance("mid").has_value());
}

TEST(GaitSequence, ValidateRejectsEmptyAndNonMonotoneFrames)
{
  GaitSequence s;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.frames.resize(2);
  s.frames[0].timestamp = 0.1;
  s.frames[1].timestamp = 0.1;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.frames[1].timestamp = 0.2;
  EXPECT_NO_THROW(s.validate());
}

TEST(CropRoi, KeepsOnlyPointsInTheReleasedArea)
{
  PointFrame f;
  f.points = {{-8, 0, 0}, {0, 0, 0}};
  const auto out = crop_roi(f, Region3::released_area());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.points[0], (Point3{-8, 0, 0}));
}

TEST(CropRoi, BoundaryIsClosed)
{
  PointFrame f;
  f.points = {{-12, -3, -2}, {-5, 3, 3}, {-4.999, 0, 0}};
  EXPECT_EQ(crop_roi(f, Region3::released_area()).size(), 2u);
}

TEST(CropRoi, EmptyFrameStaysEmpty)
{
  EXPECT_TRUE(crop_roi(PointFrame{}, Region3::released_area()).empty());
}

TEST(CropRoi, SupersetRegionIsIdentity)
{
  const PointFrame f = testing::random_frame(3, 1000, 10.0);
  const Region3 cube{-10, 10, -10, 10, -10, 10};
  EXPECT_EQ(crop_roi(f, cube).points, f.points);
}

TEST(CropRoi, IdempotentAndOrderPreserving)
{
  const PointFrame f = testing::random_frame(4, 2000, 10.0);
  const Region3 r{-3, 6, -2, 2, -1, 4};
  const auto once = crop_roi(f, r);
  EXPECT_EQ(crop_roi(once, r).points, once.points);
  std::size_t j = 0;
  for (const auto& p : f.points)
    if (j < once.size() && once.points[j] == p)
      ++j;
  EXPECT_EQ(j, once.size());
}

TEST(CropRoi, RejectsInvalidRegion)
{
  EXPECT_THROW(crop_roi(PointFrame{}, Region3{1, 0, 0, 1, 0, 1}), std::invalid_argument);
}

TEST(RemoveGround, SeparatedStrata)
{
  PointFrame f;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      f.points.push_back({5.0 + 0.05 * i, -0.5 + 0.05 * j, 0.0});
  const PointFrame body = blob({5.5, 0.0, 1.05}, 200, 0.75, 7);
  f.points.insert(f.points.end(), body.points.begin(), body.points.end());
  const auto out = remove_ground(f);
  EXPECT_EQ(out.points, body.points);
}

TEST(RemoveGround, TooFewPointsUnchanged)
{
  PointFrame f;
  f.points = {{1, 0, 0}, {1, 0, 1}, {1, 0, 2}, {1, 0, 3}, {1, 0, 4}};
  EXPECT_EQ(remove_ground(f).points, f.points);
}

TEST(RemoveGround, ThinSingleStratumUnchanged)
{
  PointFrame f = blob({6, 0, 0.5}, 300, 0.5, 2);
  for (auto& p : f.points)
    p.z = 0.5 + 0.1 * (p.z - 0.5);
  EXPECT_EQ(remove_ground(f).points, f.points);
}

TEST(RemoveGround, PlaneBelowSensorWithCapsuleBody)
{
  // Known labels: plane points at z = -1.7, body points from a scanned capsule
  // standing on it.
  const Capsule body{{7.0, 0.0, -1.7 + 0.2}, {7.0, 0.0, 0.0}, 0.2};
  PointFrame f;
  std::set<std::tuple<double, double, double>> plane;
  for (int i = -40; i <= 40; ++i)
    for (int j = -40; j <= 40; ++j)
    {
      const Point3 p{7.0 + 0.05 * i, 0.05 * j, -1.7};
      if (std::hypot(p.x - 7.0, p.y) > 0.2)
      {
        f.points.push_back(p);
        plane.insert({p.x, p.y, p.z});
      }
    }
  std::vector<Shape> shapes = {body};
  const PointFrame scan = scan_shapes(shapes, LidarModel{});
  ASSERT_GT(scan.size(), 100u);
  f.points.insert(f.points.end(), scan.points.begin(), scan.points.end());
  const auto out = remove_ground(f);
  std::size_t plane_left = 0, body_left = 0;
  for (const auto& p : out.points)
    (plane.count({p.x, p.y, p.z}) ? plane_left : body_left)++;
  EXPECT_LE(static_cast<double>(plane_left), 0.01 * static_cast<double>(plane.size()));
  std::size_t body_above = 0;
  for (const auto& p : scan.points)
    body_above += p.z >= -1.7 + kDefaultGroundLift + 1e-9;
  EXPECT_EQ(body_left, body_above);
  EXPECT_GT(body_left, scan.size() * 9 / 10);
}

TEST(Denoise, EmptyStaysEmpty)
{
  EXPECT_TRUE(denoise(PointFrame{}).empty());
}

TEST(Denoise, SingleClusterUnchanged)
{
  const PointFrame f = blob({6, 0, 0}, 500, 0.4, 1);
  EXPECT_EQ(denoise(f).points, f.points);
}

TEST(Denoise, RemovesIsolatedPoint)
{
  PointFrame f = blob({6, 0, 0}, 500, 0.4, 1);
  const PointFrame body = f;
  f.points.push_back({6, 5, 0});
  EXPECT_EQ(denoise(f).points, body.points);
}

TEST(Denoise, EqualClustersKeepTheNearerOne)
{
  PointFrame f;
  for (int i = 0; i < 10; ++i)
  {
    f.points.push_back({6.0 + 0.01 * i, 0.0, 0.0});
    f.points.push_back({9.0 + 0.01 * i, 0.0, 0.0});
  }
  const auto out = denoise(f);
  ASSERT_EQ(out.size(), 10u);
  for (const auto& p : out.points)
    EXPECT_LT(p.x, 7.0);
}

TEST(Denoise, OutputIsOneComponentAndSubset)
{
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
  {
    const PointFrame f = testing::random_frame(seed, 400, 3.0);
    const auto out = denoise(f);
    EXPECT_TRUE(is_subset(out, f));
    const auto labels = voxel_clusters(out, kDefaultDenoiseCell);
    EXPECT_TRUE(std::all_of(labels.begin(), labels.end(), [&](int l) { return l == labels.front(); }));
    const auto cropped = crop_roi(out, Region3{-1, 1, -1, 1, -1, 1});
    EXPECT_TRUE(is_subset(cropped, f));
  }
}

TEST(Denoise, DiagonalNeighboursConnect)
{
  PointFrame f;
  f.points = {{0.05, 0.05, 0.05}, {0.35, 0.35, 0.35}, {0.65, 0.65, 0.65}, {5, 5, 5}};
  EXPECT_EQ(denoise(f).size(), 3u);
}

TEST(Denoise, RejectsNonPositiveCell)
{
  EXPECT_THROW(denoise(PointFrame{}, 0.0), std::invalid_argument);
}

} // namespace
} // namespace lidargait
