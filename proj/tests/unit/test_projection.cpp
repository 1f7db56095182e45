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

#include "lidargait/projection.hpp"
#include "lidargait/rng.hpp"
#include "lidargait/synth.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace lidargait {
namespace {

PointFrame frame_of(std::vector<Point3> pts)
{
  PointFrame f;
  f.points = std::move(pts);
  return f;
}

PointFrame front_frame(std::uint64_t seed, std::size_t n)
{
  Xorshift64Star rng(seed);
  PointFrame f;
  for (std::size_t i = 0; i < n; ++i)
    f.points.push_back({rng.uniform(5.0, 9.0), rng.uniform(-0.6, 0.6), rng.uniform(-1.2, 0.6)});
  return f;
}

TEST(RangeCell, AxisAlignedPoint)
{
  const RangeCell c = range_cell({1, 0, 0}, 0.192, 0.2);
  EXPECT_EQ(c.r, 0);
  EXPECT_EQ(c.c, 0);
  EXPECT_EQ(c.depth, 1.0f);
}

TEST(RangeCell, ScalarFixture)
{
  // atan2(4, 3) = 53.130102354 deg, asin(1 / sqrt(26)) = 11.309932474 deg.
  const RangeCell c = range_cell({3, 4, 1}, 0.192, 0.2);
  EXPECT_EQ(c.r, 276);
  EXPECT_EQ(c.c, 56);
  EXPECT_EQ(c.depth, 5.0f);
}

TEST(RangeCell, NegativeAnglesFloorDownward)
{
  const RangeCell c = range_cell({1, -0.001, -0.001}, 0.192, 0.2);
  EXPECT_EQ(c.r, -1);
  EXPECT_EQ(c.c, -1);
}

TEST(RangeView, SinglePointImage)
{
  const DepthImage img = project_range_view(frame_of({{1, 0, 0}}), ProjectionConfig{});
  EXPECT_EQ(img.width, 1);
  EXPECT_EQ(img.height, 1);
  EXPECT_EQ(img.at(0, 0), 1.0f);
}

TEST(RangeView, CollisionKeepsTheNearestPoint)
{
  for (auto pts : {std::vector<Point3>{{2, 0, 0}, {3, 0, 0}}, std::vector<Point3>{{3, 0, 0}, {2, 0, 0}}})
  {
    const DepthImage img = project_range_view(frame_of(pts), ProjectionConfig{});
    ASSERT_EQ(img.pixels.size(), 1u);
    EXPECT_EQ(img.at(0, 0), 2.0f);
  }
}

TEST(RangeView, EmptyFrameGivesSingleZero)
{
  const DepthImage img = project_range_view(PointFrame{}, ProjectionConfig{});
  EXPECT_EQ(img.width, 1);
  EXPECT_EQ(img.height, 1);
  EXPECT_EQ(img.at(0, 0), 0.0f);
}

TEST(RangeView, OriginIsRejected)
{
  EXPECT_THROW(project_range_view(frame_of({{1, 0, 0}, {0, 0, 0}}), ProjectionConfig{}), std::invalid_argument);
}

TEST(RangeView, HigherElevationIsNearerTheTop)
{
  const DepthImage img = project_range_view(frame_of({{5, 0, 0}, {5, 0, 1}}), ProjectionConfig{});
  EXPECT_EQ(img.width, 1);
  EXPECT_GT(img.height, 1);
  EXPECT_GT(img.at(0, 0), 5.0f - 1e-6f);
  EXPECT_EQ(img.at(img.height - 1, 0), 5.0f);
}

TEST(RangeView, MatchesNaiveReferenceBitForBit)
{
  for (std::uint64_t seed = 1; seed <= 25; ++seed)
  {
    const PointFrame f = testing::random_frame(seed, 1000, 10.0);
    EXPECT_EQ(project_range_view(f, ProjectionConfig{}), testing::naive_range_view(f, 0.192, 0.2)) << seed;
  }
}

TEST(RangeView, WrongViewKindThrows)
{
  ProjectionConfig cfg;
  cfg.view = ViewKind::BirdsEyeView;
  EXPECT_THROW(project_range_view(frame_of({{1, 0, 0}}), cfg), std::invalid_argument);
}

TEST(ProjectionConfig, RejectsNonPositiveSteps)
{
  ProjectionConfig cfg;
  cfg.delta_phi = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.ortho_cell = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Orthographic, SinglePointGetsEpsilon)
{
  for (ViewKind v : {ViewKind::RightSideView, ViewKind::BirdsEyeView})
  {
    ProjectionConfig cfg;
    cfg.view = v;
    const DepthImage img = project_orthographic(frame_of({{4, 1, 2}}), cfg);
    ASSERT_EQ(img.pixels.size(), 1u);
    EXPECT_EQ(img.at(0, 0), kOccupiedEpsilon);
  }
}

TEST(Orthographic, SideViewKeepsPointClosestToObserver)
{
  ProjectionConfig cfg;
  cfg.view = ViewKind::RightSideView;
  const DepthImage img = project_orthographic(frame_of({{0, 0, 0}, {0, 1, 0}}), cfg);
  ASSERT_EQ(img.pixels.size(), 1u);
  EXPECT_EQ(img.at(0, 0), kOccupiedEpsilon);
}

TEST(Orthographic, SideViewLayout)
{
  ProjectionConfig cfg;
  cfg.view = ViewKind::RightSideView;
  cfg.ortho_cell = 1.0;
  const DepthImage img = project_orthographic(frame_of({{0.5, 0.0, 2.5}, {2.5, 1.0, 0.5}}), cfg);
  ASSERT_EQ(img.width, 3);
  ASSERT_EQ(img.height, 3);
  EXPECT_EQ(img.at(0, 0), 1.0f);
  EXPECT_EQ(img.at(2, 2), kOccupiedEpsilon);
  EXPECT_EQ(img.at(1, 1), 0.0f);
}

TEST(Orthographic, BirdsEyeKeepsHighestPoint)
{
  ProjectionConfig cfg;
  cfg.view = ViewKind::BirdsEyeView;
  cfg.ortho_cell = 1.0;
  const DepthImage img = project_orthographic(frame_of({{0.5, 0.5, 0.0}, {0.5, 0.5, 1.0}, {1.5, 0.5, 3.0}}), cfg);
  ASSERT_EQ(img.pixels.size(), 2u);
  float values[2] = {img.pixels[0], img.pixels[1]};
  std::sort(values, values + 2);
  EXPECT_EQ(values[0], kOccupiedEpsilon);
  EXPECT_EQ(values[1], 2.0f);
}

TEST(Orthographic, SideViewAreaOfScannedBody)
{
  // Subject crossing the boresight at 7 m, so the scanner sees its flank.
  // The scan is re-expressed with the scanner looking down -y, which makes
  // the side view's image plane the body's sagittal plane.
  IdentityProfile prof;
  LidarModel lidar;
  // Beam spacing at the subject of half an orthographic cell, so the side
  // view has no sampling holes.
  lidar.delta_theta = 0.01 / 7.0 * 180.0 / std::numbers::pi;
  lidar.delta_phi = lidar.delta_theta;
  for (double phase : {0.0, 1.0, 2.5})
  {
    const BodyPose pose = pose_at(prof, phase);
    RigidTransform t;
    t.yaw = std::numbers::pi / 2.0;
    t.translation = {7.0, 0.0, -lidar.sensor_height};
    std::vector<Shape> shapes(pose.capsules.begin(), pose.capsules.end());
    for (auto& s : shapes)
      s = transformed(s, t);
    const PointFrame scan = scan_shapes(shapes, lidar);
    ASSERT_GT(scan.size(), 500u);
    PointFrame side;
    for (const auto& p : scan.points)
      side.points.push_back({p.y, -p.x, p.z});
    ProjectionConfig cfg;
    cfg.view = ViewKind::RightSideView;
    const DepthImage img = project_orthographic(side, cfg);
    std::size_t occupied = 0;
    for (float v : img.pixels)
      occupied += v > 0.0f;
    const double measured = static_cast<double>(occupied) * cfg.ortho_cell * cfg.ortho_cell;
    std::vector<Capsule> caps(pose.capsules.begin(), pose.capsules.end());
    const double analytic = testing::projected_capsule_area(caps, {1, 0, 0}, {0, 0, 1}, 0.002);
    EXPECT_NEAR(measured, analytic, 0.1 * analytic) << "phase " << phase;
  }
}

TEST(Normalize, TwoValueMinMax)
{
  DepthImage img;
  img.width = 3;
  img.pixels = {0.0f, 2.0f, 4.0f};
  EXPECT_EQ(normalize_depth(img).pixels, (std::vector<std::uint8_t>{0, 255, 1}));
}

TEST(Normalize, DegenerateRangeIsWhite)
{
  DepthImage img;
  img.width = 4;
  img.pixels = {3.0f, 0.0f, 3.0f, 3.0f};
  EXPECT_EQ(normalize_depth(img).pixels, (std::vector<std::uint8_t>{255, 0, 255, 255}));
}

TEST(Normalize, RandomFrameSupportAndShiftInvariance)
{
  const PointFrame f = testing::random_frame(9, 1000, 10.0);
  DepthImage img = project_range_view(f, ProjectionConfig{});
  const GrayImage g = normalize_depth(img);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    EXPECT_EQ(img.pixels[i] == 0.0f, g.pixels[i] == 0);
  DepthImage shifted = img;
  for (float& v : shifted.pixels)
    if (v > 0.0f)
      v += 1.5f;
  // 1.5 is exact in binary, so differences of shifted depths match exactly
  // as long as no rounding occurs; use a frame with representable depths.
  DepthImage q;
  q.width = 5;
  q.pixels = {1.0f, 0.0f, 1.25f, 2.0f, 1.75f};
  DepthImage q2 = q;
  for (float& v : q2.pixels)
    if (v > 0.0f)
      v += 2.0f;
  EXPECT_EQ(normalize_depth(q), normalize_depth(q2));
}

TEST(Normalize, ExplicitRange)
{
  DepthImage img;
  img.width = 2;
  img.pixels = {2.0f, 3.0f};
  EXPECT_EQ(normalize_depth(img, DepthRange{2.0f, 4.0f}).pixels, (std::vector<std::uint8_t>{255, 128}));
  EXPECT_EQ(nonzero_depth_range(img)->max, 3.0f);
  DepthImage zero;
  EXPECT_FALSE(nonzero_depth_range(zero).has_value());
}

TEST(Align, AllZeroGivesBlank)
{
  EXPECT_TRUE(align_and_resize(GrayImage(10, 7)).blank());
}

TEST(Align, CenteredFullHeightSubjectIsFixedPoint)
{
  GrayImage g(64, 64);
  for (int r = 0; r < 64; ++r)
    for (int c = 28; c < 36; ++c)
      g.at(r, c) = static_cast<std::uint8_t>(1 + r);
  const AlignedImage a = align_and_resize(g);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c)
      ASSERT_EQ(a.at(r, c), g.at(r, c)) << r << "," << c;
}

TEST(Align, IntegerUpscale)
{
  GrayImage g(40, 50);
  for (int r = 10; r <= 41; ++r)
    g.at(r, 20) = static_cast<std::uint8_t>(r);
  const AlignedImage a = align_and_resize(g);
  for (int r = 0; r < 64; ++r)
    EXPECT_EQ(a.at(r, 32), static_cast<std::uint8_t>(10 + r / 2));
}

TEST(Align, TranslationInvariant)
{
  Xorshift64Star rng(3);
  GrayImage g(50, 60);
  for (int r = 5; r < 45; ++r)
    for (int c = 10; c < 25; ++c)
      if (rng.uniform() < 0.6)
        g.at(r, c) = static_cast<std::uint8_t>(1 + rng.index(255));
  GrayImage moved(50, 60);
  for (int r = 0; r + 5 < 60; ++r)
    for (int c = 0; c + 3 < 50; ++c)
      moved.at(r + 5, c + 3) = g.at(r, c);
  EXPECT_EQ(align_and_resize(g), align_and_resize(moved));
}

TEST(Align, ContentTouchesTopOrBottom)
{
  IdentityProfile prof;
  LidarModel lidar;
  for (int view : {0, 90, 210})
  {
    const BodyPose pose = pose_at(prof, 0.3 * view);
    RigidTransform t;
    t.yaw = view * std::numbers::pi / 180.0;
    t.translation = {7.0, 0.0, -lidar.sensor_height};
    const PointFrame f = scan_frame(pose, t, lidar);
    for (ViewKind v : {ViewKind::RangeView, ViewKind::RightSideView, ViewKind::BirdsEyeView})
    {
      ProjectionConfig cfg;
      cfg.view = v;
      const AlignedImage a = align_and_resize(normalize_depth(project(f, cfg)));
      bool touches = false;
      for (int c = 0; c < 64; ++c)
        touches = touches || a.at(0, c) != 0 || a.at(63, c) != 0;
      EXPECT_TRUE(touches) << view_kind_name(v) << " " << view;
    }
  }
}

TEST(Align, SensorAzimuthRotationIsAbsorbed)
{
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
  {
    const PointFrame f = front_frame(seed, 1000);
    for (int k : {1, 7, -4})
    {
      // Whole cells of rotation, applied on the exact azimuth grid.
      PointFrame g = f;
      for (auto& p : g.points)
      {
        const double az = std::atan2(p.y, p.x);
        const double rho = std::hypot(p.x, p.y);
        const RangeCell cell = range_cell(p, 0.192, 0.2);
        const double frac = az * 180.0 / std::numbers::pi / 0.192 - static_cast<double>(cell.r);
        const double az2 = (static_cast<double>(cell.r + k) + frac) * 0.192 * std::numbers::pi / 180.0;
        p.x = rho * std::cos(az2);
        p.y = rho * std::sin(az2);
      }
      const auto img_f = project_range_view(f, ProjectionConfig{});
      const auto img_g = project_range_view(g, ProjectionConfig{});
      const auto a = align_and_resize(normalize_depth(img_f));
      const auto b = align_and_resize(normalize_depth(img_g));
      std::size_t diff = 0;
      for (std::size_t i = 0; i < a.pixels.size(); ++i)
        diff += a.pixels[i] != b.pixels[i];
      EXPECT_EQ(diff, 0u) << "seed " << seed << " k " << k;
    }
  }
}

TEST(Silhouette, BinarizesAndIsIdempotent)
{
  AlignedImage a;
  a.pixels[0] = 0;
  a.pixels[1] = 37;
  a.pixels[2] = 255;
  const AlignedImage s = silhouette_from_depth(a);
  EXPECT_EQ(s.pixels[0], 0);
  EXPECT_EQ(s.pixels[1], 255);
  EXPECT_EQ(s.pixels[2], 255);
  EXPECT_EQ(silhouette_from_depth(s), s);
  EXPECT_TRUE(silhouette_from_depth(AlignedImage{}).blank());
}

TEST(Project, DispatchesOnViewKind)
{
  const PointFrame f = front_frame(2, 100);
  ProjectionConfig cfg;
  EXPECT_EQ(project(f, cfg), project_range_view(f, cfg));
  cfg.view = ViewKind::RightSideView;
  EXPECT_EQ(project(f, cfg), project_orthographic(f, cfg));
  EXPECT_EQ(project(f, cfg).view, ViewKind::RightSideView);
}

} // namespace
} // namespace lidargait
