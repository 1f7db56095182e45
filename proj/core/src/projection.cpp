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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lidargait {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

} // namespace

std::string_view view_kind_name(ViewKind v)
{
  switch (v)
  {
    case ViewKind::RangeView:
      return "rv";
    case ViewKind::RightSideView:
      return "rsv";
    case ViewKind::BirdsEyeView:
      return "bev";
  }
  return "?";
}

std::optional<ViewKind> parse_view_kind(std::string_view name)
{
  if (name == "rv")
    return ViewKind::RangeView;
  if (name == "rsv")
    return ViewKind::RightSideView;
  if (name == "bev")
    return ViewKind::BirdsEyeView;
  return std::nullopt;
}

std::string_view input_mode_name(InputMode m)
{
  return m == InputMode::Depth ? "depth" : "silhouette";
}

std::optional<InputMode> parse_input_mode(std::string_view name)
{
  if (name == "depth")
    return InputMode::Depth;
  if (name == "silhouette")
    return InputMode::Silhouette;
  return std::nullopt;
}

void ProjectionConfig::validate() const
{
  if (!(delta_theta > 0.0) || !(delta_phi > 0.0) || !(ortho_cell > 0.0))
    throw std::invalid_argument("projection resolutions must be positive");
}

bool AlignedImage::blank() const
{
  return std::all_of(pixels.begin(), pixels.end(), [](std::uint8_t v) { return v == 0; });
}

GrayImage AlignedImage::gray() const
{
  GrayImage g(kAlignedSize, kAlignedSize);
  std::copy(pixels.begin(), pixels.end(), g.pixels.begin());
  return g;
}

RangeCell range_cell(const Point3& p, double delta_theta, double delta_phi)
{
  const double range = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  if (!(range > 0.0))
    throw std::invalid_argument("range view projection: point at the sensor origin");
  const double azimuth = std::atan2(p.y, p.x) * kRadToDeg;
  const double elevation = std::asin(p.z / range) * kRadToDeg;
  return {static_cast<std::int64_t>(std::floor(azimuth / delta_theta)),
          static_cast<std::int64_t>(std::floor(elevation / delta_phi)),
          static_cast<float>(std::sqrt(p.x * p.x + p.y * p.y))};
}

DepthImage project_range_view(const PointFrame& frame, const ProjectionConfig& cfg)
{
  cfg.validate();
  if (cfg.view != ViewKind::RangeView)
    throw std::invalid_argument("project_range_view: config view is not the range view");
  DepthImage img;
  img.view = ViewKind::RangeView;
  if (frame.points.empty())
    return img;

  std::vector<RangeCell> cells(frame.points.size());
  std::int64_t r_min = std::numeric_limits<std::int64_t>::max(), r_max = std::numeric_limits<std::int64_t>::min();
  std::int64_t c_min = r_min, c_max = r_max;
  for (std::size_t i = 0; i < cells.size(); ++i)
  {
    cells[i] = range_cell(frame.points[i], cfg.delta_theta, cfg.delta_phi);
    r_min = std::min(r_min, cells[i].r);
    r_max = std::max(r_max, cells[i].r);
    c_min = std::min(c_min, cells[i].c);
    c_max = std::max(c_max, cells[i].c);
  }

  img.width = static_cast<int>(r_max - r_min + 1);
  img.height = static_cast<int>(c_max - c_min + 1);
  img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, std::numeric_limits<float>::infinity());
  for (const RangeCell& cell : cells)
  {
    float& px = img.at(static_cast<int>(c_max - cell.c), static_cast<int>(cell.r - r_min));
    px = std::min(px, cell.depth);
  }
  for (float& px : img.pixels)
    if (std::isinf(px))
      px = 0.0f;
  return img;
}

DepthImage project_orthographic(const PointFrame& frame, const ProjectionConfig& cfg)
{
  cfg.validate();
  if (cfg.view == ViewKind::RangeView)
    throw std::invalid_argument("project_orthographic: range view requested");
  DepthImage img;
  img.view = cfg.view;
  if (frame.points.empty())
    return img;

  const bool side = cfg.view == ViewKind::RightSideView;
  double lo[3] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
  double hi[3] = {-lo[0], -lo[1], -lo[2]};
  for (const Point3& p : frame.points)
  {
    const double v[3] = {p.x, p.y, p.z};
    for (int a = 0; a < 3; ++a)
    {
      lo[a] = std::min(lo[a], v[a]);
      hi[a] = std::max(hi[a], v[a]);
    }
  }

  const double cell = cfg.ortho_cell;
  // side: rows from z (top = z max), cols from x, depth along -y.
  // bev:  rows from x (top = x max), cols from y (left = y max), depth along -z.
  const int row_axis = side ? 2 : 0;
  const int col_axis = side ? 0 : 1;
  const int depth_axis = side ? 1 : 2;
  img.height = static_cast<int>(std::floor((hi[row_axis] - lo[row_axis]) / cell)) + 1;
  img.width = static_cast<int>(std::floor((hi[col_axis] - lo[col_axis]) / cell)) + 1;
  img.pixels.assign(static_cast<std::size_t>(img.width) * img.height, std::numeric_limits<float>::infinity());

  for (const Point3& p : frame.points)
  {
    const double v[3] = {p.x, p.y, p.z};
    const int row = static_cast<int>(std::floor((hi[row_axis] - v[row_axis]) / cell));
    const int col = side ? static_cast<int>(std::floor((v[col_axis] - lo[col_axis]) / cell))
                         : static_cast<int>(std::floor((hi[col_axis] - v[col_axis]) / cell));
    float& px = img.at(row, col);
    px = std::min(px, static_cast<float>(hi[depth_axis] - v[depth_axis]));
  }
  for (float& px : img.pixels)
  {
    if (std::isinf(px))
      px = 0.0f;
    else if (px == 0.0f)
      px = kOccupiedEpsilon;
  }
  return img;
}

DepthImage project(const PointFrame& frame, const ProjectionConfig& cfg)
{
  return cfg.view == ViewKind::RangeView ? project_range_view(frame, cfg) : project_orthographic(frame, cfg);
}

std::optional<DepthRange> nonzero_depth_range(const DepthImage& img)
{
  std::optional<DepthRange> range;
  for (float d : img.pixels)
  {
    if (d == 0.0f)
      continue;
    if (!range)
      range = DepthRange{d, d};
    range->min = std::min(range->min, d);
    range->max = std::max(range->max, d);
  }
  return range;
}

GrayImage normalize_depth(const DepthImage& img, DepthRange range)
{
  GrayImage out(img.width, img.height);
  const double span = static_cast<double>(range.max) - static_cast<double>(range.min);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
  {
    const float d = img.pixels[i];
    if (d == 0.0f)
      continue;
    if (!(span > 0.0))
    {
      out.pixels[i] = 255;
      continue;
    }
    const double t = std::clamp((static_cast<double>(range.max) - d) / span, 0.0, 1.0);
    out.pixels[i] = static_cast<std::uint8_t>(1 + std::lround(254.0 * t));
  }
  return out;
}

GrayImage normalize_depth(const DepthImage& img)
{
  const auto range = nonzero_depth_range(img);
  if (!range)
    return GrayImage(img.width, img.height);
  return normalize_depth(img, *range);
}

AlignedImage align_and_resize(const GrayImage& img)
{
  AlignedImage out;
  int r0 = -1, r1 = -1;
  for (int r = 0; r < img.height; ++r)
  {
    bool any = false;
    for (int c = 0; c < img.width && !any; ++c)
      any = img.at(r, c) != 0;
    if (any)
    {
      if (r0 < 0)
        r0 = r;
      r1 = r;
    }
  }
  if (r0 < 0)
    return out;

  const std::int64_t h = r1 - r0 + 1;
  std::int64_t num = 0, den = 0;
  for (int r = r0; r <= r1; ++r)
    for (int c = 0; c < img.width; ++c)
    {
      num += static_cast<std::int64_t>(c) * img.at(r, c);
      den += img.at(r, c);
    }

  // Source column for output column X, with pixel centres mapped through
  // u = (X - 32) h / 64 + centroid + 1/2, kept as an exact rational.
  std::array<int, kAlignedSize> src_col{};
  for (int x = 0; x < kAlignedSize; ++x)
  {
    const std::int64_t n = (x - kAlignedSize / 2) * h * den + kAlignedSize * num + (kAlignedSize / 2) * den;
    const std::int64_t u = floor_div(n, kAlignedSize * den);
    src_col[static_cast<std::size_t>(x)] = (u >= 0 && u < img.width) ? static_cast<int>(u) : -1;
  }
  for (int y = 0; y < kAlignedSize; ++y)
  {
    const int src_row = r0 + static_cast<int>(((2 * y + 1) * h) / (2 * kAlignedSize));
    for (int x = 0; x < kAlignedSize; ++x)
    {
      const int c = src_col[static_cast<std::size_t>(x)];
      if (c >= 0)
        out.at(y, x) = img.at(src_row, c);
    }
  }
  return out;
}

AlignedImage silhouette_from_depth(const AlignedImage& img)
{
  AlignedImage out;
  std::transform(img.pixels.begin(), img.pixels.end(), out.pixels.begin(),
                 [](std::uint8_t v) { return v ? std::uint8_t{255} : std::uint8_t{0}; });
  return out;
}

} // namespace lidargait
