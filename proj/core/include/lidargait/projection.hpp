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
#include <optional>
#include <string_view>
#include <vector>

namespace lidargait {

enum class ViewKind
{
  RangeView,
  RightSideView,
  BirdsEyeView
};

/// "rv", "rsv", "bev".
std::string_view view_kind_name(ViewKind v);
std::optional<ViewKind> parse_view_kind(std::string_view name);

/// What the encoder sees: normalized depth, or its binary silhouette.
enum class InputMode
{
  Depth,
  Silhouette
};

std::string_view input_mode_name(InputMode m);
std::optional<InputMode> parse_input_mode(std::string_view name);

struct ProjectionConfig
{
  double delta_theta = 0.192; ///< degrees of azimuth per column
  double delta_phi = 0.2;     ///< degrees of elevation per row
  ViewKind view = ViewKind::RangeView;
  double ortho_cell = 0.02;   ///< meters per pixel in the orthographic views

  void validate() const;
};

/// Float depth raster. Zero marks an empty cell.
struct DepthImage
{
  int width = 1;
  int height = 1;
  std::vector<float> pixels = std::vector<float>(1, 0.0f);
  ViewKind view = ViewKind::RangeView;

  float at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  float& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  friend bool operator==(const DepthImage&, const DepthImage&) = default;
};

/// 8-bit single channel raster of arbitrary size.
struct GrayImage
{
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
  std::uint8_t& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

inline constexpr int kAlignedSize = 64;

/// Height-normalized, centroid-centred 64x64 network input.
struct AlignedImage
{
  std::array<std::uint8_t, kAlignedSize * kAlignedSize> pixels{};

  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * kAlignedSize + col]; }
  std::uint8_t& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * kAlignedSize + col]; }
  bool blank() const;
  GrayImage gray() const;
  friend bool operator==(const AlignedImage&, const AlignedImage&) = default;
};

/// Raw (untranslated) range-view cell of one point.
struct RangeCell
{
  std::int64_t r = 0; ///< floor(azimuth / delta_theta)
  std::int64_t c = 0; ///< floor(elevation / delta_phi)
  float depth = 0.0f; ///< sqrt(x^2 + y^2)
};

/// Throws std::invalid_argument for the sensor origin.
RangeCell range_cell(const Point3& p, double delta_theta, double delta_phi);

/// Spherical projection. Columns follow azimuth, rows follow elevation with
/// the highest elevation on top; indices are shifted so the frame's minimum
/// cell lands at zero. The nearest point wins each cell.
DepthImage project_range_view(const PointFrame& frame, const ProjectionConfig& cfg);

/// Depth stored for an occupied orthographic cell whose depth is exactly zero.
inline constexpr float kOccupiedEpsilon = 0.001f;

/// Right-side view (x-z plane seen from +y) or bird's-eye view (x-y plane seen
/// from +z). Depth is measured from the observer-side extreme of the frame.
DepthImage project_orthographic(const PointFrame& frame, const ProjectionConfig& cfg);

/// Dispatches on cfg.view.
DepthImage project(const PointFrame& frame, const ProjectionConfig& cfg);

struct DepthRange
{
  float min = 0.0f;
  float max = 0.0f;
};

/// Min and max over nonzero cells; nullopt when the image is empty.
std::optional<DepthRange> nonzero_depth_range(const DepthImage& img);

/// Min-max normalization over nonzero cells, nearer is brighter:
/// d -> 1 + round(254 (dmax - d) / (dmax - dmin)); zeros stay zero.
GrayImage normalize_depth(const DepthImage& img);
/// Same mapping against an externally supplied range (per-sequence scope).
GrayImage normalize_depth(const DepthImage& img, DepthRange range);

/// Crop to nonzero rows, scale to height 64 (nearest neighbour) and centre the
/// column-sum centroid on column 32. Integer arithmetic throughout, so the
/// result is exactly invariant to integer translations of the input.
AlignedImage align_and_resize(const GrayImage& img);

/// Binary mask: nonzero -> 255.
AlignedImage silhouette_from_depth(const AlignedImage& img);

} // namespace lidargait
