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
#include "lidargait/projection.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lidargait {

inline constexpr const char* kManifestName = "manifest.csv";

/// One row of `manifest.csv` (identity,attribute,seq,view_deg,distance,frames).
struct ManifestEntry
{
  std::string identity;
  Attribute attribute = Attribute::Normal;
  int seq = 0;
  int view_deg = 0;
  DistanceTag distance = DistanceTag::Near;
  int frames = 0;

  /// "<identity>/<attribute>-<seq##>/<view###>", unique within a dataset.
  std::string sequence_id() const;
  std::filesystem::path dir(const std::filesystem::path& root) const;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

void write_manifest(const std::filesystem::path& file, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file);

struct IdentitySplit
{
  std::vector<std::string> train;
  std::vector<std::string> test;
};

/// Identities sorted by label; the first `train_fraction` go to training.
IdentitySplit split_identities(const std::vector<ManifestEntry>& entries, double train_fraction = 0.75);

std::vector<ManifestEntry> select_identities(const std::vector<ManifestEntry>& entries,
                                             const std::vector<std::string>& identities);

struct PreprocessOptions
{
  std::optional<Region3> roi = Region3::synthetic_area();
  bool remove_ground = true;
  double ground_lift = kDefaultGroundLift;
  bool denoise = true;
  double denoise_cell = kDefaultDenoiseCell;
};

/// crop_roi -> remove_ground -> denoise, each stage optional.
PointFrame preprocess(const PointFrame& frame, const PreprocessOptions& options);

enum class NormalizationScope
{
  PerFrame,
  PerSequence
};

struct RenderOptions
{
  PreprocessOptions preprocess;
  ProjectionConfig projection;
  NormalizationScope scope = NormalizationScope::PerFrame;
  InputMode input = InputMode::Depth;
};

/// Frames -> preprocessed -> projected -> normalized -> aligned 64x64 images.
std::vector<AlignedImage> render_sequence(const std::vector<PointFrame>& frames, ViewKind view,
                                          const RenderOptions& options);

/// Rendered frames of one manifest sequence, one image list per requested view.
struct SequenceImages
{
  ManifestEntry entry;
  std::vector<std::vector<AlignedImage>> views;

  std::size_t frame_count() const { return views.empty() ? 0 : views.front().size(); }
};

/// Reads and renders every entry (parallel over sequences, output in entry order).
std::vector<SequenceImages> load_sequence_images(const std::filesystem::path& root,
                                                 const std::vector<ManifestEntry>& entries,
                                                 const std::vector<ViewKind>& views, const RenderOptions& options,
                                                 unsigned threads = 0);

} // namespace lidargait
