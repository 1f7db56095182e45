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

#include "lidargait/dataset.hpp"
#include "lidargait/encoder.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lidargait {

struct EmbeddingRecord
{
  std::vector<float> embedding;
  std::string identity;
  int view_deg = 0;
  Attribute attribute = Attribute::Normal;
  std::string sequence_id;
};

using EmbeddingSet = std::vector<EmbeddingRecord>;

struct ExtractResult
{
  EmbeddingSet embeddings;
  std::size_t skipped = 0; ///< sequences without frames
};

/// One embedding per sequence. With `frames_limit`, that many frames are drawn
/// uniformly without replacement per sequence (all frames when shorter).
ExtractResult extract_embeddings(const EncoderParams<float>& params, const std::vector<SequenceImages>& sequences,
                                 std::optional<int> frames_limit, std::uint64_t seed, unsigned threads = 0);

/// Euclidean distances between full embeddings, probes x gallery.
std::vector<std::vector<double>> distance_matrix(const EmbeddingSet& probes, const EmbeddingSet& gallery);

struct RankResult
{
  std::size_t hits = 0;
  std::size_t evaluated = 0;
  std::size_t excluded = 0; ///< probes whose identity is absent from the gallery
  std::optional<double> accuracy() const;
};

/// Fraction of probes with a same-identity entry among their k nearest gallery
/// entries (ties broken by gallery index). Gallery entries whose id equals the
/// probe's id are skipped when ids are given.
RankResult rank_k_accuracy(const std::vector<std::vector<double>>& distances,
                           const std::vector<std::string>& probe_labels,
                           const std::vector<std::string>& gallery_labels, int k,
                           const std::vector<std::string>* probe_ids = nullptr,
                           const std::vector<std::string>* gallery_ids = nullptr);

enum class GalleryRole
{
  NormalGallery, ///< Normal sequences enrolled, attribute sequences probe
  VariantGallery ///< attribute sequences enrolled, Normal sequences probe
};

std::string_view gallery_role_name(GalleryRole role);

struct EvalMatrix
{
  std::vector<int> views;                              ///< row and column labels
  std::vector<std::vector<std::optional<double>>> cells; ///< [probe view][gallery view]
  int k = 1;

  std::optional<double> mean() const;
};

/// Probe-view x gallery-view rank-k matrix for the given attribute set.
/// `attributes` lists the non-Normal side (several for the pooled overall).
EvalMatrix cross_view_matrix(const EmbeddingSet& set, const std::vector<Attribute>& attributes, int k,
                             GalleryRole role);
EvalMatrix cross_view_matrix(const EmbeddingSet& set, Attribute attribute, int k, GalleryRole role);

struct AttributeScore
{
  std::optional<double> rank1;
  std::optional<double> rank5;
};

struct AttributeReport
{
  GalleryRole role = GalleryRole::NormalGallery;
  std::vector<AttributeScore> attributes; ///< kAllAttributes order
  AttributeScore overall_pooled;          ///< all variant probes evaluated jointly
  AttributeScore overall_mean;            ///< mean of the variant attribute means
  std::vector<EvalMatrix> rank1_matrices; ///< kAllAttributes order
  std::vector<EvalMatrix> rank5_matrices;
};

AttributeReport attribute_report(const EmbeddingSet& set, GalleryRole role);

/// Percentages with two decimals, view angles as header row and column.
void write_matrix_csv(const std::filesystem::path& path, const EvalMatrix& m);
/// Values in [0, 1] mapped linearly to 0..255, 16 px per cell; absent cells 0.
void write_heatmap_pgm(const std::filesystem::path& path, const EvalMatrix& m);

struct ReportContext
{
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::optional<int> frames_limit;
  std::string checkpoint;
};

void write_report_csv(const std::filesystem::path& path, const AttributeReport& report, const ReportContext& ctx);

} // namespace lidargait
