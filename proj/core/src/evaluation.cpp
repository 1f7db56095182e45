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

#include "lidargait/evaluation.hpp"

#include "lidargait/image_io.hpp"
#include "lidargait/parallel.hpp"
#include "lidargait/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

namespace lidargait {

namespace fs = std::filesystem;

namespace {

std::string percent(const std::optional<double>& v)
{
  if (!v)
    return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *v);
  return buf;
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& values)
{
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values)
    if (v)
    {
      sum += *v;
      ++n;
    }
  if (n == 0)
    return std::nullopt;
  return sum / static_cast<double>(n);
}

} // namespace

ExtractResult extract_embeddings(const EncoderParams<float>& params, const std::vector<SequenceImages>& sequences,
                                 std::optional<int> frames_limit, std::uint64_t seed, unsigned threads)
{
  if (frames_limit && *frames_limit < 1)
    throw std::invalid_argument("extract_embeddings: frame budget must be positive");
  std::vector<std::optional<EmbeddingRecord>> slots(sequences.size());
  parallel_for(sequences.size(), threads, [&](std::size_t i) {
    const SequenceImages& s = sequences[i];
    const std::size_t n = s.frame_count();
    if (n == 0)
      return;
    if (s.views.size() != params.arch.views.size())
      throw std::invalid_argument("extract_embeddings: sequence views do not match the architecture");
    std::vector<std::size_t> frames(n);
    std::iota(frames.begin(), frames.end(), std::size_t{0});
    if (frames_limit && static_cast<std::size_t>(*frames_limit) < n)
    {
      Xorshift64Star rng(derive_seed(seed, i));
      frames = sample_without_replacement(n, static_cast<std::size_t>(*frames_limit), rng);
      std::sort(frames.begin(), frames.end());
    }
    const auto fwd = forward_sequence(params, make_input<float>(s.views, frames), false);
    EmbeddingRecord r;
    r.embedding = fwd.head.embedding;
    r.identity = s.entry.identity;
    r.view_deg = s.entry.view_deg;
    r.attribute = s.entry.attribute;
    r.sequence_id = s.entry.sequence_id();
    slots[i] = std::move(r);
  });
  ExtractResult out;
  for (auto& s : slots)
  {
    if (s)
      out.embeddings.push_back(std::move(*s));
    else
      ++out.skipped;
  }
  return out;
}

std::vector<std::vector<double>> distance_matrix(const EmbeddingSet& probes, const EmbeddingSet& gallery)
{
  if (probes.empty() || gallery.empty())
    throw std::invalid_argument("distance_matrix: empty probe or gallery set");
  std::vector<std::vector<double>> d(probes.size(), std::vector<double>(gallery.size()));
  for (std::size_t i = 0; i < probes.size(); ++i)
    for (std::size_t j = 0; j < gallery.size(); ++j)
    {
      const auto& a = probes[i].embedding;
      const auto& b = gallery[j].embedding;
      if (a.size() != b.size())
        throw std::invalid_argument("distance_matrix: embeddings differ in size");
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k)
      {
        const double diff = static_cast<double>(a[k]) - static_cast<double>(b[k]);
        s += diff * diff;
      }
      d[i][j] = std::sqrt(s);
    }
  return d;
}

std::optional<double> RankResult::accuracy() const
{
  if (evaluated == 0)
    return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(evaluated);
}

RankResult rank_k_accuracy(const std::vector<std::vector<double>>& distances,
                           const std::vector<std::string>& probe_labels,
                           const std::vector<std::string>& gallery_labels, int k,
                           const std::vector<std::string>* probe_ids, const std::vector<std::string>* gallery_ids)
{
  if (k < 1)
    throw std::invalid_argument("rank_k_accuracy: k must be positive");
  if (distances.size() != probe_labels.size())
    throw std::invalid_argument("rank_k_accuracy: distance rows do not match probes");
  if ((probe_ids == nullptr) != (gallery_ids == nullptr))
    throw std::invalid_argument("rank_k_accuracy: sequence ids must be given for both sides");
  RankResult r;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < distances.size(); ++i)
  {
    if (distances[i].size() != gallery_labels.size())
      throw std::invalid_argument("rank_k_accuracy: distance columns do not match the gallery");
    order.clear();
    bool present = false;
    for (std::size_t j = 0; j < gallery_labels.size(); ++j)
    {
      if (probe_ids && (*probe_ids)[i] == (*gallery_ids)[j])
        continue;
      order.push_back(j);
      present = present || gallery_labels[j] == probe_labels[i];
    }
    if (!present)
    {
      ++r.excluded;
      continue;
    }
    const std::size_t top = std::min(order.size(), static_cast<std::size_t>(k));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (distances[i][a] != distances[i][b])
                          return distances[i][a] < distances[i][b];
                        return a < b;
                      });
    ++r.evaluated;
    for (std::size_t t = 0; t < top; ++t)
      if (gallery_labels[order[t]] == probe_labels[i])
      {
        ++r.hits;
        break;
      }
  }
  return r;
}

std::string_view gallery_role_name(GalleryRole role)
{
  return role == GalleryRole::NormalGallery ? "normal" : "variant";
}

std::optional<double> EvalMatrix::mean() const
{
  std::vector<std::optional<double>> all;
  for (const auto& row : cells)
    all.insert(all.end(), row.begin(), row.end());
  return mean_of(all);
}

EvalMatrix cross_view_matrix(const EmbeddingSet& set, const std::vector<Attribute>& attributes, int k,
                             GalleryRole role)
{
  std::set<int> view_set;
  for (const EmbeddingRecord& r : set)
    view_set.insert(r.view_deg);
  EvalMatrix m;
  m.k = k;
  m.views.assign(view_set.begin(), view_set.end());
  m.cells.assign(m.views.size(), std::vector<std::optional<double>>(m.views.size()));

  auto variant = [&](const EmbeddingRecord& r) {
    return std::find(attributes.begin(), attributes.end(), r.attribute) != attributes.end();
  };
  auto normal = [](const EmbeddingRecord& r) { return r.attribute == Attribute::Normal; };
  const bool normal_gallery = role == GalleryRole::NormalGallery;

  for (std::size_t pi = 0; pi < m.views.size(); ++pi)
  {
    EmbeddingSet probes;
    for (const EmbeddingRecord& r : set)
      if (r.view_deg == m.views[pi] && (normal_gallery ? variant(r) : normal(r)))
        probes.push_back(r);
    if (probes.empty())
      continue;
    for (std::size_t gi = 0; gi < m.views.size(); ++gi)
    {
      EmbeddingSet gallery;
      for (const EmbeddingRecord& r : set)
        if (r.view_deg == m.views[gi] && (normal_gallery ? normal(r) : variant(r)))
          gallery.push_back(r);
      if (gallery.empty())
        continue;
      std::vector<std::string> pl, gl, pid, gid;
      for (const auto& r : probes)
        pl.push_back(r.identity), pid.push_back(r.sequence_id);
      for (const auto& r : gallery)
        gl.push_back(r.identity), gid.push_back(r.sequence_id);
      m.cells[pi][gi] = rank_k_accuracy(distance_matrix(probes, gallery), pl, gl, k, &pid, &gid).accuracy();
    }
  }
  return m;
}

EvalMatrix cross_view_matrix(const EmbeddingSet& set, Attribute attribute, int k, GalleryRole role)
{
  return cross_view_matrix(set, std::vector<Attribute>{attribute}, k, role);
}

AttributeReport attribute_report(const EmbeddingSet& set, GalleryRole role)
{
  AttributeReport report;
  report.role = role;
  std::vector<Attribute> variants;
  for (Attribute a : kAllAttributes)
  {
    const bool present =
      std::any_of(set.begin(), set.end(), [a](const EmbeddingRecord& r) { return r.attribute == a; });
    EvalMatrix r1, r5;
    AttributeScore score;
    if (present)
    {
      r1 = cross_view_matrix(set, a, 1, role);
      r5 = cross_view_matrix(set, a, 5, role);
      score = {r1.mean(), r5.mean()};
      if (a != Attribute::Normal)
        variants.push_back(a);
    }
    report.attributes.push_back(score);
    report.rank1_matrices.push_back(std::move(r1));
    report.rank5_matrices.push_back(std::move(r5));
  }

  // Without variant sequences both overall figures fall back to Normal.
  const std::vector<Attribute> pool = variants.empty() ? std::vector<Attribute>{Attribute::Normal} : variants;
  report.overall_pooled = {cross_view_matrix(set, pool, 1, role).mean(), cross_view_matrix(set, pool, 5, role).mean()};
  std::vector<std::optional<double>> m1, m5;
  for (std::size_t i = 0; i < kAllAttributes.size(); ++i)
    if (std::find(pool.begin(), pool.end(), kAllAttributes[i]) != pool.end())
    {
      m1.push_back(report.attributes[i].rank1);
      m5.push_back(report.attributes[i].rank5);
    }
  report.overall_mean = {mean_of(m1), mean_of(m5)};
  return report;
}

void write_matrix_csv(const fs::path& path, const EvalMatrix& m)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << "probe\\gallery";
  for (int v : m.views)
    out << ',' << v;
  out << '\n';
  for (std::size_t i = 0; i < m.views.size(); ++i)
  {
    out << m.views[i];
    for (const auto& c : m.cells[i])
      out << ',' << percent(c);
    out << '\n';
  }
  if (!out)
    throw std::runtime_error("failed writing " + path.string());
}

void write_heatmap_pgm(const fs::path& path, const EvalMatrix& m)
{
  constexpr int kCell = 16;
  const int n = static_cast<int>(m.views.size());
  GrayImage img(std::max(1, n * kCell), std::max(1, n * kCell));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
    {
      const auto& c = m.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const auto value = c ? static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(*c, 0.0, 1.0))) : std::uint8_t{0};
      for (int y = 0; y < kCell; ++y)
        for (int x = 0; x < kCell; ++x)
          img.pixels[static_cast<std::size_t>((i * kCell + y) * img.width + j * kCell + x)] = value;
    }
  write_pgm(path, img);
}

void write_report_csv(const fs::path& path, const AttributeReport& report, const ReportContext& ctx)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  auto ids = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += (i ? " " : "") + v[i];
    return s;
  };
  out << "# split train (" << ctx.train_ids.size() << "): " << ids(ctx.train_ids) << '\n';
  out << "# split test (" << ctx.test_ids.size() << "): " << ids(ctx.test_ids) << '\n';
  out << "# frames=" << (ctx.frames_limit ? std::to_string(*ctx.frames_limit) : std::string("all")) << '\n';
  out << "# gallery=" << gallery_role_name(report.role) << '\n';
  if (!ctx.checkpoint.empty())
    out << "# checkpoint=" << ctx.checkpoint << '\n';
  out << "metric";
  for (Attribute a : kAllAttributes)
    out << ',' << attribute_label(a);
  out << ",overall_pooled,overall_mean\n";
  out << "rank1";
  for (const auto& s : report.attributes)
    out << ',' << percent(s.rank1);
  out << ',' << percent(report.overall_pooled.rank1) << ',' << percent(report.overall_mean.rank1) << '\n';
  out << "rank5";
  for (const auto& s : report.attributes)
    out << ',' << percent(s.rank5);
  out << ',' << percent(report.overall_pooled.rank5) << ',' << percent(report.overall_mean.rank5) << '\n';
  if (!out)
    throw std::runtime_error("failed writing " + path.string());
}

} // namespace lidargait
