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

#include "lidargait/dataset.hpp"

#include "lidargait/parallel.hpp"
#include "lidargait/pcf_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lidargait {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ','))
    out.push_back(field);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

int parse_int(const std::string& s, const char* what)
{
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::runtime_error(std::string("manifest: bad ") + what + " '" + s + "'");
  return v;
}

} // namespace

std::string ManifestEntry::sequence_id() const
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%02d/%03d", std::string(attribute_name(attribute)).c_str(), seq, view_deg);
  return identity + "/" + buf;
}

fs::path ManifestEntry::dir(const fs::path& root) const
{
  return sequence_dir(root, identity, attribute, seq, view_deg);
}

void write_manifest(const fs::path& file, const std::vector<ManifestEntry>& entries)
{
  std::ofstream out(file);
  if (!out)
    throw std::runtime_error("cannot write manifest " + file.string());
  out << "identity,attribute,seq,view_deg,distance,frames\n";
  for (const ManifestEntry& e : entries)
    out << e.identity << ',' << attribute_name(e.attribute) << ',' << e.seq << ',' << e.view_deg << ','
        << distance_name(e.distance) << ',' << e.frames << '\n';
  if (!out)
    throw std::runtime_error("failed writing manifest " + file.string());
}

std::vector<ManifestEntry> read_manifest(const fs::path& file)
{
  std::ifstream in(file);
  if (!in)
    throw std::runtime_error("cannot open manifest " + file.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("identity,", 0) != 0)
    throw std::runtime_error("manifest " + file.string() + " has no header");
  std::vector<ManifestEntry> entries;
  while (std::getline(in, line))
  {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    const auto f = split_csv(line);
    if (f.size() != 6)
      throw std::runtime_error("manifest: expected 6 fields in '" + line + "'");
    ManifestEntry e;
    e.identity = f[0];
    const auto attr = parse_attribute(f[1]);
    if (!attr)
      throw std::runtime_error("manifest: unknown attribute '" + f[1] + "'");
    e.attribute = *attr;
    e.seq = parse_int(f[2], "seq");
    e.view_deg = parse_int(f[3], "view");
    const auto dist = parse_distance(f[4]);
    if (!dist)
      throw std::runtime_error("manifest: unknown distance '" + f[4] + "'");
    e.distance = *dist;
    e.frames = parse_int(f[5], "frame count");
    entries.push_back(std::move(e));
  }
  return entries;
}

IdentitySplit split_identities(const std::vector<ManifestEntry>& entries, double train_fraction)
{
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("split_identities: train fraction must lie in (0, 1)");
  std::set<std::string> ids;
  for (const ManifestEntry& e : entries)
    ids.insert(e.identity);
  const std::vector<std::string> sorted(ids.begin(), ids.end());
  auto n_train = static_cast<std::size_t>(train_fraction * static_cast<double>(sorted.size()));
  n_train = std::clamp<std::size_t>(n_train, sorted.size() > 1 ? 1 : 0, sorted.size() > 1 ? sorted.size() - 1 : 0);
  IdentitySplit split;
  split.train.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(sorted.begin() + static_cast<std::ptrdiff_t>(n_train), sorted.end());
  return split;
}

std::vector<ManifestEntry> select_identities(const std::vector<ManifestEntry>& entries,
                                             const std::vector<std::string>& identities)
{
  const std::set<std::string> keep(identities.begin(), identities.end());
  std::vector<ManifestEntry> out;
  for (const ManifestEntry& e : entries)
    if (keep.count(e.identity))
      out.push_back(e);
  return out;
}

PointFrame preprocess(const PointFrame& frame, const PreprocessOptions& options)
{
  PointFrame out = options.roi ? crop_roi(frame, *options.roi) : frame;
  if (options.remove_ground)
    out = remove_ground(out, options.ground_lift);
  if (options.denoise)
    out = denoise(out, options.denoise_cell);
  return out;
}

std::vector<AlignedImage> render_sequence(const std::vector<PointFrame>& frames, ViewKind view,
                                          const RenderOptions& options)
{
  ProjectionConfig cfg = options.projection;
  cfg.view = view;
  cfg.validate();

  std::vector<DepthImage> depth;
  depth.reserve(frames.size());
  for (const PointFrame& f : frames)
    depth.push_back(project(preprocess(f, options.preprocess), cfg));

  std::optional<DepthRange> shared;
  if (options.scope == NormalizationScope::PerSequence)
    for (const DepthImage& d : depth)
      if (const auto r = nonzero_depth_range(d))
        shared = shared ? DepthRange{std::min(shared->min, r->min), std::max(shared->max, r->max)} : *r;

  std::vector<AlignedImage> out;
  out.reserve(depth.size());
  for (const DepthImage& d : depth)
  {
    const GrayImage gray = shared ? normalize_depth(d, *shared) : normalize_depth(d);
    AlignedImage img = align_and_resize(gray);
    if (options.input == InputMode::Silhouette)
      img = silhouette_from_depth(img);
    out.push_back(img);
  }
  return out;
}

std::vector<SequenceImages> load_sequence_images(const fs::path& root, const std::vector<ManifestEntry>& entries,
                                                 const std::vector<ViewKind>& views, const RenderOptions& options,
                                                 unsigned threads)
{
  if (views.empty())
    throw std::invalid_argument("load_sequence_images: no views requested");
  std::vector<SequenceImages> out(entries.size());
  parallel_for(entries.size(), threads, [&](std::size_t i) {
    const auto frames = read_sequence_frames(entries[i].dir(root));
    if (frames.empty())
      throw std::runtime_error("sequence " + entries[i].sequence_id() + " has no frames");
    SequenceImages s;
    s.entry = entries[i];
    for (ViewKind v : views)
      s.views.push_back(render_sequence(frames, v, options));
    out[i] = std::move(s);
  });
  return out;
}

} // namespace lidargait
