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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion of the selected group fails.
//
//   acceptance --group fast            criteria 1-5, 9, 10 (minutes)
//   acceptance --group desk --work D   criteria 6-8, full desk-scale runs (about an hour per run on one core)

#include "lidargait/encoder.hpp"
#include "lidargait/evaluation.hpp"
#include "lidargait/losses.hpp"
#include "lidargait/projection.hpp"
#include "lidargait/rng.hpp"
#include "lidargait_cli/cli.hpp"
#include "test_support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

using namespace lidargait;
namespace fs = std::filesystem;
namespace lt = lidargait::testing;

namespace {

// Tolerances and thresholds.
constexpr int kOracleFrames = 100;
constexpr std::size_t kOraclePoints = 1000;
constexpr double kOracleSeconds = 10.0;
constexpr double kMicroGradTol = 1e-6;
constexpr double kFullGradTol = 1e-4;
constexpr int kGradSeeds = 20;
constexpr double kGradStep = 1e-5;
constexpr double kGradFloor = 1e-6;
constexpr int kPermutations = 1000;
constexpr double kCeTol = 1e-12;
constexpr double kDeskRank1 = 0.70;
constexpr double kDeskSeconds = 30.0 * 60.0;
constexpr double kAblationSlack = 0.02;
constexpr double kLossDrop = 0.5;
constexpr int kLossWindow = 20;

int failures = 0;

void report(const std::string& id, bool pass, const std::string& what)
{
  std::printf("[%s] %s %s\n", pass ? "PASS" : "FAIL", id.c_str(), what.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string fmt(const char* f, double a)
{
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion_1()
{
  const auto t0 = std::chrono::steady_clock::now();
  int identical = 0;
  for (int i = 0; i < kOracleFrames; ++i)
  {
    const PointFrame f = lt::random_frame(static_cast<std::uint64_t>(1000 + i), kOraclePoints, 10.0);
    identical += project_range_view(f, ProjectionConfig{}) == lt::naive_range_view(f, 0.192, 0.2);
  }
  const double secs = seconds_since(t0);
  report("C1", identical == kOracleFrames && secs < kOracleSeconds,
         "projection oracle: " + std::to_string(identical) + "/" + std::to_string(kOracleFrames) +
           " frames bit-identical, " + fmt("%.2f s", secs) + " (limit 10 s)");
}

void criterion_2()
{
  const RangeCell a = range_cell({3, 4, 1}, 0.192, 0.2);
  const RangeCell b = range_cell({1, 0, 0}, 0.192, 0.2);
  PointFrame pair;
  pair.points = {{3, 0, 0}, {2, 0, 0}};
  const DepthImage img = project_range_view(pair, ProjectionConfig{});
  const bool ok = a.r == 276 && a.c == 56 && a.depth == 5.0f && b.r == 0 && b.c == 0 && b.depth == 1.0f &&
                  img.pixels.size() == 1 && img.pixels[0] == 2.0f;
  std::ostringstream s;
  s << "scalar fixtures: (3,4,1) -> (" << a.r << "," << a.c << "," << a.depth << "), (1,0,0) -> (" << b.r << ","
    << b.c << "," << b.depth << "), collision keeps " << (img.pixels.empty() ? -1.0f : img.pixels[0]);
  report("C2", ok, s.str());
}

Architecture micro_arch()
{
  Architecture a;
  a.convs = {{4, false}};
  a.input_size = 8;
  a.parts = 2;
  a.embed_dim = 4;
  a.n_classes = 3;
  return a;
}

void criterion_3()
{
  double micro = 0.0, full = 0.0;
  std::size_t micro_checked = 0, full_checked = 0;
  for (std::uint64_t seed = 1; seed <= kGradSeeds; ++seed)
  {
    const auto prob = lt::random_problem(micro_arch(), seed, 2, 2, 2);
    std::vector<std::size_t> all(prob.params.values.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto r = lt::check_gradients(prob, all, kGradStep, kGradFloor);
    micro = std::max(micro, r.max_rel_error);
    micro_checked += r.checked;
  }
  Architecture a;
  a.input_size = 8;
  a.parts = 2;
  a.embed_dim = 8;
  a.n_classes = 3;
  for (std::uint64_t seed = 1; seed <= kGradSeeds; ++seed)
  {
    const auto prob = lt::random_problem(a, 100 + seed, 2, 2, 2);
    const auto r = lt::check_gradients(prob, lt::sample_indices(prob.params.layout, 6, seed), kGradStep, kGradFloor);
    full = std::max(full, r.max_rel_error);
    full_checked += r.checked;
  }
  report("C3", micro < kMicroGradTol && full < kFullGradTol,
         "gradients over " + std::to_string(kGradSeeds) + " seeds: micro-net max rel " + fmt("%.2e", micro) +
           " (< 1e-6, " + std::to_string(micro_checked) + " params), full encoder max rel " + fmt("%.2e", full) +
           " (< 1e-4, " + std::to_string(full_checked) + " params)");
}

void criterion_4()
{
  Architecture a;
  a.n_classes = 4;
  EncoderParams<float> p(a);
  init_params(p, 4);
  Xorshift64Star rng(44);
  SequenceInput<float> in(1);
  for (int f = 0; f < 5; ++f)
  {
    Tensor<float> t({1, a.input_size, a.input_size});
    for (float& v : t.values)
      v = rng.index(3) == 0 ? static_cast<float>(rng.uniform()) : 0.0f;
    in[0].push_back(std::move(t));
  }
  const auto ref = forward_sequence(p, in).head.embedding;
  int identical = 0;
  for (int trial = 0; trial < kPermutations; ++trial)
  {
    auto& frames = in[0];
    for (std::size_t i = frames.size(); i-- > 1;)
      std::swap(frames[i], frames[rng.index(i + 1)]);
    identical += forward_sequence(p, in).head.embedding == ref;
  }
  report("C4", identical == kPermutations,
         "set pooling: " + std::to_string(identical) + "/" + std::to_string(kPermutations) +
           " frame permutations give bitwise-identical embeddings");
}

void criterion_5()
{
  const std::vector<std::vector<double>> same(6, std::vector<double>(8, 0.25));
  const auto tri = triplet_loss_bap(same, {0, 0, 1, 1, 2, 2}, 4, 0.2);
  const std::vector<std::vector<double>> uniform(3, std::vector<double>(16, 0.7));
  const auto ce = cross_entropy_loss(uniform, {0, 1, 3}, 4);
  const double comb = combined_loss(0.5, 1.0, 1.0, 0.1);
  const bool ok = tri.loss == 0.2 && std::abs(ce.loss - std::log(4.0)) < kCeTol && std::abs(comb - 0.6) < 1e-15;
  report("C5", ok,
         "loss fixtures: identical embeddings triplet " + fmt("%.17g", tri.loss) + " (margin 0.2), CE - ln4 " +
           fmt("%.1e", ce.loss - std::log(4.0)) + ", combined " + fmt("%.17g", comb));
}

EmbeddingRecord rec(const std::string& id, Attribute a, int view, float x)
{
  EmbeddingRecord r;
  r.identity = id;
  r.attribute = a;
  r.view_deg = view;
  r.embedding = {x};
  r.sequence_id = ManifestEntry{id, a, 0, view, DistanceTag::Near, 1}.sequence_id();
  return r;
}

void criterion_9()
{
  const std::vector<std::vector<double>> d{{0.1, 0.5, 0.9}, {0.4, 0.4, 0.8}, {0.7, 0.8, 0.6}};
  const std::vector<std::string> labels{"A", "B", "C"};
  const auto r1 = rank_k_accuracy(d, labels, labels, 1).accuracy();
  const auto r5 = rank_k_accuracy(d, labels, labels, 5).accuracy();

  // Hand-enumerated cells, see the evaluation unit tests for the derivation.
  const EmbeddingSet s{rec("A", Attribute::Normal, 0, 0.0f),  rec("B", Attribute::Normal, 0, 10.0f),
                       rec("A", Attribute::Bag, 0, 6.0f),     rec("B", Attribute::Bag, 0, 9.0f),
                       rec("A", Attribute::Normal, 90, 2.0f), rec("B", Attribute::Normal, 90, 3.0f),
                       rec("A", Attribute::Bag, 90, 2.4f),    rec("B", Attribute::Bag, 90, 20.0f)};
  const EvalMatrix n = cross_view_matrix(s, Attribute::Bag, 1, GalleryRole::NormalGallery);
  const EvalMatrix v = cross_view_matrix(s, Attribute::Bag, 1, GalleryRole::VariantGallery);
  const std::vector<double> want_n{0.5, 0.5, 1.0, 1.0}, want_v{1.0, 0.5, 0.5, 0.5};
  bool cells = n.cells.size() == 2 && v.cells.size() == 2;
  for (std::size_t i = 0; cells && i < 4; ++i)
    cells = n.cells[i / 2][i % 2] == want_n[i] && v.cells[i / 2][i % 2] == want_v[i];
  report("C9", r1 == 2.0 / 3.0 && r5 == 1.0 && cells,
         "evaluation fixture: 3x3 grid rank-1 " + fmt("%.6f", r1.value_or(-1)) + " (2/3), rank-5 " +
           fmt("%.1f", r5.value_or(-1)) + ", role-swap cells " + (cells ? "match" : "differ from") +
           " hand enumeration");
}

struct Cli
{
  int status = 0;
  std::string out, err;
};

Cli run_cli(const std::vector<std::string>& args)
{
  std::ostringstream out, err;
  Cli c;
  c.status = cli::run(args, out, err);
  c.out = out.str();
  c.err = err.str();
  if (c.status != 0)
    std::fprintf(stderr, "command failed (%d): %s\n", c.status, c.err.c_str());
  return c;
}

bool pipeline(const fs::path& dir, const std::string& threads)
{
  const std::string data = (dir / "data").string();
  std::ofstream(dir / "run.cfg") << "p=3\nk=2\nl=3\ntotal_iters=4\nmilestones=3\ncheckpoint_interval=2\n";
  return run_cli({"synth", "--ids", "4", "--attributes", "normal,bag", "--view-angles", "0,90,180", "--seed", "11",
                  "--out", data, "--threads", threads})
             .status == 0 &&
         run_cli({"train", "--data", data, "--config", (dir / "run.cfg").string(), "--out",
                  (dir / "model.ckpt").string(), "--seed", "5", "--threads", threads})
             .status == 0 &&
         run_cli({"eval", "--data", data, "--ckpt", (dir / "model.ckpt").string(), "--out", (dir / "eval").string(),
                  "--frames", "7", "--threads", threads})
             .status == 0;
}

void criterion_10()
{
  lt::TempDir a("accept_det_a"), b("accept_det_b");
  const auto t0 = std::chrono::steady_clock::now();
  const bool ran = pipeline(a.path(), "1") && pipeline(b.path(), "3");
  bool data = false, ckpt = false, reports = false;
  if (ran)
  {
    data = lt::snapshot_tree(a / "data") == lt::snapshot_tree(b / "data");
    ckpt = lt::read_file(a / "model.ckpt") == lt::read_file(b / "model.ckpt") &&
           lt::read_file(a / "model.ckpt.state") == lt::read_file(b / "model.ckpt.state") &&
           lt::read_file(a / "model.log.csv") == lt::read_file(b / "model.log.csv");
    reports = lt::snapshot_tree(a / "eval") == lt::snapshot_tree(b / "eval");
  }
  report("C10", ran && data && ckpt && reports,
         std::string("determinism: two CLI pipelines (1 vs 3 threads), datasets ") + (data ? "identical" : "DIFFER") +
           ", checkpoints " + (ckpt ? "identical" : "DIFFER") + ", reports " + (reports ? "identical" : "DIFFER") +
           fmt(", %.1f s", seconds_since(t0)));
}

// Desk-scale runs ----------------------------------------------------------

std::optional<double> report_value(const fs::path& csv, const std::string& metric, const std::string& column)
{
  std::ifstream in(csv);
  std::string line, header;
  while (std::getline(in, line))
  {
    if (line.empty() || line[0] == '#')
      continue;
    if (header.empty())
    {
      header = line;
      continue;
    }
    if (line.rfind(metric + ",", 0) != 0)
      continue;
    std::vector<std::string> h, v;
    std::stringstream hs(header), vs(line);
    std::string cell;
    while (std::getline(hs, cell, ','))
      h.push_back(cell);
    while (std::getline(vs, cell, ','))
      v.push_back(cell);
    if (v.size() < h.size())
      v.resize(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
      if (h[i] == column && !v[i].empty())
        return std::stod(v[i]) / 100.0;
  }
  return std::nullopt;
}

struct LossSummary
{
  double first = 0.0, last = 0.0;
  bool ok = false;
};

LossSummary loss_summary(const fs::path& log_csv)
{
  std::ifstream in(log_csv);
  std::string line;
  std::vector<double> totals;
  while (std::getline(in, line))
  {
    if (line.empty() || line[0] == '#' || line.rfind("iter", 0) == 0)
      continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ','))
      cells.push_back(cell);
    if (cells.size() == 5)
      totals.push_back(std::stod(cells[3]));
  }
  LossSummary s;
  if (totals.size() < 2 * static_cast<std::size_t>(kLossWindow))
    return s;
  for (int i = 0; i < kLossWindow; ++i)
  {
    s.first += totals[static_cast<std::size_t>(i)] / kLossWindow;
    s.last += totals[totals.size() - 1 - static_cast<std::size_t>(i)] / kLossWindow;
  }
  s.ok = true;
  return s;
}

struct DeskRun
{
  bool ok = false;
  double train_seconds = 0.0;
  double eval_seconds = 0.0;
  std::optional<double> bag_rank1;
};

DeskRun desk_run(const fs::path& work, const std::string& name, const std::vector<std::string>& extra, bool reuse)
{
  DeskRun r;
  const fs::path ckpt = work / (name + ".ckpt");
  const fs::path eval = work / ("eval_" + name);
  auto t0 = std::chrono::steady_clock::now();
  if (!(reuse && fs::exists(ckpt)))
  {
    std::vector<std::string> args{"train", "--data", (work / "data").string(), "--preset", "desk", "--out",
                                  ckpt.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    const Cli c = run_cli(args);
    if (c.status != 0)
      return r;
    std::printf("  %s: %s", name.c_str(), c.out.c_str());
  }
  r.train_seconds = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  if (run_cli({"eval", "--data", (work / "data").string(), "--ckpt", ckpt.string(), "--out", eval.string()}).status !=
      0)
    return r;
  r.eval_seconds = seconds_since(t0);
  r.bag_rank1 = report_value(eval / "report.csv", "rank1", "Bag");
  r.ok = r.bag_rank1.has_value();
  std::printf("  %s: train %.0f s, eval %.0f s, Bag rank-1 %s\n", name.c_str(), r.train_seconds, r.eval_seconds,
              r.bag_rank1 ? fmt("%.2f%%", 100.0 * *r.bag_rank1).c_str() : "n/a");
  std::fflush(stdout);
  return r;
}

void desk_group(const fs::path& work, bool reuse)
{
  fs::create_directories(work);
  auto t0 = std::chrono::steady_clock::now();
  double synth_seconds = 0.0;
  if (!(reuse && fs::exists(work / "data" / "manifest.csv")))
  {
    fs::remove_all(work / "data");
    const Cli s = run_cli({"synth", "--ids", "40", "--attributes", "normal,bag", "--seed", "2026", "--out",
                           (work / "data").string()});
    if (s.status != 0)
    {
      report("C6", false, "desk run: synth failed");
      return;
    }
    std::printf("  synth: %s", s.out.c_str());
  }
  synth_seconds = seconds_since(t0);

  const DeskRun depth = desk_run(work, "rv_depth", {}, reuse);
  const double wall = synth_seconds + depth.train_seconds + depth.eval_seconds;
  report("C6", depth.ok && *depth.bag_rank1 >= kDeskRank1 && wall <= kDeskSeconds,
         "desk run: Bag rank-1 (Normal gallery) " +
           (depth.bag_rank1 ? fmt("%.2f%%", 100.0 * *depth.bag_rank1) : std::string("n/a")) + " (>= 70%), wall " +
           fmt("%.0f s", wall) + " (<= 1800 s; synth " + fmt("%.0f", synth_seconds) + " + train " +
           fmt("%.0f", depth.train_seconds) + " + eval " + fmt("%.0f", depth.eval_seconds) + ")");

  const LossSummary loss = loss_summary(work / "rv_depth.log.csv");
  report("C6.loss", loss.ok && loss.last <= kLossDrop * loss.first,
         "desk training loss: mean of first " + std::to_string(kLossWindow) + " iterations " +
           fmt("%.4f", loss.first) + ", last " + std::to_string(kLossWindow) + " " + fmt("%.4f", loss.last) +
           " (decrease >= 50% required)");

  const DeskRun sil = desk_run(work, "rv_silhouette", {"--input", "silhouette"}, reuse);
  report("C7", depth.ok && sil.ok && *depth.bag_rank1 >= *sil.bag_rank1 - kAblationSlack,
         "depth vs silhouette: depth " + (depth.bag_rank1 ? fmt("%.2f%%", 100.0 * *depth.bag_rank1) : "n/a") +
           ", silhouette " + (sil.bag_rank1 ? fmt("%.2f%%", 100.0 * *sil.bag_rank1) : "n/a") +
           " (depth >= silhouette - 2 points)");

  const DeskRun mv = desk_run(work, "rv_rsv_depth", {"--views", "rv,rsv"}, reuse);
  report("C8", mv.ok,
         "multi-view: rv " + (depth.bag_rank1 ? fmt("%.2f%%", 100.0 * *depth.bag_rank1) : "n/a") + ", rv+rsv " +
           (mv.bag_rank1 ? fmt("%.2f%%", 100.0 * *mv.bag_rank1) : "n/a") + " (completes and reports; no threshold)");
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Acceptance checks"};
  std::string group = "fast";
  std::string work = (fs::temp_directory_path() / "lidargait_acceptance").string();
  bool reuse = false;
  app.add_option("--group", group, "fast, desk or all")->check(CLI::IsMember({"fast", "desk", "all"}));
  app.add_option("--work", work, "Working directory for the desk runs");
  app.add_flag("--reuse", reuse, "Reuse a dataset and checkpoints already in --work");
  CLI11_PARSE(app, argc, argv);

  if (group == "fast" || group == "all")
  {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_9();
    criterion_10();
  }
  if (group == "desk" || group == "all")
    desk_group(work, reuse);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
