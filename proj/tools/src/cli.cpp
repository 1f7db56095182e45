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

#include "lidargait_cli/cli.hpp"

#include "lidargait/checkpoint.hpp"
#include "lidargait/dataset.hpp"
#include "lidargait/evaluation.hpp"
#include "lidargait/image_io.hpp"
#include "lidargait/pcf_io.hpp"
#include "lidargait/run_config.hpp"
#include "lidargait/synth.hpp"
#include "lidargait/training.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace lidargait::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_commas(const std::string& s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      out.push_back(item);
  return out;
}

std::vector<Attribute> parse_attributes(const std::string& list)
{
  if (list == "all")
    return {kAllAttributes.begin(), kAllAttributes.end()};
  std::vector<Attribute> out;
  for (const std::string& name : split_commas(list))
  {
    const auto a = parse_attribute(name);
    if (!a)
      throw CLI::ValidationError("--attributes", "unknown attribute '" + name + "'");
    if (std::find(out.begin(), out.end(), *a) == out.end())
      out.push_back(*a);
  }
  if (out.empty())
    throw CLI::ValidationError("--attributes", "no attributes given");
  return out;
}

std::vector<ViewKind> parse_views(const std::string& list)
{
  std::vector<ViewKind> out;
  for (const std::string& name : split_commas(list))
  {
    const auto v = parse_view_kind(name);
    if (!v)
      throw CLI::ValidationError("--views", "unknown view '" + name + "'");
    out.push_back(*v);
  }
  if (out.empty())
    throw CLI::ValidationError("--views", "no views given");
  return out;
}

std::vector<int> parse_view_angles(const std::string& list)
{
  if (list == "all")
    return {kViewAngles.begin(), kViewAngles.end()};
  std::vector<int> out;
  for (const std::string& s : split_commas(list))
  {
    int v = 0;
    try
    {
      v = std::stoi(s);
    }
    catch (const std::exception&)
    {
      throw CLI::ValidationError("--view-angles", "bad angle '" + s + "'");
    }
    if (std::find(kViewAngles.begin(), kViewAngles.end(), v) == kViewAngles.end())
      throw CLI::ValidationError("--view-angles", "angle " + s + " is not one of the 12 viewpoints");
    out.push_back(v);
  }
  return out;
}

struct SynthArgs
{
  int ids = 0;
  std::string attributes = "normal";
  std::string view_angles = "all";
  int seqs = 1;
  std::uint64_t seed = 0;
  double far_fraction = 0.25;
  std::string out;
  unsigned threads = 0;
};

struct ProjectArgs
{
  std::string in;
  std::string view = "rv";
  std::string out;
  bool silhouette = false;
  bool raw = false;
};

struct TrainArgs
{
  std::string data;
  std::string config;
  std::string preset = "desk";
  std::string views = "rv";
  std::string input = "depth";
  std::string out;
  std::string log;
  std::optional<std::uint64_t> seed;
  std::optional<int> iters;
  std::optional<unsigned> threads;
  bool resume = false;
};

struct EvalArgs
{
  std::string data;
  std::string ckpt;
  std::optional<int> frames;
  std::string gallery = "normal";
  std::string views;
  std::string out;
  bool heatmap = false;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

RenderOptions render_options(InputMode input)
{
  RenderOptions r;
  r.input = input;
  return r;
}

int cmd_synth(const SynthArgs& a, std::ostream& out)
{
  DatasetConfig cfg;
  cfg.n_ids = a.ids;
  cfg.attributes = parse_attributes(a.attributes);
  cfg.views = parse_view_angles(a.view_angles);
  cfg.seqs_per_attribute = a.seqs;
  cfg.seed = a.seed;
  cfg.far_fraction = a.far_fraction;
  cfg.threads = a.threads;
  const DatasetSummary s = generate_dataset(cfg, a.out);
  out << "manifest: " << s.manifest.string() << "\n";
  out << s.sequences << " sequences, " << s.frames << " frames\n";
  return 0;
}

int cmd_project(const ProjectArgs& a, std::ostream& out)
{
  const auto view = parse_view_kind(a.view);
  if (!view)
    throw CLI::ValidationError("--view", "unknown view '" + a.view + "'");
  if (!fs::is_directory(a.in))
    throw std::runtime_error("input sequence directory " + a.in + " does not exist");
  const auto frames = read_sequence_frames(a.in);
  if (frames.empty())
    throw std::runtime_error("no .pcf frames in " + a.in);
  RenderOptions opts = render_options(a.silhouette ? InputMode::Silhouette : InputMode::Depth);
  if (a.raw)
    opts.preprocess = PreprocessOptions{std::nullopt, false, kDefaultGroundLift, false, kDefaultDenoiseCell};
  const auto images = render_sequence(frames, *view, opts);
  fs::create_directories(a.out);
  for (std::size_t i = 0; i < images.size(); ++i)
  {
    std::string name = frame_file_name(i);
    name.replace(name.size() - 4, 4, ".pgm");
    write_pgm(fs::path(a.out) / name, images[i]);
  }
  out << images.size() << " images written to " << a.out << "\n";
  return 0;
}

fs::path default_log_path(const fs::path& ckpt)
{
  fs::path p = ckpt;
  p.replace_extension(".log.csv");
  return p;
}

int cmd_train(const TrainArgs& a, std::ostream& out)
{
  TrainingConfig cfg;
  if (a.preset == "desk")
    cfg = TrainingConfig::desk();
  else if (a.preset == "paper")
    cfg = TrainingConfig::paper();
  else
    throw CLI::ValidationError("--preset", "expected desk or paper");

  Architecture arch;
  arch.views = parse_views(a.views);
  const auto mode = parse_input_mode(a.input);
  if (!mode)
    throw CLI::ValidationError("--input", "expected depth or silhouette");
  arch.input = *mode;
  if (!a.config.empty())
    apply(RunConfig::load(a.config), cfg, arch);
  if (a.seed)
    cfg.seed = *a.seed;
  if (a.threads)
    cfg.threads = *a.threads;
  if (a.iters)
  {
    cfg.total_iters = *a.iters;
    if (cfg.preset == "desk")
      cfg.milestones = {*a.iters * 3 / 5, *a.iters * 4 / 5};
  }
  cfg.validate();

  const fs::path root = a.data;
  const auto entries = read_manifest(root / kManifestName);
  const IdentitySplit split = split_identities(entries);
  const auto start = std::chrono::steady_clock::now();
  TrainingSet set = TrainingSet::build(
    load_sequence_images(root, select_identities(entries, split.train), arch.views, render_options(arch.input),
                         cfg.threads));
  arch.n_classes = static_cast<int>(set.n_classes());
  arch.validate();
  out << "training on " << set.sequences.size() << " sequences of " << set.n_classes() << " identities ("
      << arch.descriptor() << ")\n";

  const fs::path ckpt = a.out;
  if (ckpt.has_parent_path())
    fs::create_directories(ckpt.parent_path());
  const fs::path log_path = a.log.empty() ? default_log_path(ckpt) : fs::path(a.log);

  TrainOptions opts;
  if (a.resume)
  {
    auto params = load_checkpoint(ckpt);
    auto state = load_train_state(state_path(ckpt));
    opts.resume.emplace(std::move(params), std::move(state));
  }
  std::ofstream log(log_path, a.resume ? std::ios::app : std::ios::trunc);
  if (!log)
    throw std::runtime_error("cannot write log " + log_path.string());
  opts.log = &log;
  opts.checkpoint = [&](const EncoderParams<float>& params, const TrainState& state) {
    save_checkpoint(ckpt, params);
    save_train_state(state_path(ckpt), state);
  };

  const TrainResult result = train(set, arch, cfg, opts);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!result.log.empty())
  {
    const auto& first = result.log.front();
    const auto& last = result.log.back();
    out << "iterations " << first.iter << ".." << last.iter << ": loss " << first.total << " -> " << last.total << "\n";
  }
  out << "checkpoint: " << ckpt.string() << "\nlog: " << log_path.string() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", seconds);
  out << "elapsed " << buf << " s\n";
  return 0;
}

std::string pct(const std::optional<double>& v)
{
  if (!v)
    return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *v);
  return buf;
}

int cmd_eval(const EvalArgs& a, std::ostream& out)
{
  GalleryRole role;
  if (a.gallery == "normal")
    role = GalleryRole::NormalGallery;
  else if (a.gallery == "variant")
    role = GalleryRole::VariantGallery;
  else
    throw CLI::ValidationError("--gallery", "expected normal or variant");

  const EncoderParams<float> params = load_checkpoint(a.ckpt);
  if (!a.views.empty() && parse_views(a.views) != params.arch.views)
    throw std::runtime_error("checkpoint was trained on views '" + params.arch.descriptor() +
                             "', not '" + a.views + "'");

  const fs::path root = a.data;
  const auto entries = read_manifest(root / kManifestName);
  const IdentitySplit split = split_identities(entries);
  const auto sequences = load_sequence_images(root, select_identities(entries, split.test), params.arch.views,
                                              render_options(params.arch.input), a.threads);
  const ExtractResult extracted = extract_embeddings(params, sequences, a.frames, a.seed, a.threads);
  if (extracted.skipped > 0)
    out << "warning: skipped " << extracted.skipped << " sequences without frames\n";
  const AttributeReport report = attribute_report(extracted.embeddings, role);

  std::string suffix;
  if (role == GalleryRole::VariantGallery)
    suffix += "_variant";
  if (a.frames)
    suffix += "_frames" + std::to_string(*a.frames);

  const fs::path dir = a.out;
  fs::create_directories(dir);
  ReportContext ctx{split.train, split.test, a.frames, fs::path(a.ckpt).filename().string()};
  const fs::path report_path = dir / ("report" + suffix + ".csv");
  write_report_csv(report_path, report, ctx);
  for (std::size_t i = 0; i < kAllAttributes.size(); ++i)
  {
    if (!report.attributes[i].rank1)
      continue;
    const std::string name(attribute_name(kAllAttributes[i]));
    write_matrix_csv(dir / ("matrix_" + name + "_rank1" + suffix + ".csv"), report.rank1_matrices[i]);
    write_matrix_csv(dir / ("matrix_" + name + "_rank5" + suffix + ".csv"), report.rank5_matrices[i]);
    if (a.heatmap)
      write_heatmap_pgm(dir / ("heatmap_" + name + "_rank1" + suffix + ".pgm"), report.rank1_matrices[i]);
  }

  out << "evaluated " << extracted.embeddings.size() << " sequences of " << split.test.size()
      << " test identities, gallery=" << gallery_role_name(role)
      << ", frames=" << (a.frames ? std::to_string(*a.frames) : std::string("all")) << "\n";
  for (std::size_t i = 0; i < kAllAttributes.size(); ++i)
    if (report.attributes[i].rank1)
      out << attribute_label(kAllAttributes[i]) << ": rank1 " << pct(report.attributes[i].rank1) << " rank5 "
          << pct(report.attributes[i].rank5) << "\n";
  out << "overall (pooled): rank1 " << pct(report.overall_pooled.rank1) << " rank5 "
      << pct(report.overall_pooled.rank5) << "\n";
  out << "overall (mean): rank1 " << pct(report.overall_mean.rank1) << " rank5 " << pct(report.overall_mean.rank5)
      << "\n";
  out << "report: " << report_path.string() << "\n";
  return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"LiDAR gait recognition: synthesis, projection, training and evaluation", "lidargait"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic LiDAR gait dataset");
  synth->add_option("--ids", sa.ids, "Number of identities")->required()->check(CLI::Range(2, 1000000));
  synth->add_option("--attributes", sa.attributes, "Comma-separated attributes, or 'all'")->capture_default_str();
  synth->add_option("--view-angles", sa.view_angles, "Comma-separated viewpoints in degrees, or 'all'")
    ->capture_default_str();
  synth->add_option("--seqs", sa.seqs, "Sequences per identity and attribute")
    ->check(CLI::PositiveNumber)
    ->capture_default_str();
  synth->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
  synth->add_option("--far-fraction", sa.far_fraction, "Probability of the far crossing")
    ->check(CLI::Range(0.0, 1.0))
    ->capture_default_str();
  synth->add_option("--out", sa.out, "Output dataset directory")->required();
  synth->add_option("--threads", sa.threads, "Worker threads (0 = all cores)");

  ProjectArgs pa;
  auto* project = app.add_subcommand("project", "Render one sequence to aligned 64x64 PGM images");
  project->add_option("--in", pa.in, "Sequence directory of .pcf frames")->required();
  project->add_option("--view", pa.view, "rv, rsv or bev")->capture_default_str();
  project->add_option("--out", pa.out, "Output directory")->required();
  project->add_flag("--silhouette", pa.silhouette, "Binarize the depth images");
  project->add_flag("--raw", pa.raw, "Skip ROI cropping, ground removal and denoising");

  TrainArgs ta;
  auto* trainc = app.add_subcommand("train", "Train the encoder on the training identities of a dataset");
  trainc->add_option("--data", ta.data, "Dataset directory")->required();
  trainc->add_option("--config", ta.config, "key=value overrides file");
  trainc->add_option("--preset", ta.preset, "desk or paper")->capture_default_str();
  trainc->add_option("--views", ta.views, "rv | rv,rsv | rv,rsv,bev")->capture_default_str();
  trainc->add_option("--input", ta.input, "depth or silhouette")->capture_default_str();
  trainc->add_option("--out", ta.out, "Checkpoint path")->required();
  trainc->add_option("--log", ta.log, "Loss log CSV (default: <checkpoint>.log.csv)");
  trainc->add_option("--seed", ta.seed, "Random seed");
  trainc->add_option("--iters", ta.iters, "Override the number of iterations")->check(CLI::NonNegativeNumber);
  trainc->add_option("--threads", ta.threads, "Worker threads (0 = all cores)");
  trainc->add_flag("--resume", ta.resume, "Continue from the checkpoint at --out and its .state file");

  EvalArgs ea;
  auto* evalc = app.add_subcommand("eval", "Cross-view evaluation on the test identities");
  evalc->add_option("--data", ea.data, "Dataset directory")->required();
  evalc->add_option("--ckpt", ea.ckpt, "Checkpoint")->required();
  evalc->add_option("--frames", ea.frames, "Frames sampled per sequence")->check(CLI::PositiveNumber);
  evalc->add_option("--gallery", ea.gallery, "normal or variant")->capture_default_str();
  evalc->add_option("--views", ea.views, "Expected views of the checkpoint");
  evalc->add_option("--out", ea.out, "Output directory")->required();
  evalc->add_flag("--heatmap", ea.heatmap, "Also write rank-1 heatmap PGMs");
  evalc->add_option("--seed", ea.seed, "Seed for frame sampling")->capture_default_str();
  evalc->add_option("--threads", ea.threads, "Worker threads (0 = all cores)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try
  {
    app.parse(reversed);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e, out, err);
    if (code != 0)
      err << app.help() << std::flush;
    return code;
  }

  try
  {
    if (synth->parsed())
      return cmd_synth(sa, out);
    if (project->parsed())
      return cmd_project(pa, out);
    if (trainc->parsed())
      return cmd_train(ta, out);
    return cmd_eval(ea, out);
  }
  catch (const CLI::ValidationError& e)
  {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  catch (const NonFiniteLoss& e)
  {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace lidargait::cli
