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
#include "lidargait/encoder.hpp"
#include "lidargait/losses.hpp"
#include "lidargait/projection.hpp"
#include "lidargait/rng.hpp"
#include "lidargait/synth.hpp"
#include "lidargait/training.hpp"

#include <benchmark/benchmark.h>

using namespace lidargait;

namespace {

PointFrame random_frame(std::size_t n, std::uint64_t seed)
{
  Xorshift64Star rng(seed);
  PointFrame f;
  for (std::size_t i = 0; i < n; ++i)
    f.points.push_back({rng.uniform(1.0, 10.0), rng.uniform(-5.0, 5.0), rng.uniform(-2.0, 2.0)});
  return f;
}

GaitSequence walking_sequence(Attribute attribute = Attribute::Normal)
{
  return generate_sequence(sample_identity(3), 90, DistanceTag::Near, attribute, LidarModel{}, 1);
}

SequenceInput<float> random_input(int frames, std::uint64_t seed)
{
  Xorshift64Star rng(seed);
  SequenceInput<float> in(1);
  for (int f = 0; f < frames; ++f)
  {
    Tensor<float> t({1, kAlignedSize, kAlignedSize});
    for (float& v : t.values)
      v = rng.index(4) == 0 ? static_cast<float>(rng.uniform()) : 0.0f;
    in[0].push_back(std::move(t));
  }
  return in;
}

void BM_RangeView(benchmark::State& state)
{
  const PointFrame f = random_frame(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(project_range_view(f, ProjectionConfig{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RangeView)->Arg(1000)->Arg(10000);

void BM_Orthographic(benchmark::State& state)
{
  const PointFrame f = random_frame(2000, 2);
  ProjectionConfig cfg;
  cfg.view = static_cast<ViewKind>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(project_orthographic(f, cfg));
}
BENCHMARK(BM_Orthographic)
  ->Arg(static_cast<int>(ViewKind::RightSideView))
  ->Arg(static_cast<int>(ViewKind::BirdsEyeView));

void BM_ScanFrame(benchmark::State& state)
{
  const BodyPose pose = pose_at(sample_identity(5), 0.7);
  const RigidTransform place{1.2, {7.0, 0.0, -1.2}};
  for (auto _ : state)
    benchmark::DoNotOptimize(scan_frame(pose, place, LidarModel{}));
}
BENCHMARK(BM_ScanFrame);

void BM_GenerateSequence(benchmark::State& state)
{
  for (auto _ : state)
    benchmark::DoNotOptimize(walking_sequence(Attribute::Bag));
}
BENCHMARK(BM_GenerateSequence)->Unit(benchmark::kMillisecond);

void BM_RenderSequence(benchmark::State& state)
{
  const GaitSequence seq = walking_sequence();
  const auto view = static_cast<ViewKind>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(render_sequence(seq.frames, view, RenderOptions{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(seq.frames.size()));
}
BENCHMARK(BM_RenderSequence)->Arg(static_cast<int>(ViewKind::RangeView))->Unit(benchmark::kMillisecond);

void BM_ConvForward(benchmark::State& state)
{
  Architecture a;
  a.n_classes = 30;
  EncoderParams<float> p(a);
  init_params(p, 1);
  const auto in = random_input(1, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(conv_forward(p, 0, in[0][0]));
}
BENCHMARK(BM_ConvForward)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state)
{
  Architecture a;
  a.n_classes = 30;
  EncoderParams<float> p(a);
  init_params(p, 1);
  const auto in = random_input(static_cast<int>(state.range(0)), 3);
  std::vector<float> de(a.embedding_size(), 0.01f), dl(static_cast<std::size_t>(a.parts * a.n_classes), 0.01f);
  std::vector<float> grad(p.values.size());
  for (auto _ : state)
  {
    const auto fwd = forward_sequence(p, in, true);
    backward_sequence(p, in, fwd, de, dl, grad);
    benchmark::DoNotOptimize(grad.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(2)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_TripletLoss(benchmark::State& state)
{
  const int n = static_cast<int>(state.range(0));
  Xorshift64Star rng(9);
  std::vector<std::vector<double>> emb(static_cast<std::size_t>(n), std::vector<double>(512));
  std::vector<int> labels;
  for (int i = 0; i < n; ++i)
  {
    labels.push_back(i / 8);
    for (double& v : emb[static_cast<std::size_t>(i)])
      v = rng.uniform(-1.0, 1.0);
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(triplet_loss_bap(emb, labels, 4, 0.2));
}
BENCHMARK(BM_TripletLoss)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
