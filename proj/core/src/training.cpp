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

#include "lidargait/training.hpp"

#include "lidargait/losses.hpp"
#include "lidargait/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace lidargait {

namespace {

constexpr std::uint64_t kInitTag = 0x1A17;
constexpr std::uint64_t kBatchTag = 0xBA7C;

} // namespace

TrainingConfig TrainingConfig::desk()
{
  TrainingConfig c;
  c.preset = "desk";
  c.p = 8;
  c.k = 2;
  c.l = 2;
  c.lr0 = 0.01;
  c.total_iters = 2000;
  c.milestones = {1200, 1600};
  return c;
}

TrainingConfig TrainingConfig::paper()
{
  TrainingConfig c;
  c.preset = "paper";
  c.p = 8;
  c.k = 8;
  c.l = 10;
  c.lr0 = 0.1;
  c.total_iters = 40000;
  c.milestones = {20000, 30000};
  return c;
}

void TrainingConfig::validate() const
{
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    throw std::invalid_argument("training: alpha and beta must be >= 0");
  if (!(margin > 0.0))
    throw std::invalid_argument("training: margin must be > 0");
  if (p < 1 || k < 1 || l < 1 || p * k < 2)
    throw std::invalid_argument("training: p, k, l >= 1 and p * k >= 2 required");
  if (!(lr0 > 0.0) || !(weight_decay >= 0.0) || !(momentum >= 0.0 && momentum < 1.0))
    throw std::invalid_argument("training: bad optimizer settings");
  if (total_iters < 0 || checkpoint_interval < 0)
    throw std::invalid_argument("training: iteration counts must be >= 0");
  if (!std::is_sorted(milestones.begin(), milestones.end()))
    throw std::invalid_argument("training: milestones must be increasing");
}

double TrainingConfig::lr_at(int iteration) const
{
  double lr = lr0;
  for (int m : milestones)
    if (m <= iteration)
      lr *= 0.1;
  return lr;
}

TrainingSet TrainingSet::build(std::vector<SequenceImages> sequences)
{
  TrainingSet set;
  std::map<std::string, int> ids;
  for (const SequenceImages& s : sequences)
    if (s.frame_count() > 0)
      ids.emplace(s.entry.identity, 0);
  for (auto& [id, cls] : ids)
  {
    cls = static_cast<int>(set.classes.size());
    set.classes.push_back(id);
  }
  set.by_class.resize(set.classes.size());
  for (SequenceImages& s : sequences)
  {
    if (s.frame_count() == 0)
      continue;
    const int cls = ids.at(s.entry.identity);
    set.by_class[static_cast<std::size_t>(cls)].push_back(set.sequences.size());
    set.labels.push_back(cls);
    set.sequences.push_back(std::move(s));
  }
  return set;
}

Batch sample_batch(const TrainingSet& set, int p, int k, int l, Xorshift64Star& rng)
{
  if (p < 1 || k < 1 || l < 1)
    throw std::invalid_argument("sample_batch: p, k, l must be positive");
  if (static_cast<std::size_t>(p) > set.n_classes())
    throw std::invalid_argument("sample_batch: " + std::to_string(set.n_classes()) + " identities available, " +
                                std::to_string(p) + " requested");
  Batch b;
  for (std::size_t cls : sample_without_replacement(set.n_classes(), static_cast<std::size_t>(p), rng))
  {
    const auto& pool = set.by_class[cls];
    std::vector<std::size_t> picks;
    if (pool.size() >= static_cast<std::size_t>(k))
      for (std::size_t i : sample_without_replacement(pool.size(), static_cast<std::size_t>(k), rng))
        picks.push_back(pool[i]);
    else
      for (int i = 0; i < k; ++i)
        picks.push_back(pool[rng.index(pool.size())]);
    for (std::size_t seq : picks)
    {
      const std::size_t n = set.sequences[seq].frame_count();
      std::vector<std::size_t> frames;
      if (n >= static_cast<std::size_t>(l))
        frames = sample_without_replacement(n, static_cast<std::size_t>(l), rng);
      else
        for (int i = 0; i < l; ++i)
          frames.push_back(rng.index(n));
      b.sequences.push_back(seq);
      b.frames.push_back(std::move(frames));
      b.labels.push_back(static_cast<int>(cls));
    }
  }
  return b;
}

template <typename T>
void sgd_step(std::vector<T>& params, const std::vector<T>& grads, std::vector<T>& velocity, int iteration,
              const TrainingConfig& cfg)
{
  if (grads.size() != params.size() || velocity.size() != params.size())
    throw std::invalid_argument("sgd_step: parameter, gradient and velocity sizes differ");
  const T lr = static_cast<T>(cfg.lr_at(iteration));
  const T mu = static_cast<T>(cfg.momentum);
  const T wd = static_cast<T>(cfg.weight_decay);
  for (std::size_t i = 0; i < params.size(); ++i)
  {
    velocity[i] = mu * velocity[i] + grads[i] + wd * params[i];
    params[i] -= lr * velocity[i];
  }
}

template void sgd_step<float>(std::vector<float>&, const std::vector<float>&, std::vector<float>&, int,
                              const TrainingConfig&);
template void sgd_step<double>(std::vector<double>&, const std::vector<double>&, std::vector<double>&, int,
                               const TrainingConfig&);

NonFiniteLoss::NonFiniteLoss(int iteration)
  : std::runtime_error("non-finite loss at iteration " + std::to_string(iteration)), iteration_(iteration)
{
}

BatchLoss batch_gradient(const EncoderParams<float>& params, const TrainingSet& set, const Batch& batch,
                         const TrainingConfig& cfg, std::vector<float>& grad)
{
  const std::size_t n = batch.sequences.size();
  std::vector<SequenceInput<float>> inputs(n);
  std::vector<SequenceForward<float>> fwd(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    inputs[i] = make_input<float>(set.sequences[batch.sequences[i]].views, batch.frames[i]);
    fwd[i] = forward_sequence(params, inputs[i], true);
  });

  // Losses run in double on the float activations.
  std::vector<std::vector<double>> emb(n), logits(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    emb[i].assign(fwd[i].head.embedding.begin(), fwd[i].head.embedding.end());
    logits[i].assign(fwd[i].head.logits.begin(), fwd[i].head.logits.end());
  }
  const int parts = params.arch.parts;
  const auto tri = triplet_loss_bap(emb, batch.labels, parts, cfg.margin);
  const auto ce = cross_entropy_loss(logits, batch.labels, parts);

  BatchLoss loss;
  loss.tri = tri.loss;
  loss.ce = ce.loss;
  loss.total = combined_loss(tri.loss, ce.loss, cfg.alpha, cfg.beta);
  loss.triplets_valid = tri.valid;
  if (!std::isfinite(loss.total))
    return loss;

  std::vector<std::vector<float>> per_seq(n);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    std::vector<float> de(emb[i].size()), dl(logits[i].size());
    for (std::size_t j = 0; j < de.size(); ++j)
      de[j] = static_cast<float>(cfg.alpha * tri.grad[i][j]);
    for (std::size_t j = 0; j < dl.size(); ++j)
      dl[j] = static_cast<float>(cfg.beta * ce.grad[i][j]);
    per_seq[i].assign(params.values.size(), 0.0f);
    backward_sequence(params, inputs[i], fwd[i], de, dl, per_seq[i]);
    fwd[i] = {};
    inputs[i] = {};
  });

  grad.assign(params.values.size(), 0.0f);
  for (const auto& g : per_seq)
    for (std::size_t j = 0; j < grad.size(); ++j)
      grad[j] += g[j];
  return loss;
}

void write_log_header(std::ostream& out, const TrainingConfig& cfg)
{
  out << "# preset=" << cfg.preset << " p=" << cfg.p << " k=" << cfg.k << " l=" << cfg.l << " lr0=" << cfg.lr0
      << " total_iters=" << cfg.total_iters << " seed=" << cfg.seed << "\n";
  out << "# milestones=";
  for (std::size_t i = 0; i < cfg.milestones.size(); ++i)
    out << (i ? "," : "") << cfg.milestones[i];
  out << "\n";
  out << "iter,loss_tri,loss_ce,loss_total,lr\n";
}

void write_log_row(std::ostream& out, const LossLogRow& row)
{
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d,%.8f,%.8f,%.8f,%.8g\n", row.iter, row.tri, row.ce, row.total, row.lr);
  out << buf;
}

TrainResult train(const TrainingSet& set, const Architecture& arch, const TrainingConfig& cfg,
                  const TrainOptions& options)
{
  cfg.validate();
  arch.validate();
  if (set.sequences.empty())
    throw std::invalid_argument("train: empty training set");
  if (static_cast<std::size_t>(arch.n_classes) != set.n_classes())
    throw std::invalid_argument("train: architecture has " + std::to_string(arch.n_classes) + " classes, data has " +
                                std::to_string(set.n_classes()));
  for (const SequenceImages& s : set.sequences)
    if (s.views.size() != arch.views.size())
      throw std::invalid_argument("train: sequences were rendered for a different number of views");

  TrainResult result;
  Xorshift64Star rng(derive_seed(cfg.seed, kBatchTag));
  if (options.resume)
  {
    result.params = options.resume->first;
    result.state = options.resume->second;
    if (!(result.params.arch == arch))
      throw std::invalid_argument("train: resumed checkpoint has a different architecture");
    if (result.state.velocity.size() != result.params.values.size())
      throw std::invalid_argument("train: resumed state does not match the checkpoint");
    rng.set_state(result.state.rng_state);
  }
  else
  {
    result.params = EncoderParams<float>(arch);
    init_params(result.params, derive_seed(cfg.seed, kInitTag));
    result.state.velocity.assign(result.params.values.size(), 0.0f);
    result.state.rng_state = rng.state();
    if (options.log)
      write_log_header(*options.log, cfg);
  }

  std::vector<float> grad;
  for (int it = result.state.iteration + 1; it <= cfg.total_iters; ++it)
  {
    const Batch batch = sample_batch(set, cfg.p, cfg.k, cfg.l, rng);
    const BatchLoss loss = batch_gradient(result.params, set, batch, cfg, grad);
    if (!std::isfinite(loss.total))
      throw NonFiniteLoss(it);
    sgd_step(result.params.values, grad, result.state.velocity, it, cfg);

    const LossLogRow row{it, loss.tri, loss.ce, loss.total, cfg.lr_at(it)};
    result.log.push_back(row);
    if (options.log)
    {
      write_log_row(*options.log, row);
      options.log->flush();
    }
    result.state.iteration = it;
    result.state.rng_state = rng.state();
    if (options.checkpoint && cfg.checkpoint_interval > 0 && it % cfg.checkpoint_interval == 0 &&
        it != cfg.total_iters)
      options.checkpoint(result.params, result.state);
  }
  if (options.checkpoint)
    options.checkpoint(result.params, result.state);
  return result;
}

} // namespace lidargait
