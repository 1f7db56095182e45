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

#include "lidargait/checkpoint.hpp"
#include "lidargait/dataset.hpp"
#include "lidargait/encoder.hpp"
#include "lidargait/rng.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lidargait {

struct TrainingConfig
{
  std::string preset = "custom";
  double alpha = 1.0;
  double beta = 0.1;
  double margin = 0.2;
  int p = 8;
  int k = 8;
  int l = 10;
  double lr0 = 0.01;
  double weight_decay = 0.0005;
  double momentum = 0.9;
  std::vector<int> milestones = {1200, 1600};
  int total_iters = 2000;
  std::uint64_t seed = 0;
  int checkpoint_interval = 0; ///< 0 = only at the end
  unsigned threads = 0;

  /// Reduced batch, lr 0.01, 2000 iterations, milestones at 60% / 80%.
  static TrainingConfig desk();
  /// (8, 8, 10), lr 0.1, 40000 iterations, milestones 20000 / 30000.
  static TrainingConfig paper();

  void validate() const;
  /// lr0 * 0.1^(number of milestones <= iteration); iterations count from 1.
  double lr_at(int iteration) const;
};

/// Rendered training sequences with dense class labels.
struct TrainingSet
{
  std::vector<SequenceImages> sequences;
  std::vector<int> labels;                     ///< class of every sequence
  std::vector<std::string> classes;            ///< identity of every class
  std::vector<std::vector<std::size_t>> by_class;

  /// Classes follow the sorted identity labels; frameless sequences are dropped.
  static TrainingSet build(std::vector<SequenceImages> sequences);
  std::size_t n_classes() const { return classes.size(); }
};

struct Batch
{
  std::vector<std::size_t> sequences;          ///< indices into TrainingSet::sequences
  std::vector<std::vector<std::size_t>> frames; ///< l frame indices per sequence
  std::vector<int> labels;
};

/// p identities without replacement, k sequences each (with replacement when
/// fewer exist), l frames per sequence (with replacement when fewer exist).
Batch sample_batch(const TrainingSet& set, int p, int k, int l, Xorshift64Star& rng);

/// v = momentum * v + g + wd * w; w -= lr(iteration) * v.
template <typename T>
void sgd_step(std::vector<T>& params, const std::vector<T>& grads, std::vector<T>& velocity, int iteration,
              const TrainingConfig& cfg);

struct LossLogRow
{
  int iter = 0;
  double tri = 0.0;
  double ce = 0.0;
  double total = 0.0;
  double lr = 0.0;
};

class NonFiniteLoss : public std::runtime_error
{
public:
  explicit NonFiniteLoss(int iteration);
  int iteration() const { return iteration_; }

private:
  int iteration_;
};

struct BatchLoss
{
  double tri = 0.0;
  double ce = 0.0;
  double total = 0.0;
  bool triplets_valid = true;
};

/// Forward + loss + backward for one batch; `grad` receives the summed
/// gradient (reduced in batch order, independent of the thread count).
BatchLoss batch_gradient(const EncoderParams<float>& params, const TrainingSet& set, const Batch& batch,
                         const TrainingConfig& cfg, std::vector<float>& grad);

struct TrainOptions
{
  std::ostream* log = nullptr; ///< receives the CSV loss log
  /// Called every checkpoint_interval iterations and after the last one.
  std::function<void(const EncoderParams<float>&, const TrainState&)> checkpoint;
  /// Continue from a saved state instead of initializing.
  std::optional<std::pair<EncoderParams<float>, TrainState>> resume;
};

struct TrainResult
{
  EncoderParams<float> params;
  TrainState state;
  std::vector<LossLogRow> log;
};

/// Throws NonFiniteLoss when a loss becomes NaN or infinite.
TrainResult train(const TrainingSet& set, const Architecture& arch, const TrainingConfig& cfg,
                  const TrainOptions& options = {});

void write_log_header(std::ostream& out, const TrainingConfig& cfg);
void write_log_row(std::ostream& out, const LossLogRow& row);

} // namespace lidargait
