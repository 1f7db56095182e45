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

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lidargait {

template <typename T>
struct TripletResult
{
  T loss = T(0);
  std::vector<std::vector<T>> grad; ///< d loss / d embedding, same shape as the input
  std::size_t triples = 0;          ///< valid (anchor, positive, negative) triples over all parts
  std::size_t active = 0;           ///< hinges > 0 over all parts
  std::vector<std::uint8_t> active_mask; ///< per part and triple, in enumeration order
  bool valid = true;                ///< false when the batch holds no valid triple
};

/// Batch-all triplet loss per part: mean of the nonzero hinges
/// max(0, d(a,p) - d(a,n) + margin), then averaged over parts. Each embedding
/// is `parts` consecutive vectors of equal length.
template <typename T>
TripletResult<T> triplet_loss_bap(const std::vector<std::vector<T>>& embeddings, const std::vector<int>& labels,
                                  int parts, T margin);

template <typename T>
struct CrossEntropyResult
{
  T loss = T(0);
  std::vector<std::vector<T>> grad; ///< d loss / d logits
};

/// Softmax cross-entropy per part and sample, averaged over both. Each row of
/// `logits` is `parts` consecutive blocks of n_classes values.
template <typename T>
CrossEntropyResult<T> cross_entropy_loss(const std::vector<std::vector<T>>& logits, const std::vector<int>& labels,
                                         int parts);

inline double combined_loss(double tri, double ce, double alpha, double beta)
{
  return alpha * tri + beta * ce;
}

} // namespace lidargait
