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

#include "lidargait/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lidargait {

template <typename T>
TripletResult<T> triplet_loss_bap(const std::vector<std::vector<T>>& embeddings, const std::vector<int>& labels,
                                  int parts, T margin)
{
  const std::size_t n = embeddings.size();
  if (labels.size() != n)
    throw std::invalid_argument("triplet_loss_bap: labels and embeddings differ in count");
  if (parts < 1 || !(margin > T(0)))
    throw std::invalid_argument("triplet_loss_bap: parts >= 1 and margin > 0 required");
  TripletResult<T> r;
  r.grad.assign(n, {});
  if (n == 0)
  {
    r.valid = false;
    return r;
  }
  const std::size_t width = embeddings.front().size();
  if (width % static_cast<std::size_t>(parts) != 0)
    throw std::invalid_argument("triplet_loss_bap: embedding width not divisible by parts");
  for (std::size_t i = 0; i < n; ++i)
  {
    if (embeddings[i].size() != width)
      throw std::invalid_argument("triplet_loss_bap: embeddings differ in width");
    r.grad[i].assign(width, T(0));
  }
  const std::size_t dim = width / static_cast<std::size_t>(parts);

  std::vector<T> dist(n * n);
  std::size_t active_parts = 0;
  T offset_mean = T(0);
  std::vector<T> d_dist(n * n);
  for (int p = 0; p < parts; ++p)
  {
    const std::size_t off = static_cast<std::size_t>(p) * dim;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
      {
        T s = T(0);
        for (std::size_t d = 0; d < dim; ++d)
        {
          const T diff = embeddings[i][off + d] - embeddings[j][off + d];
          s += diff * diff;
        }
        dist[i * n + j] = std::sqrt(s);
      }

    // Hinges are accumulated as offsets from the margin so that the mean of
    // identical hinges is the margin itself, without rounding.
    T offset = T(0);
    std::size_t active = 0;
    std::fill(d_dist.begin(), d_dist.end(), T(0));
    std::vector<std::pair<std::size_t, std::size_t>> pairs; // (a*n+p, a*n+n) of active hinges
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t q = 0; q < n; ++q)
      {
        if (q == a || labels[q] != labels[a])
          continue;
        for (std::size_t m = 0; m < n; ++m)
        {
          if (labels[m] == labels[a])
            continue;
          ++r.triples;
          const T h = dist[a * n + q] - dist[a * n + m] + margin;
          const bool on = h > T(0);
          r.active_mask.push_back(on ? 1 : 0);
          if (on)
          {
            offset += dist[a * n + q] - dist[a * n + m];
            ++active;
            pairs.emplace_back(a * n + q, a * n + m);
          }
        }
      }
    r.active += active;
    if (active == 0)
      continue;
    ++active_parts;
    offset_mean += offset / static_cast<T>(active);
    const T w = T(1) / (static_cast<T>(active) * static_cast<T>(parts));
    for (const auto& [ap, an] : pairs)
    {
      d_dist[ap] += w;
      d_dist[an] -= w;
    }
    // d(i,j) depends on e_i and e_j; the gradient at d = 0 is taken as zero.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
      {
        const T g = d_dist[i * n + j];
        const T d = dist[i * n + j];
        if (g == T(0) || d == T(0))
          continue;
        for (std::size_t k = 0; k < dim; ++k)
        {
          const T u = g * (embeddings[i][off + k] - embeddings[j][off + k]) / d;
          r.grad[i][off + k] += u;
          r.grad[j][off + k] -= u;
        }
      }
  }
  if (active_parts > 0)
  {
    const T fraction = active_parts == static_cast<std::size_t>(parts)
                         ? T(1)
                         : static_cast<T>(active_parts) / static_cast<T>(parts);
    r.loss = margin * fraction + offset_mean / static_cast<T>(parts);
  }
  r.valid = r.triples > 0;
  return r;
}

template <typename T>
CrossEntropyResult<T> cross_entropy_loss(const std::vector<std::vector<T>>& logits, const std::vector<int>& labels,
                                         int parts)
{
  const std::size_t n = logits.size();
  if (labels.size() != n)
    throw std::invalid_argument("cross_entropy_loss: labels and logits differ in count");
  if (parts < 1)
    throw std::invalid_argument("cross_entropy_loss: parts >= 1 required");
  CrossEntropyResult<T> r;
  r.grad.assign(n, {});
  if (n == 0)
    return r;
  const std::size_t width = logits.front().size();
  if (width % static_cast<std::size_t>(parts) != 0)
    throw std::invalid_argument("cross_entropy_loss: logit width not divisible by parts");
  const std::size_t k = width / static_cast<std::size_t>(parts);
  if (k < 2)
    throw std::invalid_argument("cross_entropy_loss: at least 2 classes required");
  const T scale = T(1) / (static_cast<T>(n) * static_cast<T>(parts));

  for (std::size_t i = 0; i < n; ++i)
  {
    if (logits[i].size() != width)
      throw std::invalid_argument("cross_entropy_loss: logits differ in width");
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k)
      throw std::invalid_argument("cross_entropy_loss: label out of range");
    r.grad[i].assign(width, T(0));
    for (int p = 0; p < parts; ++p)
    {
      const T* z = logits[i].data() + static_cast<std::size_t>(p) * k;
      const T zmax = *std::max_element(z, z + k);
      T denom = T(0);
      for (std::size_t c = 0; c < k; ++c)
        denom += std::exp(z[c] - zmax);
      const T log_denom = std::log(denom);
      const auto y = static_cast<std::size_t>(labels[i]);
      r.loss += (log_denom - (z[y] - zmax)) * scale;
      T* g = r.grad[i].data() + static_cast<std::size_t>(p) * k;
      for (std::size_t c = 0; c < k; ++c)
        g[c] = (std::exp(z[c] - zmax) / denom - (c == y ? T(1) : T(0))) * scale;
    }
  }
  return r;
}

template TripletResult<float> triplet_loss_bap<float>(const std::vector<std::vector<float>>&, const std::vector<int>&,
                                                      int, float);
template TripletResult<double> triplet_loss_bap<double>(const std::vector<std::vector<double>>&,
                                                        const std::vector<int>&, int, double);
template CrossEntropyResult<float> cross_entropy_loss<float>(const std::vector<std::vector<float>>&,
                                                             const std::vector<int>&, int);
template CrossEntropyResult<double> cross_entropy_loss<double>(const std::vector<std::vector<double>>&,
                                                               const std::vector<int>&, int);

} // namespace lidargait
