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

#include <cstdint>
#include <vector>

namespace lidargait {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used to expand user seeds
/// into well-mixed, never-zero xorshift states and to derive child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Combine a parent seed with a stream tag into an independent child seed.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag)
{
  return splitmix64(splitmix64(parent) ^ (tag * 0xD1B54A32D192ED03ULL));
}

/// xorshift64* (Vigna 2016): shifts (12, 25, 27), output multiplier
/// 0x2545F4914F6CDD1D. All stochastic choices in the toolkit draw from this
/// generator so results are reproducible across compilers and standard
/// libraries (no std::*_distribution is used anywhere).
class Xorshift64Star
{
public:
  using result_type = std::uint64_t;

  explicit Xorshift64Star(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed)
  {
    state_ = splitmix64(seed);
    if (state_ == 0)
      state_ = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t next()
  {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n) by rejection; n must be > 0.
  std::uint64_t index(std::uint64_t n)
  {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do
      x = next();
    while (x >= limit);
    return x % n;
  }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s == 0 ? 0x9E3779B97F4A7C15ULL : s; }

private:
  std::uint64_t state_ = 0;
};

/// Fisher-Yates shuffle driven by Xorshift64Star::index.
template <typename T>
void shuffle(std::vector<T>& v, Xorshift64Star& rng)
{
  for (std::size_t i = v.size(); i > 1; --i)
  {
    const std::size_t j = rng.index(i);
    std::swap(v[i - 1], v[j]);
  }
}

/// `count` distinct indices from [0, n), in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                           Xorshift64Star& rng)
{
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i)
    pool[i] = i;
  if (count > n)
    count = n;
  for (std::size_t i = 0; i < count; ++i)
  {
    const std::size_t j = i + rng.index(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

} // namespace lidargait
