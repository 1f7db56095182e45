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

#include "lidargait/encoder.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace lidargait {

/// "ENC1", the architecture descriptor line, then one float32 blob per
/// parameter block in layout order (u32 length + little-endian values).
void save_checkpoint(const std::filesystem::path& path, const EncoderParams<float>& params);
EncoderParams<float> load_checkpoint(const std::filesystem::path& path);

void write_checkpoint(std::ostream& out, const EncoderParams<float>& params);
EncoderParams<float> read_checkpoint(std::istream& in);

/// Optimizer state needed to continue training bitwise-identically.
struct TrainState
{
  int iteration = 0;            ///< iterations completed
  std::uint64_t rng_state = 0;  ///< batch sampler state after `iteration`
  std::vector<float> velocity;  ///< SGD momentum buffer
  friend bool operator==(const TrainState&, const TrainState&) = default;
};

/// Sidecar written next to a checkpoint ("<ckpt>.state").
std::filesystem::path state_path(const std::filesystem::path& checkpoint);
void save_train_state(const std::filesystem::path& path, const TrainState& state);
TrainState load_train_state(const std::filesystem::path& path);

} // namespace lidargait
