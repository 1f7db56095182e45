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
#include "lidargait/training.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace lidargait {

/// ASCII `key=value` lines; `#` starts a comment, blank lines are ignored.
struct RunConfig
{
  std::vector<std::pair<std::string, std::string>> entries; ///< file order

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);
};

/// Keys understood by `apply`.
const std::vector<std::string>& run_config_keys();

/// Applies every entry to the training config and architecture. Unknown keys
/// and unparsable values throw std::invalid_argument.
void apply(const RunConfig& config, TrainingConfig& training, Architecture& arch);

} // namespace lidargait
