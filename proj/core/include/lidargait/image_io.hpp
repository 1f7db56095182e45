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

#include "lidargait/projection.hpp"

#include <filesystem>

namespace lidargait {

/// Binary PGM: "P5\n<w> <h>\n255\n" followed by row-major bytes.
void write_pgm(const std::filesystem::path& path, const GrayImage& img);
void write_pgm(const std::filesystem::path& path, const AlignedImage& img);
GrayImage read_pgm(const std::filesystem::path& path);

/// DPF1 depth raster: "DPF1", u32 width, u32 height, row-major float32 (LE).
void write_dpf(const std::filesystem::path& path, const DepthImage& img);
DepthImage read_dpf(const std::filesystem::path& path);

} // namespace lidargait
