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

#include "lidargait/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lidargait {

/// PCF1 point frame file: "PCF1", u32 count, count x (f32 x, f32 y, f32 z),
/// all little-endian. Coordinates are rounded to float32 on write.
void write_pcf(const std::filesystem::path& path, const PointFrame& frame);
PointFrame read_pcf(const std::filesystem::path& path);

void write_pcf(std::ostream& out, const PointFrame& frame);
PointFrame read_pcf(std::istream& in);

/// `<root>/<identity>/<attribute>-<seq##>/<view###>`
std::filesystem::path sequence_dir(const std::filesystem::path& root, const std::string& identity,
                                   Attribute attribute, int seq, int view_deg);

/// `<frame###>.pcf`
std::string frame_file_name(std::size_t frame_index);

/// Reads every *.pcf in `dir` in lexicographic order. Timestamps are assigned
/// from the frame position at `frame_rate` Hz.
std::vector<PointFrame> read_sequence_frames(const std::filesystem::path& dir, double frame_rate = 10.0);

namespace detail {

void put_u32(std::ostream& out, std::uint32_t v);
void put_f32(std::ostream& out, float v);
std::uint32_t get_u32(std::istream& in);
float get_f32(std::istream& in);
void expect_magic(std::istream& in, const char (&magic)[5], const char* what);

} // namespace detail

} // namespace lidargait
