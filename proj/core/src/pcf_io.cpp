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

#include "lidargait/pcf_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lidargait {

namespace fs = std::filesystem;

namespace detail {

void put_u32(std::ostream& out, std::uint32_t v)
{
  const std::array<char, 4> b = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                 static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(b.data(), 4);
}

void put_f32(std::ostream& out, float v)
{
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

std::uint32_t get_u32(std::istream& in)
{
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in)
    throw std::runtime_error("unexpected end of file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

float get_f32(std::istream& in)
{
  return std::bit_cast<float>(get_u32(in));
}

void expect_magic(std::istream& in, const char (&magic)[5], const char* what)
{
  std::array<char, 4> m{};
  in.read(m.data(), 4);
  if (!in || !std::equal(m.begin(), m.end(), magic))
    throw std::runtime_error(std::string("not a ") + what + " stream (bad magic)");
}

} // namespace detail

void write_pcf(std::ostream& out, const PointFrame& frame)
{
  out.write("PCF1", 4);
  detail::put_u32(out, static_cast<std::uint32_t>(frame.points.size()));
  for (const Point3& p : frame.points)
  {
    detail::put_f32(out, static_cast<float>(p.x));
    detail::put_f32(out, static_cast<float>(p.y));
    detail::put_f32(out, static_cast<float>(p.z));
  }
}

PointFrame read_pcf(std::istream& in)
{
  detail::expect_magic(in, "PCF1", "PCF1");
  const std::uint32_t count = detail::get_u32(in);
  PointFrame frame;
  frame.points.resize(count);
  for (Point3& p : frame.points)
  {
    p.x = detail::get_f32(in);
    p.y = detail::get_f32(in);
    p.z = detail::get_f32(in);
    if (!p.finite())
      throw std::runtime_error("PCF1 stream contains a non-finite coordinate");
  }
  return frame;
}

void write_pcf(const fs::path& path, const PointFrame& frame)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_pcf(out, frame);
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

PointFrame read_pcf(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  return read_pcf(in);
}

fs::path sequence_dir(const fs::path& root, const std::string& identity, Attribute attribute, int seq, int view_deg)
{
  char seq_part[32];
  char view_part[16];
  std::snprintf(seq_part, sizeof seq_part, "-%02d", seq);
  std::snprintf(view_part, sizeof view_part, "%03d", view_deg);
  return root / identity / (std::string(attribute_name(attribute)) + seq_part) / view_part;
}

std::string frame_file_name(std::size_t frame_index)
{
  char name[32];
  std::snprintf(name, sizeof name, "%03zu.pcf", frame_index);
  return name;
}

std::vector<PointFrame> read_sequence_frames(const fs::path& dir, double frame_rate)
{
  if (!fs::is_directory(dir))
    throw std::runtime_error("sequence directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pcf")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<PointFrame> frames;
  frames.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i)
  {
    frames.push_back(read_pcf(files[i]));
    frames.back().timestamp = static_cast<double>(i) / frame_rate;
  }
  return frames;
}

} // namespace lidargait
