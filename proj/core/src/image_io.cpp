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

#include "lidargait/image_io.hpp"

#include "lidargait/pcf_io.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>
#include <string>

namespace lidargait {

namespace fs = std::filesystem;

namespace {

int read_pgm_token(std::istream& in)
{
  int ch = in.get();
  while (ch != EOF)
  {
    if (ch == '#')
      while (ch != EOF && ch != '\n')
        ch = in.get();
    else if (!std::isspace(ch))
      break;
    ch = in.get();
  }
  std::string token;
  while (ch != EOF && std::isdigit(ch))
  {
    token.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  if (token.empty())
    throw std::runtime_error("malformed PGM header");
  return std::stoi(token);
}

} // namespace

void write_pgm(const fs::path& path, const GrayImage& img)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  const std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

void write_pgm(const fs::path& path, const AlignedImage& img)
{
  write_pgm(path, img.gray());
}

GrayImage read_pgm(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5')
    throw std::runtime_error(path.string() + " is not a binary PGM");
  const int w = read_pgm_token(in);
  const int h = read_pgm_token(in);
  const int maxval = read_pgm_token(in);
  if (w <= 0 || h <= 0 || maxval != 255)
    throw std::runtime_error("unsupported PGM geometry in " + path.string());
  GrayImage img(w, h);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!in)
    throw std::runtime_error("truncated PGM " + path.string());
  return img;
}

void write_dpf(const fs::path& path, const DepthImage& img)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write("DPF1", 4);
  detail::put_u32(out, static_cast<std::uint32_t>(img.width));
  detail::put_u32(out, static_cast<std::uint32_t>(img.height));
  for (float v : img.pixels)
    detail::put_f32(out, v);
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

DepthImage read_dpf(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  detail::expect_magic(in, "DPF1", "DPF1");
  DepthImage img;
  img.width = static_cast<int>(detail::get_u32(in));
  img.height = static_cast<int>(detail::get_u32(in));
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  for (float& v : img.pixels)
    v = detail::get_f32(in);
  return img;
}

} // namespace lidargait
