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

#include "lidargait/checkpoint.hpp"

#include "lidargait/pcf_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace lidargait {

namespace fs = std::filesystem;

void write_checkpoint(std::ostream& out, const EncoderParams<float>& params)
{
  out.write("ENC1", 4);
  const std::string line = params.arch.descriptor() + "\n";
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  detail::put_u32(out, static_cast<std::uint32_t>(params.layout.blocks.size()));
  for (const auto& b : params.layout.blocks)
  {
    detail::put_u32(out, static_cast<std::uint32_t>(b.size));
    for (std::size_t i = 0; i < b.size; ++i)
      detail::put_f32(out, params.values[b.offset + i]);
  }
}

EncoderParams<float> read_checkpoint(std::istream& in)
{
  detail::expect_magic(in, "ENC1", "ENC1 checkpoint");
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("checkpoint: missing architecture line");
  EncoderParams<float> params(Architecture::parse(line));
  const std::uint32_t n_blocks = detail::get_u32(in);
  if (n_blocks != params.layout.blocks.size())
    throw std::runtime_error("checkpoint: block count does not match the architecture");
  for (const auto& b : params.layout.blocks)
  {
    if (detail::get_u32(in) != b.size)
      throw std::runtime_error("checkpoint: block '" + b.name + "' has the wrong size");
    for (std::size_t i = 0; i < b.size; ++i)
      params.values[b.offset + i] = detail::get_f32(in);
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("checkpoint: trailing data");
  return params;
}

void save_checkpoint(const fs::path& path, const EncoderParams<float>& params)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write checkpoint " + path.string());
  write_checkpoint(out, params);
  if (!out)
    throw std::runtime_error("failed writing checkpoint " + path.string());
}

EncoderParams<float> load_checkpoint(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

fs::path state_path(const fs::path& checkpoint)
{
  fs::path p = checkpoint;
  p += ".state";
  return p;
}

void save_train_state(const fs::path& path, const TrainState& state)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write training state " + path.string());
  out.write("TRS1", 4);
  detail::put_u32(out, static_cast<std::uint32_t>(state.iteration));
  detail::put_u32(out, static_cast<std::uint32_t>(state.rng_state & 0xFFFFFFFFu));
  detail::put_u32(out, static_cast<std::uint32_t>(state.rng_state >> 32));
  detail::put_u32(out, static_cast<std::uint32_t>(state.velocity.size()));
  for (float v : state.velocity)
    detail::put_f32(out, v);
  if (!out)
    throw std::runtime_error("failed writing training state " + path.string());
}

TrainState load_train_state(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open training state " + path.string());
  detail::expect_magic(in, "TRS1", "training state");
  TrainState s;
  s.iteration = static_cast<int>(detail::get_u32(in));
  const std::uint64_t lo = detail::get_u32(in);
  const std::uint64_t hi = detail::get_u32(in);
  s.rng_state = lo | (hi << 32);
  s.velocity.resize(detail::get_u32(in));
  for (float& v : s.velocity)
    v = detail::get_f32(in);
  return s;
}

} // namespace lidargait
