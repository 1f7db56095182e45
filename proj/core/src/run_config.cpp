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

#include "lidargait/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lidargait {

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value)
{
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw std::invalid_argument("config: bad value '" + value + "' for " + key);
  return v;
}

std::vector<std::string> split_list(const std::string& value)
{
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(trim(item));
  return out;
}

} // namespace

RunConfig RunConfig::parse(const std::string& text)
{
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    c.entries.emplace_back(key, value);
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const std::vector<std::string>& run_config_keys()
{
  static const std::vector<std::string> keys = {
    "alpha", "beta", "margin", "p", "k", "l", "lr0", "weight_decay", "momentum", "milestones", "total_iters",
    "seed", "checkpoint_interval", "threads", "views", "input"};
  return keys;
}

void apply(const RunConfig& config, TrainingConfig& t, Architecture& arch)
{
  for (const auto& [key, value] : config.entries)
  {
    if (key == "alpha")
      t.alpha = parse_number<double>(key, value);
    else if (key == "beta")
      t.beta = parse_number<double>(key, value);
    else if (key == "margin")
      t.margin = parse_number<double>(key, value);
    else if (key == "p")
      t.p = parse_number<int>(key, value);
    else if (key == "k")
      t.k = parse_number<int>(key, value);
    else if (key == "l")
      t.l = parse_number<int>(key, value);
    else if (key == "lr0")
      t.lr0 = parse_number<double>(key, value);
    else if (key == "weight_decay")
      t.weight_decay = parse_number<double>(key, value);
    else if (key == "momentum")
      t.momentum = parse_number<double>(key, value);
    else if (key == "total_iters")
      t.total_iters = parse_number<int>(key, value);
    else if (key == "seed")
      t.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "checkpoint_interval")
      t.checkpoint_interval = parse_number<int>(key, value);
    else if (key == "threads")
      t.threads = parse_number<unsigned>(key, value);
    else if (key == "milestones")
    {
      t.milestones.clear();
      if (!value.empty())
        for (const std::string& m : split_list(value))
          t.milestones.push_back(parse_number<int>(key, m));
    }
    else if (key == "views")
    {
      arch.views.clear();
      for (const std::string& v : split_list(value))
      {
        const auto kind = parse_view_kind(v);
        if (!kind)
          throw std::invalid_argument("config: unknown view '" + v + "'");
        arch.views.push_back(*kind);
      }
    }
    else if (key == "input")
    {
      const auto mode = parse_input_mode(value);
      if (!mode)
        throw std::invalid_argument("config: unknown input mode '" + value + "'");
      arch.input = *mode;
    }
    else
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

} // namespace lidargait
