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

#include "lidargait/encoder.hpp"

#include "lidargait/rng.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lidargait {

namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<Mat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const Mat<T>>;
template <typename T>
using VecMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>;
template <typename T>
using ConstVecMap = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>;

// Plain loops for the small products. Eigen picks its vector kernels by buffer
// alignment, which would make results depend on where the allocator put them.
template <typename T>
void matvec(const T* a, Eigen::Index rows, Eigen::Index cols, const T* x, T* y)
{
  for (Eigen::Index r = 0; r < rows; ++r)
  {
    const T* row = a + r * cols;
    T acc = T(0);
    for (Eigen::Index i = 0; i < cols; ++i)
      acc += row[i] * x[i];
    y[r] = acc;
  }
}

// y += a^T x
template <typename T>
void matvec_t_add(const T* a, Eigen::Index rows, Eigen::Index cols, const T* x, T* y)
{
  for (Eigen::Index r = 0; r < rows; ++r)
  {
    const T* row = a + r * cols;
    const T xr = x[r];
    for (Eigen::Index i = 0; i < cols; ++i)
      y[i] += row[i] * xr;
  }
}

template <typename T>
void outer_add(const T* u, Eigen::Index rows, const T* v, Eigen::Index cols, T* g)
{
  for (Eigen::Index r = 0; r < rows; ++r)
  {
    T* row = g + r * cols;
    const T ur = u[r];
    for (Eigen::Index i = 0; i < cols; ++i)
      row[i] += ur * v[i];
  }
}

std::size_t product(const std::vector<int>& shape)
{
  std::size_t n = 1;
  for (int s : shape)
    n *= static_cast<std::size_t>(s);
  return n;
}

std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    out.push_back(item);
  return out;
}

int to_int(const std::string& s, const char* what)
{
  std::size_t used = 0;
  int v = 0;
  try
  {
    v = std::stoi(s, &used);
  }
  catch (const std::exception&)
  {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw std::invalid_argument(std::string("architecture: bad ") + what + " '" + s + "'");
  return v;
}

// Column matrix of 3x3 patches (pad 1): row (c*9 + ky*3 + kx), column y*w + x.
template <typename T>
void im2col(const T* in, int channels, int h, int w, Mat<T>& col)
{
  col.resize(channels * 9, h * w);
  for (int c = 0; c < channels; ++c)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx)
      {
        T* dst = col.data() + static_cast<std::ptrdiff_t>((c * 9 + ky * 3 + kx)) * h * w;
        const T* src = in + static_cast<std::ptrdiff_t>(c) * h * w;
        for (int y = 0; y < h; ++y)
        {
          const int sy = y + ky - 1;
          T* row = dst + static_cast<std::ptrdiff_t>(y) * w;
          if (sy < 0 || sy >= h)
          {
            std::fill(row, row + w, T(0));
            continue;
          }
          const T* srow = src + static_cast<std::ptrdiff_t>(sy) * w;
          for (int x = 0; x < w; ++x)
          {
            const int sx = x + kx - 1;
            row[x] = (sx < 0 || sx >= w) ? T(0) : srow[sx];
          }
        }
      }
}

template <typename T>
void col2im(const Mat<T>& col, int channels, int h, int w, T* out)
{
  std::fill(out, out + static_cast<std::ptrdiff_t>(channels) * h * w, T(0));
  for (int c = 0; c < channels; ++c)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx)
      {
        const T* src = col.data() + static_cast<std::ptrdiff_t>((c * 9 + ky * 3 + kx)) * h * w;
        T* dst = out + static_cast<std::ptrdiff_t>(c) * h * w;
        for (int y = 0; y < h; ++y)
        {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h)
            continue;
          const T* row = src + static_cast<std::ptrdiff_t>(y) * w;
          T* drow = dst + static_cast<std::ptrdiff_t>(sy) * w;
          for (int x = 0; x < w; ++x)
          {
            const int sx = x + kx - 1;
            if (sx >= 0 && sx < w)
              drow[sx] += row[x];
          }
        }
      }
}

} // namespace

std::vector<ConvSpec> default_convs()
{
  return {{32, false}, {32, true}, {64, false}, {64, true}, {128, false}, {128, false}};
}

void Architecture::validate() const
{
  if (views.empty())
    throw std::invalid_argument("architecture: at least one view is required");
  for (std::size_t i = 0; i < views.size(); ++i)
    for (std::size_t j = i + 1; j < views.size(); ++j)
      if (views[i] == views[j])
        throw std::invalid_argument("architecture: duplicate view");
  if (convs.empty())
    throw std::invalid_argument("architecture: at least one conv layer is required");
  int size = input_size;
  for (const ConvSpec& c : convs)
  {
    if (c.out_channels < 1)
      throw std::invalid_argument("architecture: conv channels must be positive");
    if (c.pool)
    {
      if (size % 2 != 0)
        throw std::invalid_argument("architecture: pooling an odd-sized map");
      size /= 2;
    }
  }
  if (input_size < 1 || size < 1)
    throw std::invalid_argument("architecture: bad input size");
  if (parts < 1 || size % parts != 0)
    throw std::invalid_argument("architecture: feature height " + std::to_string(size) +
                                " is not divisible into " + std::to_string(parts) + " parts");
  if (embed_dim < 1 || n_classes < 2)
    throw std::invalid_argument("architecture: embed_dim >= 1 and n_classes >= 2 required");
}

int Architecture::feature_size() const
{
  int size = input_size;
  for (const ConvSpec& c : convs)
    if (c.pool)
      size /= 2;
  return size;
}

int Architecture::feature_channels() const
{
  return convs.back().out_channels;
}

int Architecture::fused_channels() const
{
  return feature_channels() * static_cast<int>(views.size());
}

std::string Architecture::descriptor() const
{
  std::ostringstream out;
  out << "views=";
  for (std::size_t i = 0; i < views.size(); ++i)
    out << (i ? "," : "") << view_kind_name(views[i]);
  out << " input=" << input_mode_name(input) << " convs=";
  for (std::size_t i = 0; i < convs.size(); ++i)
    out << (i ? "," : "") << convs[i].out_channels << (convs[i].pool ? "p" : "");
  out << " size=" << input_size << " parts=" << parts << " embed=" << embed_dim << " classes=" << n_classes;
  return out.str();
}

Architecture Architecture::parse(const std::string& descriptor)
{
  Architecture a;
  bool seen[7] = {};
  for (const std::string& tok : split(descriptor, ' '))
  {
    if (tok.empty())
      continue;
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("architecture: malformed token '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string value = tok.substr(eq + 1);
    if (key == "views")
    {
      a.views.clear();
      for (const std::string& v : split(value, ','))
      {
        const auto kind = parse_view_kind(v);
        if (!kind)
          throw std::invalid_argument("architecture: unknown view '" + v + "'");
        a.views.push_back(*kind);
      }
      seen[0] = true;
    }
    else if (key == "input")
    {
      const auto mode = parse_input_mode(value);
      if (!mode)
        throw std::invalid_argument("architecture: unknown input mode '" + value + "'");
      a.input = *mode;
      seen[1] = true;
    }
    else if (key == "convs")
    {
      a.convs.clear();
      for (std::string c : split(value, ','))
      {
        ConvSpec spec;
        if (!c.empty() && c.back() == 'p')
        {
          spec.pool = true;
          c.pop_back();
        }
        spec.out_channels = to_int(c, "conv width");
        a.convs.push_back(spec);
      }
      seen[2] = true;
    }
    else if (key == "size")
      a.input_size = to_int(value, "size"), seen[3] = true;
    else if (key == "parts")
      a.parts = to_int(value, "parts"), seen[4] = true;
    else if (key == "embed")
      a.embed_dim = to_int(value, "embed"), seen[5] = true;
    else if (key == "classes")
      a.n_classes = to_int(value, "classes"), seen[6] = true;
    else
      throw std::invalid_argument("architecture: unknown key '" + key + "'");
  }
  if (!std::all_of(std::begin(seen), std::end(seen), [](bool b) { return b; }))
    throw std::invalid_argument("architecture: incomplete descriptor '" + descriptor + "'");
  a.validate();
  return a;
}

ParamLayout make_layout(const Architecture& arch)
{
  arch.validate();
  ParamLayout layout;
  auto add = [&](std::string name, std::size_t size, std::size_t fan_in, bool bias) {
    layout.blocks.push_back({std::move(name), layout.total, size, fan_in, bias});
    layout.total += size;
    return layout.blocks.size() - 1;
  };
  layout.conv_weight.resize(arch.views.size());
  layout.conv_bias.resize(arch.views.size());
  for (std::size_t v = 0; v < arch.views.size(); ++v)
  {
    std::size_t in = 1;
    for (std::size_t l = 0; l < arch.convs.size(); ++l)
    {
      const auto out = static_cast<std::size_t>(arch.convs[l].out_channels);
      const std::string prefix = std::string(view_kind_name(arch.views[v])) + ".conv" + std::to_string(l + 1);
      layout.conv_weight[v].push_back(add(prefix + ".weight", out * in * 9, in * 9, false));
      layout.conv_bias[v].push_back(add(prefix + ".bias", out, in * 9, true));
      in = out;
    }
  }
  const auto c = static_cast<std::size_t>(arch.fused_channels());
  const auto e = static_cast<std::size_t>(arch.embed_dim);
  const auto k = static_cast<std::size_t>(arch.n_classes);
  for (int p = 0; p < arch.parts; ++p)
    layout.embed.push_back(add("part" + std::to_string(p) + ".embed", e * c, c, false));
  for (int p = 0; p < arch.parts; ++p)
    layout.classifier.push_back(add("part" + std::to_string(p) + ".classifier", k * e, e, false));
  return layout;
}

template <typename T>
Tensor<T>::Tensor(std::vector<int> s) : shape(std::move(s)), values(product(shape), T(0))
{
}

template <typename T>
Tensor<T> image_tensor(const AlignedImage& img)
{
  Tensor<T> t({1, kAlignedSize, kAlignedSize});
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    t.values[i] = static_cast<T>(img.pixels[i]) / T(255);
  return t;
}

template <typename T>
EncoderParams<T>::EncoderParams(const Architecture& a) : arch(a), layout(make_layout(a)), values(layout.total, T(0))
{
}

template <typename T>
void init_params(EncoderParams<T>& params, std::uint64_t seed)
{
  Xorshift64Star rng(seed);
  for (const auto& b : params.layout.blocks)
  {
    T* dst = params.values.data() + b.offset;
    if (b.bias)
    {
      std::fill(dst, dst + b.size, T(0));
      continue;
    }
    const bool conv = b.name.find(".conv") != std::string::npos;
    const double bound = std::sqrt((conv ? 6.0 : 3.0) / static_cast<double>(b.fan_in));
    for (std::size_t i = 0; i < b.size; ++i)
      dst[i] = static_cast<T>(rng.uniform(-bound, bound));
  }
}

template <typename T>
Tensor<T> conv_forward(const EncoderParams<T>& params, std::size_t view, const Tensor<T>& input, ConvCache<T>* cache)
{
  const Architecture& arch = params.arch;
  if (view >= arch.views.size())
    throw std::invalid_argument("conv_forward: view index out of range");
  if (input.shape.size() != 3 || input.shape[0] != 1 || input.shape[1] != arch.input_size ||
      input.shape[2] != arch.input_size)
    throw std::invalid_argument("conv_forward: input must be 1 x " + std::to_string(arch.input_size) + " x " +
                                std::to_string(arch.input_size));
  if (cache)
  {
    cache->inputs.clear();
    cache->activations.clear();
    cache->pool_argmax.clear();
  }

  Tensor<T> x = input;
  Mat<T> col;
  for (std::size_t l = 0; l < arch.convs.size(); ++l)
  {
    const int cin = x.shape[0], h = x.shape[1], w = x.shape[2];
    const int cout = arch.convs[l].out_channels;
    im2col(x.values.data(), cin, h, w, col);
    const ConstMatMap<T> weight(params.block(params.layout.conv_weight[view][l]), cout, cin * 9);
    const ConstVecMap<T> bias(params.block(params.layout.conv_bias[view][l]), cout);

    Tensor<T> y({cout, h, w});
    MatMap<T> ym(y.values.data(), cout, h * w);
    ym.noalias() = weight * col;
    ym.colwise() += bias;
    for (T& v : y.values)
      v = v > T(0) ? v : T(0);

    if (cache)
      cache->inputs.push_back(std::move(x));

    if (arch.convs[l].pool)
    {
      const int oh = h / 2, ow = w / 2;
      Tensor<T> pooled({cout, oh, ow});
      std::vector<int> argmax(pooled.size());
      for (int c = 0; c < cout; ++c)
        for (int oy = 0; oy < oh; ++oy)
          for (int ox = 0; ox < ow; ++ox)
          {
            int best = (c * h + 2 * oy) * w + 2 * ox;
            for (int dy = 0; dy < 2; ++dy)
              for (int dx = 0; dx < 2; ++dx)
              {
                const int idx = (c * h + 2 * oy + dy) * w + 2 * ox + dx;
                if (y.values[static_cast<std::size_t>(idx)] > y.values[static_cast<std::size_t>(best)])
                  best = idx;
              }
            const std::size_t o = (static_cast<std::size_t>(c) * oh + oy) * ow + ox;
            pooled.values[o] = y.values[static_cast<std::size_t>(best)];
            argmax[o] = best;
          }
      if (cache)
      {
        cache->activations.push_back(std::move(y));
        cache->pool_argmax.push_back(std::move(argmax));
      }
      x = std::move(pooled);
    }
    else
    {
      if (cache)
      {
        cache->activations.push_back(y);
        cache->pool_argmax.emplace_back();
      }
      x = std::move(y);
    }
  }
  return x;
}

template <typename T>
Tensor<T> set_pool(const std::vector<Tensor<T>>& frames, std::vector<int>* argmax)
{
  if (frames.empty())
    throw std::invalid_argument("set_pool: no frames");
  for (const Tensor<T>& f : frames)
    if (f.shape != frames.front().shape)
      throw std::invalid_argument("set_pool: frames differ in shape");
  Tensor<T> out = frames.front();
  if (argmax)
    argmax->assign(out.size(), 0);
  for (std::size_t f = 1; f < frames.size(); ++f)
    for (std::size_t i = 0; i < out.size(); ++i)
      if (frames[f].values[i] > out.values[i])
      {
        out.values[i] = frames[f].values[i];
        if (argmax)
          (*argmax)[i] = static_cast<int>(f);
      }
  return out;
}

template <typename T>
std::vector<Tensor<T>> fuse_views(const std::vector<std::vector<Tensor<T>>>& per_view)
{
  if (per_view.empty())
    throw std::invalid_argument("fuse_views: no views");
  const std::size_t n = per_view.front().size();
  for (const auto& v : per_view)
    if (v.size() != n)
      throw std::invalid_argument("fuse_views: views have different frame counts");
  if (per_view.size() == 1)
    return per_view.front();

  std::vector<Tensor<T>> out;
  out.reserve(n);
  for (std::size_t f = 0; f < n; ++f)
  {
    const auto& first = per_view.front()[f];
    int channels = 0;
    for (const auto& v : per_view)
    {
      if (v[f].shape.size() != 3 || v[f].shape[1] != first.shape[1] || v[f].shape[2] != first.shape[2])
        throw std::invalid_argument("fuse_views: spatial extents differ");
      channels += v[f].shape[0];
    }
    Tensor<T> fused({channels, first.shape[1], first.shape[2]});
    auto dst = fused.values.begin();
    for (const auto& v : per_view)
      dst = std::copy(v[f].values.begin(), v[f].values.end(), dst);
    out.push_back(std::move(fused));
  }
  return out;
}

template <typename T>
HppOutput<T> hpp_embed(const EncoderParams<T>& params, const Tensor<T>& pooled)
{
  const Architecture& arch = params.arch;
  const int c = arch.fused_channels();
  const int s = arch.feature_size();
  if (pooled.shape != std::vector<int>{c, s, s})
    throw std::invalid_argument("hpp_embed: pooled map has the wrong shape");
  const int parts = arch.parts;
  const int rows = s / parts;
  const int strip = rows * s;
  const auto e = static_cast<std::size_t>(arch.embed_dim);
  const auto k = static_cast<std::size_t>(arch.n_classes);

  HppOutput<T> out;
  out.pooled.assign(static_cast<std::size_t>(parts * c), T(0));
  out.argmax.assign(out.pooled.size(), 0);
  out.embedding.assign(static_cast<std::size_t>(parts) * e, T(0));
  out.logits.assign(static_cast<std::size_t>(parts) * k, T(0));

  for (int p = 0; p < parts; ++p)
  {
    for (int ch = 0; ch < c; ++ch)
    {
      const int base = (ch * s + p * rows) * s;
      const T* v = pooled.values.data() + base;
      int best = 0;
      T sum = T(0);
      for (int i = 0; i < strip; ++i)
      {
        sum += v[i];
        if (v[i] > v[best])
          best = i;
      }
      const std::size_t o = static_cast<std::size_t>(p * c + ch);
      out.pooled[o] = v[best] + sum / static_cast<T>(strip);
      out.argmax[o] = base + best;
    }
    const auto ei = static_cast<Eigen::Index>(e);
    const auto ki = static_cast<Eigen::Index>(k);
    T* emb = out.embedding.data() + static_cast<std::ptrdiff_t>(p) * ei;
    matvec(params.block(params.layout.embed[static_cast<std::size_t>(p)]), ei, Eigen::Index(c),
           out.pooled.data() + static_cast<std::ptrdiff_t>(p) * c, emb);
    matvec(params.block(params.layout.classifier[static_cast<std::size_t>(p)]), ki, ei, emb,
           out.logits.data() + static_cast<std::ptrdiff_t>(p) * ki);
  }
  return out;
}

template <typename T>
SequenceForward<T> forward_sequence(const EncoderParams<T>& params, const SequenceInput<T>& input, bool record)
{
  const Architecture& arch = params.arch;
  if (input.size() != arch.views.size())
    throw std::invalid_argument("forward_sequence: expected " + std::to_string(arch.views.size()) + " views");
  SequenceForward<T> fwd;
  std::vector<std::vector<Tensor<T>>> features(input.size());
  if (record)
    fwd.conv.resize(input.size());
  std::size_t offset = 0;
  for (std::size_t v = 0; v < input.size(); ++v)
  {
    if (input[v].empty())
      throw std::invalid_argument("forward_sequence: sequence has no frames");
    if (record)
      fwd.conv[v].resize(input[v].size());
    for (std::size_t f = 0; f < input[v].size(); ++f)
      features[v].push_back(conv_forward(params, v, input[v][f], record ? &fwd.conv[v][f] : nullptr));
    fwd.view_channels.push_back(offset);
    offset += static_cast<std::size_t>(arch.feature_channels());
  }
  fwd.pooled = set_pool(fuse_views(features), &fwd.set_argmax);
  fwd.head = hpp_embed(params, fwd.pooled);
  return fwd;
}

template <typename T>
void backward_sequence(const EncoderParams<T>& params, const SequenceInput<T>& input, const SequenceForward<T>& fwd,
                       const std::vector<T>& d_embedding, const std::vector<T>& d_logits, std::vector<T>& grad)
{
  const Architecture& arch = params.arch;
  const ParamLayout& layout = params.layout;
  if (grad.size() != params.values.size())
    throw std::invalid_argument("backward_sequence: gradient buffer has the wrong size");
  if (fwd.conv.size() != input.size())
    throw std::invalid_argument("backward_sequence: forward pass was not recorded");
  const int c = arch.fused_channels();
  const int s = arch.feature_size();
  const int parts = arch.parts;
  const int rows = s / parts;
  const int strip = rows * s;
  const auto e = static_cast<Eigen::Index>(arch.embed_dim);
  const auto k = static_cast<Eigen::Index>(arch.n_classes);
  if (d_embedding.size() != static_cast<std::size_t>(parts * e) || d_logits.size() != static_cast<std::size_t>(parts * k))
    throw std::invalid_argument("backward_sequence: upstream gradient has the wrong size");

  // Part heads.
  Tensor<T> d_pooled({c, s, s});
  std::vector<T> d_emb(static_cast<std::size_t>(e));
  std::vector<T> d_vec(static_cast<std::size_t>(c));
  for (int p = 0; p < parts; ++p)
  {
    const auto up = static_cast<std::size_t>(p);
    const T* emb = fwd.head.embedding.data() + p * e;
    const T* x = fwd.head.pooled.data() + static_cast<std::ptrdiff_t>(p) * c;
    const T* dl = d_logits.data() + p * k;
    T* g_cls = grad.data() + layout.blocks[layout.classifier[up]].offset;
    T* g_w = grad.data() + layout.blocks[layout.embed[up]].offset;

    std::copy(d_embedding.begin() + p * e, d_embedding.begin() + (p + 1) * e, d_emb.begin());
    matvec_t_add(params.block(layout.classifier[up]), k, e, dl, d_emb.data());
    outer_add(dl, k, emb, e, g_cls);
    outer_add(d_emb.data(), e, x, Eigen::Index(c), g_w);
    std::fill(d_vec.begin(), d_vec.end(), T(0));
    matvec_t_add(params.block(layout.embed[up]), e, Eigen::Index(c), d_emb.data(), d_vec.data());

    for (int ch = 0; ch < c; ++ch)
    {
      const T g = d_vec[static_cast<std::size_t>(ch)];
      const int base = (ch * s + p * rows) * s;
      const T share = g / static_cast<T>(strip);
      for (int i = 0; i < strip; ++i)
        d_pooled.values[static_cast<std::size_t>(base + i)] += share;
      d_pooled.values[static_cast<std::size_t>(fwd.head.argmax[static_cast<std::size_t>(p * c + ch)])] += g;
    }
  }

  // Route the pooled gradient to the winning frame, then back through each view.
  const std::size_t n_frames = input.front().size();
  const int fc = arch.feature_channels();
  const std::size_t per_view = static_cast<std::size_t>(fc) * static_cast<std::size_t>(s * s);
  Mat<T> col, dcol, dz;
  for (std::size_t v = 0; v < input.size(); ++v)
    for (std::size_t f = 0; f < n_frames; ++f)
    {
      Tensor<T> dout({fc, s, s});
      bool any = false;
      const std::size_t base = fwd.view_channels[v] * static_cast<std::size_t>(s * s);
      for (std::size_t i = 0; i < per_view; ++i)
        if (static_cast<std::size_t>(fwd.set_argmax[base + i]) == f && d_pooled.values[base + i] != T(0))
        {
          dout.values[i] = d_pooled.values[base + i];
          any = true;
        }
      if (!any)
        continue;

      const ConvCache<T>& cache = fwd.conv[v][f];
      for (std::size_t l = arch.convs.size(); l-- > 0;)
      {
        const Tensor<T>& y = cache.activations[l];
        const Tensor<T>& x = cache.inputs[l];
        const int cout = y.shape[0], h = y.shape[1], w = y.shape[2];
        const int cin = x.shape[0];

        Tensor<T> dy;
        if (arch.convs[l].pool)
        {
          dy = Tensor<T>(y.shape);
          const auto& am = cache.pool_argmax[l];
          for (std::size_t i = 0; i < dout.size(); ++i)
            dy.values[static_cast<std::size_t>(am[i])] += dout.values[i];
        }
        else
          dy = std::move(dout);
        for (std::size_t i = 0; i < dy.size(); ++i)
          if (!(y.values[i] > T(0)))
            dy.values[i] = T(0);

        const ConstMatMap<T> dzm(dy.values.data(), cout, h * w);
        im2col(x.values.data(), cin, h, w, col);
        MatMap<T> g_w(grad.data() + layout.blocks[layout.conv_weight[v][l]].offset, cout, cin * 9);
        T* g_b = grad.data() + layout.blocks[layout.conv_bias[v][l]].offset;
        g_w.noalias() += dzm * col.transpose();
        for (int o = 0; o < cout; ++o)
        {
          const T* row = dy.values.data() + static_cast<std::ptrdiff_t>(o) * h * w;
          T acc = T(0);
          for (int i = 0; i < h * w; ++i)
            acc += row[i];
          g_b[o] += acc;
        }
        if (l == 0)
          break;
        const ConstMatMap<T> weight(params.block(layout.conv_weight[v][l]), cout, cin * 9);
        dcol.noalias() = weight.transpose() * dzm;
        dout = Tensor<T>(x.shape);
        col2im(dcol, cin, h, w, dout.values.data());
      }
    }
}

template <typename T>
SequenceInput<T> make_input(const std::vector<std::vector<AlignedImage>>& views, const std::vector<std::size_t>& frames)
{
  SequenceInput<T> input(views.size());
  for (std::size_t v = 0; v < views.size(); ++v)
    for (std::size_t f : frames)
    {
      if (f >= views[v].size())
        throw std::out_of_range("make_input: frame index out of range");
      input[v].push_back(image_tensor<T>(views[v][f]));
    }
  return input;
}

#define LIDARGAIT_INSTANTIATE(T)                                                                                   \
  template struct Tensor<T>;                                                                                       \
  template struct EncoderParams<T>;                                                                                \
  template Tensor<T> image_tensor<T>(const AlignedImage&);                                                         \
  template void init_params<T>(EncoderParams<T>&, std::uint64_t);                                                  \
  template Tensor<T> conv_forward<T>(const EncoderParams<T>&, std::size_t, const Tensor<T>&, ConvCache<T>*);       \
  template Tensor<T> set_pool<T>(const std::vector<Tensor<T>>&, std::vector<int>*);                                \
  template std::vector<Tensor<T>> fuse_views<T>(const std::vector<std::vector<Tensor<T>>>&);                       \
  template HppOutput<T> hpp_embed<T>(const EncoderParams<T>&, const Tensor<T>&);                                   \
  template SequenceForward<T> forward_sequence<T>(const EncoderParams<T>&, const SequenceInput<T>&, bool);         \
  template void backward_sequence<T>(const EncoderParams<T>&, const SequenceInput<T>&, const SequenceForward<T>&,  \
                                     const std::vector<T>&, const std::vector<T>&, std::vector<T>&);               \
  template SequenceInput<T> make_input<T>(const std::vector<std::vector<AlignedImage>>&,                           \
                                          const std::vector<std::size_t>&);

LIDARGAIT_INSTANTIATE(float)
LIDARGAIT_INSTANTIATE(double)

#undef LIDARGAIT_INSTANTIATE

} // namespace lidargait
