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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lidargait {

/// One 3x3 convolution (pad 1) followed by ReLU and an optional 2x2 max pool.
struct ConvSpec
{
  int out_channels = 0;
  bool pool = false;
  friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

/// 32, 32 pool, 64, 64 pool, 128, 128.
std::vector<ConvSpec> default_convs();

struct Architecture
{
  std::vector<ViewKind> views = {ViewKind::RangeView};
  InputMode input = InputMode::Depth;
  std::vector<ConvSpec> convs = default_convs();
  int input_size = kAlignedSize;
  int parts = 4;
  int embed_dim = 128;
  int n_classes = 2;

  void validate() const;
  int feature_size() const;     ///< spatial extent after all pools
  int feature_channels() const; ///< channels of one view's last conv
  int fused_channels() const;   ///< feature_channels() * number of views
  std::size_t embedding_size() const { return static_cast<std::size_t>(parts) * static_cast<std::size_t>(embed_dim); }

  /// Single ASCII line, e.g. "views=rv input=depth convs=32,32p,64,64p,128,128 size=64 parts=4 embed=128 classes=30".
  std::string descriptor() const;
  static Architecture parse(const std::string& descriptor);
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Offsets of every parameter block inside the flat parameter vector. Blocks
/// are laid out view by view (conv weight then bias per layer), then the
/// per-part embedding maps, then the per-part classifiers.
struct ParamLayout
{
  struct Block
  {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
    std::size_t fan_in = 0;
    bool bias = false;
  };

  std::vector<std::vector<std::size_t>> conv_weight; ///< [view][layer] -> block index
  std::vector<std::vector<std::size_t>> conv_bias;
  std::vector<std::size_t> embed; ///< [part], embed_dim x fused_channels
  std::vector<std::size_t> classifier; ///< [part], n_classes x embed_dim
  std::vector<Block> blocks;
  std::size_t total = 0;
};

ParamLayout make_layout(const Architecture& arch);

template <typename T>
struct Tensor
{
  std::vector<int> shape;
  std::vector<T> values;

  Tensor() = default;
  explicit Tensor(std::vector<int> s);
  std::size_t size() const { return values.size(); }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// 1 x 64 x 64 tensor with intensities scaled to [0, 1].
template <typename T>
Tensor<T> image_tensor(const AlignedImage& img);

template <typename T>
struct EncoderParams
{
  Architecture arch;
  ParamLayout layout;
  std::vector<T> values;

  EncoderParams() = default;
  /// Zero-filled parameters for `arch`.
  explicit EncoderParams(const Architecture& arch);

  T* block(std::size_t index) { return values.data() + layout.blocks[index].offset; }
  const T* block(std::size_t index) const { return values.data() + layout.blocks[index].offset; }
};

/// Uniform initialization: conv weights in +-sqrt(6 / fan_in), linear maps in
/// +-sqrt(3 / fan_in), biases zero.
template <typename T>
void init_params(EncoderParams<T>& params, std::uint64_t seed);

/// Activations of one view's conv stack for one frame, kept for backward.
template <typename T>
struct ConvCache
{
  std::vector<Tensor<T>> inputs;         ///< input of every layer
  std::vector<Tensor<T>> activations;    ///< post-ReLU, pre-pool output
  std::vector<std::vector<int>> pool_argmax; ///< flat pre-pool index per pooled element
};

template <typename T>
Tensor<T> conv_forward(const EncoderParams<T>& params, std::size_t view, const Tensor<T>& input,
                       ConvCache<T>* cache = nullptr);

/// Elementwise maximum over frames; `argmax` receives the winning frame per
/// element (lowest frame index on ties).
template <typename T>
Tensor<T> set_pool(const std::vector<Tensor<T>>& frames, std::vector<int>* argmax = nullptr);

/// Frame-by-frame channel concatenation of per-view feature maps ([view][frame]).
template <typename T>
std::vector<Tensor<T>> fuse_views(const std::vector<std::vector<Tensor<T>>>& per_view);

template <typename T>
struct HppOutput
{
  std::vector<T> pooled;    ///< parts x fused_channels, max + mean per strip
  std::vector<int> argmax;  ///< parts x fused_channels, flat index of the strip max
  std::vector<T> embedding; ///< parts x embed_dim
  std::vector<T> logits;    ///< parts x n_classes
};

template <typename T>
HppOutput<T> hpp_embed(const EncoderParams<T>& params, const Tensor<T>& pooled);

/// Input of one sequence: [view][frame] tensors.
template <typename T>
using SequenceInput = std::vector<std::vector<Tensor<T>>>;

template <typename T>
struct SequenceForward
{
  std::vector<std::vector<ConvCache<T>>> conv; ///< [view][frame], empty unless recorded
  std::vector<std::size_t> view_channels;      ///< channel offset of each view in the fused map
  Tensor<T> pooled;
  std::vector<int> set_argmax;
  HppOutput<T> head;
};

/// conv per frame and view -> fuse -> set pool -> part embedding.
template <typename T>
SequenceForward<T> forward_sequence(const EncoderParams<T>& params, const SequenceInput<T>& input,
                                    bool record = false);

/// Accumulates parameter gradients of a recorded forward into `grad` given the
/// upstream gradients of the embedding and logits.
template <typename T>
void backward_sequence(const EncoderParams<T>& params, const SequenceInput<T>& input, const SequenceForward<T>& fwd,
                       const std::vector<T>& d_embedding, const std::vector<T>& d_logits, std::vector<T>& grad);

/// Tensors for the selected frames of rendered images ([view][frame]).
template <typename T>
SequenceInput<T> make_input(const std::vector<std::vector<AlignedImage>>& views, const std::vector<std::size_t>& frames);

extern template struct Tensor<float>;
extern template struct Tensor<double>;
extern template struct EncoderParams<float>;
extern template struct EncoderParams<double>;

} // namespace lidargait
