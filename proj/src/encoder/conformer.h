// Copyright 2026 The deskasr Authors
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

#ifndef DESKASR_ENCODER_CONFORMER_H_
#define DESKASR_ENCODER_CONFORMER_H_

#include <string>
#include <vector>

#include "encoder/encoder_config.h"
#include "nn/attention.h"
#include "nn/layers.h"

namespace deskasr::encoder {

using nn::ForwardContext;
using nn::ParameterList;
using numerics::Rng;
using numerics::Tensor;

// Zeroes rows at or beyond `valid` of a [T x D] tensor.
template <typename T>
Tensor<T> MaskRows(const Tensor<T>& x, int64_t valid);

// Self-attention with Transformer-XL relative position terms:
//   logit(i, j) = ((q_i + u) . k_j + (q_i + v) . W_pos r_{i-j}) / sqrt(d_k)
// with r_delta the sinusoidal embedding of the relative distance, clipped
// to +-max_relative_distance.
template <typename T>
class RelPositionAttention {
 public:
  RelPositionAttention() = default;
  RelPositionAttention(int64_t dim, int num_heads, int64_t max_distance,
                       Rng& rng);

  Tensor<T> Forward(const Tensor<T>& x, int64_t valid,
                    const ForwardContext& ctx) const;
  // Per-head scaled logits before masking, [T x T] each.
  std::vector<Tensor<T>> Logits(const Tensor<T>& x) const;

  void Collect(const std::string& prefix, ParameterList<T>& out) const;
  void ZeroInitOutput() { out_.ZeroInit(); }

 private:
  struct Projected {
    Tensor<T> q, k, v, pos;
    int64_t clip = 0;
  };
  Projected Project(const Tensor<T>& x) const;
  Tensor<T> HeadLogits(const Projected& p, int h) const;

  int num_heads_ = 1;
  int64_t head_dim_ = 0;
  int64_t max_distance_ = 0;
  nn::Linear<T> q_, k_, v_, out_;
  nn::Linear<T> pos_;
  Tensor<T> bias_u_;  // [heads x head_dim]
  Tensor<T> bias_v_;
};

// pointwise (d -> 2d) -> GLU -> depthwise(K) -> LayerNorm -> Swish ->
// pointwise (d -> d) -> dropout
template <typename T>
class ConvModule {
 public:
  ConvModule() = default;
  ConvModule(int64_t dim, int kernel, Rng& rng);

  Tensor<T> Forward(const Tensor<T>& x, int64_t valid,
                    const ForwardContext& ctx) const;
  void Collect(const std::string& prefix, ParameterList<T>& out) const;
  void ZeroInitOutput() { pointwise2_.ZeroInit(); }

 private:
  nn::Linear<T> pointwise1_;
  Tensor<T> depthwise_weight_;  // [d x K]
  Tensor<T> depthwise_bias_;
  nn::LayerNormLayer<T> norm_;
  nn::Linear<T> pointwise2_;
};

// Macaron block, every sublayer pre-norm:
//   x += 0.5 FFN(LN x); x += MHSA(LN x); x += Conv(LN x);
//   x += 0.5 FFN(LN x); x = LN x
template <typename T>
class ConformerBlock {
 public:
  ConformerBlock() = default;
  ConformerBlock(const EncoderConfig& cfg, Rng& rng);

  Tensor<T> Forward(const Tensor<T>& x, int64_t valid,
                    const ForwardContext& ctx) const;
  void Collect(const std::string& prefix, ParameterList<T>& out) const;

  const RelPositionAttention<T>& attention() const { return attn_; }
  const nn::LayerNormLayer<T>& attention_norm() const { return norm_attn_; }

 private:
  nn::LayerNormLayer<T> norm_ff1_, norm_attn_, norm_conv_, norm_ff2_, norm_out_;
  nn::FeedForward<T> ff1_, ff2_;
  RelPositionAttention<T> attn_;
  ConvModule<T> conv_;
};

extern template class RelPositionAttention<float>;
extern template class RelPositionAttention<double>;
extern template class ConvModule<float>;
extern template class ConvModule<double>;
extern template class ConformerBlock<float>;
extern template class ConformerBlock<double>;

}  // namespace deskasr::encoder

#endif  // DESKASR_ENCODER_CONFORMER_H_
