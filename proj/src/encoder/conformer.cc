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

#include "encoder/conformer.h"

#include <cmath>
#include <stdexcept>

#include "nn/positional.h"

namespace deskasr::encoder {

using numerics::Add;
using numerics::MatMulNT;
using numerics::Reshape;
using numerics::Scale;
using numerics::SliceCols;
using numerics::SliceRows;

template <typename T>
Tensor<T> MaskRows(const Tensor<T>& x, int64_t valid) {
  const int64_t rows = x.dim(0);
  if (valid >= rows) return x;
  const int64_t stride = x.numel() / rows;
  std::vector<uint8_t> mask(static_cast<size_t>(x.numel()), 0);
  std::fill(mask.begin() + valid * stride, mask.end(), uint8_t{1});
  return numerics::MaskedFill(x, mask, T(0));
}

template <typename T>
RelPositionAttention<T>::RelPositionAttention(int64_t dim, int num_heads,
                                              int64_t max_distance, Rng& rng)
    : num_heads_(num_heads),
      head_dim_(dim / num_heads),
      max_distance_(max_distance),
      q_(dim, dim, rng),
      k_(dim, dim, rng),
      v_(dim, dim, rng),
      out_(dim, dim, rng),
      pos_(dim, dim, rng, /*bias=*/false) {
  if (dim % num_heads != 0) {
    throw std::invalid_argument("relative attention: width not divisible by heads");
  }
  bias_u_ = nn::XavierUniform<T>(num_heads, head_dim_, rng);
  bias_v_ = nn::XavierUniform<T>(num_heads, head_dim_, rng);
}

template <typename T>
typename RelPositionAttention<T>::Projected RelPositionAttention<T>::Project(
    const Tensor<T>& x) const {
  Projected p;
  p.q = q_.Forward(x);
  p.k = k_.Forward(x);
  p.v = v_.Forward(x);
  const int64_t len = x.rows();
  p.clip = std::min<int64_t>(max_distance_, len - 1);
  // Row r encodes relative distance r - clip.
  std::vector<int64_t> distances;
  for (int64_t d = -p.clip; d <= p.clip; ++d) distances.push_back(d);
  p.pos = pos_.Forward(nn::SinusoidalEncoding<T>(distances, q_.in_dim()));
  return p;
}

template <typename T>
Tensor<T> RelPositionAttention<T>::HeadLogits(const Projected& p, int h) const {
  const int64_t off = h * head_dim_;
  const Tensor<T> q = SliceCols(p.q, off, head_dim_);
  const Tensor<T> u = Reshape(SliceRows(bias_u_, h, 1), {head_dim_});
  const Tensor<T> v = Reshape(SliceRows(bias_v_, h, 1), {head_dim_});
  const Tensor<T> content =
      MatMulNT(numerics::AddBias(q, u), SliceCols(p.k, off, head_dim_));
  const Tensor<T> position = numerics::GatherRelative(
      MatMulNT(numerics::AddBias(q, v), SliceCols(p.pos, off, head_dim_)),
      p.clip);
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(head_dim_)));
  return Scale(Add(content, position), scale);
}

template <typename T>
Tensor<T> RelPositionAttention<T>::Forward(const Tensor<T>& x, int64_t valid,
                                           const ForwardContext& ctx) const {
  const Projected p = Project(x);
  const int64_t len = x.rows();
  const std::vector<uint8_t> blocked =
      nn::AttentionMask{valid < len ? valid : -1, false}.Build(len, len);
  std::vector<Tensor<T>> heads;
  for (int h = 0; h < num_heads_; ++h) {
    heads.push_back(nn::AttendHead(HeadLogits(p, h),
                                   SliceCols(p.v, h * head_dim_, head_dim_),
                                   blocked, ctx));
  }
  Tensor<T> merged = num_heads_ == 1 ? heads[0] : numerics::ConcatCols<T>(heads);
  return out_.Forward(merged);
}

template <typename T>
std::vector<Tensor<T>> RelPositionAttention<T>::Logits(const Tensor<T>& x) const {
  const Projected p = Project(x);
  std::vector<Tensor<T>> out;
  for (int h = 0; h < num_heads_; ++h) out.push_back(HeadLogits(p, h));
  return out;
}

template <typename T>
void RelPositionAttention<T>::Collect(const std::string& prefix,
                                      ParameterList<T>& out) const {
  q_.Collect(nn::Join(prefix, "q"), out);
  k_.Collect(nn::Join(prefix, "k"), out);
  v_.Collect(nn::Join(prefix, "v"), out);
  out_.Collect(nn::Join(prefix, "out"), out);
  pos_.Collect(nn::Join(prefix, "pos"), out);
  out.push_back({nn::Join(prefix, "bias_u"), bias_u_});
  out.push_back({nn::Join(prefix, "bias_v"), bias_v_});
}

template <typename T>
ConvModule<T>::ConvModule(int64_t dim, int kernel, Rng& rng)
    : pointwise1_(dim, 2 * dim, rng),
      norm_(dim),
      pointwise2_(dim, dim, rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(kernel));
  std::vector<T> w(static_cast<size_t>(dim * kernel));
  for (T& v : w) v = static_cast<T>(rng.Uniform(-bound, bound));
  depthwise_weight_ = Tensor<T>::FromData({dim, kernel}, std::move(w), true);
  depthwise_bias_ = nn::ZerosParam<T>({dim});
}

template <typename T>
Tensor<T> ConvModule<T>::Forward(const Tensor<T>& x, int64_t valid,
                                 const ForwardContext& ctx) const {
  Tensor<T> h = numerics::Glu(pointwise1_.Forward(x));
  // Padded frames must look like the convolution's zero padding.
  h = MaskRows(h, valid);
  h = numerics::Conv1dDepthwise(h, depthwise_weight_, depthwise_bias_);
  h = numerics::Swish(norm_.Forward(h));
  return nn::ApplyDropout(pointwise2_.Forward(h), ctx);
}

template <typename T>
void ConvModule<T>::Collect(const std::string& prefix,
                            ParameterList<T>& out) const {
  pointwise1_.Collect(nn::Join(prefix, "pointwise1"), out);
  out.push_back({nn::Join(prefix, "depthwise.weight"), depthwise_weight_});
  out.push_back({nn::Join(prefix, "depthwise.bias"), depthwise_bias_});
  norm_.Collect(nn::Join(prefix, "norm"), out);
  pointwise2_.Collect(nn::Join(prefix, "pointwise2"), out);
}

template <typename T>
ConformerBlock<T>::ConformerBlock(const EncoderConfig& cfg, Rng& rng)
    : norm_ff1_(cfg.d_model),
      norm_attn_(cfg.d_model),
      norm_conv_(cfg.d_model),
      norm_ff2_(cfg.d_model),
      norm_out_(cfg.d_model),
      ff1_(cfg.d_model, cfg.ffn_dim(), nn::Activation::kSwish, rng),
      ff2_(cfg.d_model, cfg.ffn_dim(), nn::Activation::kSwish, rng),
      attn_(cfg.d_model, cfg.heads(), cfg.max_relative_distance, rng),
      conv_(cfg.d_model, cfg.conv_kernel, rng) {
  if (cfg.zero_init_residual) {
    ff1_.ZeroInitOutput();
    ff2_.ZeroInitOutput();
    attn_.ZeroInitOutput();
    conv_.ZeroInitOutput();
  }
}

template <typename T>
Tensor<T> ConformerBlock<T>::Forward(const Tensor<T>& x, int64_t valid,
                                     const ForwardContext& ctx) const {
  const T half = T(0.5);
  Tensor<T> h = Add(x, Scale(ff1_.Forward(norm_ff1_.Forward(x), ctx), half));
  h = Add(h, nn::ApplyDropout(attn_.Forward(norm_attn_.Forward(h), valid, ctx), ctx));
  h = Add(h, conv_.Forward(norm_conv_.Forward(h), valid, ctx));
  h = Add(h, Scale(ff2_.Forward(norm_ff2_.Forward(h), ctx), half));
  return norm_out_.Forward(h);
}

template <typename T>
void ConformerBlock<T>::Collect(const std::string& prefix,
                                ParameterList<T>& out) const {
  norm_ff1_.Collect(nn::Join(prefix, "norm_ff1"), out);
  ff1_.Collect(nn::Join(prefix, "ff1"), out);
  norm_attn_.Collect(nn::Join(prefix, "norm_attn"), out);
  attn_.Collect(nn::Join(prefix, "attn"), out);
  norm_conv_.Collect(nn::Join(prefix, "norm_conv"), out);
  conv_.Collect(nn::Join(prefix, "conv"), out);
  norm_ff2_.Collect(nn::Join(prefix, "norm_ff2"), out);
  ff2_.Collect(nn::Join(prefix, "ff2"), out);
  norm_out_.Collect(nn::Join(prefix, "norm_out"), out);
}

template Tensor<float> MaskRows(const Tensor<float>&, int64_t);
template Tensor<double> MaskRows(const Tensor<double>&, int64_t);
template class RelPositionAttention<float>;
template class RelPositionAttention<double>;
template class ConvModule<float>;
template class ConvModule<double>;
template class ConformerBlock<float>;
template class ConformerBlock<double>;

}  // namespace deskasr::encoder
