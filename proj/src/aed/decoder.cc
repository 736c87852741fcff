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

#include "aed/decoder.h"

#include <cmath>
#include <stdexcept>

#include "nn/positional.h"

namespace deskasr::aed {

using numerics::Add;
using numerics::Scale;

void DecoderConfig::Validate() const {
  if (vocab_size < 1 || d_model < 1 || num_layers < 0) {
    throw std::invalid_argument("decoder: invalid dimensions");
  }
  if (d_model % heads() != 0) {
    throw std::invalid_argument("decoder: d_model " + std::to_string(d_model) +
                                " not divisible by " + std::to_string(heads()) +
                                " heads");
  }
  if (dropout_p < 0.0 || dropout_p >= 1.0) {
    throw std::invalid_argument("decoder: dropout_p out of [0, 1)");
  }
}

template <typename T>
DecoderLayer<T>::DecoderLayer(const DecoderConfig& cfg, Rng& rng)
    : norm_self_(cfg.d_model),
      norm_cross_(cfg.d_model),
      norm_ff_(cfg.d_model),
      self_attn_(cfg.d_model, cfg.heads(), rng),
      cross_attn_(cfg.d_model, cfg.heads(), rng),
      ff_(cfg.d_model, cfg.ffn_dim(), nn::Activation::kRelu, rng) {}

template <typename T>
Tensor<T> DecoderLayer<T>::Forward(const Tensor<T>& x,
                                   const EncoderOutput<T>& enc,
                                   const ForwardContext& ctx) const {
  Tensor<T> h = norm_self_.Forward(x);
  Tensor<T> y = Add(x, nn::ApplyDropout(
                           self_attn_.Forward(h, h, {-1, true}, ctx), ctx));
  const int64_t valid =
      enc.valid_length < enc.states.rows() ? enc.valid_length : -1;
  y = Add(y, nn::ApplyDropout(cross_attn_.Forward(norm_cross_.Forward(y),
                                                  enc.states, {valid, false}, ctx),
                              ctx));
  return Add(y, ff_.Forward(norm_ff_.Forward(y), ctx));
}

template <typename T>
void DecoderLayer<T>::Collect(const std::string& prefix,
                              ParameterList<T>& out) const {
  norm_self_.Collect(nn::Join(prefix, "norm_self"), out);
  self_attn_.Collect(nn::Join(prefix, "self_attn"), out);
  norm_cross_.Collect(nn::Join(prefix, "norm_cross"), out);
  cross_attn_.Collect(nn::Join(prefix, "cross_attn"), out);
  norm_ff_.Collect(nn::Join(prefix, "norm_ff"), out);
  ff_.Collect(nn::Join(prefix, "ff"), out);
}

template <typename T>
TransformerDecoder<T>::TransformerDecoder(const DecoderConfig& cfg, Rng& rng)
    : cfg_(cfg), norm_out_(cfg.d_model) {
  cfg_.Validate();
  embedding_ = nn::NormalTensor<T>(
      {cfg_.vocab_size, cfg_.d_model},
      1.0 / std::sqrt(static_cast<double>(cfg_.d_model)), rng);
  layers_.reserve(static_cast<size_t>(cfg_.num_layers));
  for (int i = 0; i < cfg_.num_layers; ++i) layers_.emplace_back(cfg_, rng);
}

template <typename T>
Tensor<T> TransformerDecoder<T>::Forward(std::span<const int> tokens,
                                         const EncoderOutput<T>& enc,
                                         const ForwardContext& ctx) const {
  if (tokens.empty()) throw std::invalid_argument("decoder: empty prefix");
  const T up = static_cast<T>(std::sqrt(static_cast<double>(cfg_.d_model)));
  Tensor<T> x = Scale(numerics::Embedding(embedding_, tokens), up);
  x = Add(x, nn::SinusoidalEncoding<T>(static_cast<int64_t>(tokens.size()),
                                       cfg_.d_model));
  x = nn::ApplyDropout(x, ctx);
  for (const auto& layer : layers_) x = layer.Forward(x, enc, ctx);
  x = norm_out_.Forward(x);
  // Tied projection, rescaled by 1/sqrt(d) to undo the input-side scale.
  return Scale(numerics::MatMulNT(x, embedding_), T(1) / up);
}

template <typename T>
std::vector<double> TransformerDecoder<T>::NextLogProbs(
    std::span<const int> prefix, const EncoderOutput<T>& enc) const {
  numerics::NoGradGuard no_grad;
  const Tensor<T> logits = Forward(prefix, enc, ForwardContext{});
  const int64_t last = logits.rows() - 1;
  const Tensor<T> lp =
      numerics::LogSoftmax(numerics::SliceRows(logits, last, 1), -1);
  return std::vector<double>(lp.data().begin(), lp.data().end());
}

template <typename T>
void TransformerDecoder<T>::Collect(const std::string& prefix,
                                    ParameterList<T>& out) const {
  out.push_back({nn::Join(prefix, "embedding"), embedding_});
  for (size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].Collect(nn::Join(prefix, "layers." + std::to_string(i)), out);
  }
  norm_out_.Collect(nn::Join(prefix, "norm_out"), out);
}

template class DecoderLayer<float>;
template class DecoderLayer<double>;
template class TransformerDecoder<float>;
template class TransformerDecoder<double>;

}  // namespace deskasr::aed
