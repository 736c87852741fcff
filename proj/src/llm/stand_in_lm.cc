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

#include "llm/stand_in_lm.h"

#include <cmath>
#include <stdexcept>

#include "nn/positional.h"

namespace deskasr::llm {

using numerics::Add;
using numerics::Scale;

void LmConfig::Validate() const {
  if (vocab_size < 1 || d_model < 1 || num_layers < 0) {
    throw std::invalid_argument("lm: invalid dimensions");
  }
  if (d_model % heads() != 0) {
    throw std::invalid_argument("lm: d_model " + std::to_string(d_model) +
                                " not divisible by " + std::to_string(heads()) +
                                " heads");
  }
  if (lora.rank < 0 || (lora.rank > 0 && lora.alpha <= 0.0)) {
    throw std::invalid_argument("lm: invalid LoRA rank/alpha");
  }
  if (dropout_p < 0.0 || dropout_p >= 1.0) {
    throw std::invalid_argument("lm: dropout_p out of [0, 1)");
  }
}

template <typename T>
LmLayer<T>::LmLayer(const LmConfig& cfg, Rng& rng)
    : norm_attn_(cfg.d_model),
      norm_ff_(cfg.d_model),
      attn_(cfg.d_model, cfg.heads(), rng, cfg.lora),
      ff_(cfg.d_model, cfg.ffn_dim(), nn::Activation::kSwish, rng) {}

template <typename T>
Tensor<T> LmLayer<T>::Forward(const Tensor<T>& x, const ForwardContext& ctx,
                              bool lora_enabled) const {
  const Tensor<T> h = norm_attn_.Forward(x);
  const Tensor<T> y = Add(
      x, nn::ApplyDropout(attn_.Forward(h, h, {-1, true}, ctx, lora_enabled),
                          ctx));
  return Add(y, ff_.Forward(norm_ff_.Forward(y), ctx));
}

template <typename T>
void LmLayer<T>::Collect(const std::string& prefix,
                         ParameterList<T>& out) const {
  norm_attn_.Collect(nn::Join(prefix, "norm_attn"), out);
  attn_.Collect(nn::Join(prefix, "attn"), out);
  norm_ff_.Collect(nn::Join(prefix, "norm_ff"), out);
  ff_.Collect(nn::Join(prefix, "ff"), out);
}

template <typename T>
void LmLayer<T>::CollectBase(const std::string& prefix,
                             ParameterList<T>& out) const {
  norm_attn_.Collect(nn::Join(prefix, "norm_attn"), out);
  attn_.CollectBase(nn::Join(prefix, "attn"), out);
  norm_ff_.Collect(nn::Join(prefix, "norm_ff"), out);
  ff_.Collect(nn::Join(prefix, "ff"), out);
}

template <typename T>
void LmLayer<T>::CollectLora(const std::string& prefix,
                             ParameterList<T>& out) const {
  attn_.CollectAdapter(nn::Join(prefix, "attn"), out);
}

template <typename T>
StandInLm<T>::StandInLm(const LmConfig& cfg, Rng& rng)
    : cfg_(cfg), norm_out_(cfg.d_model) {
  cfg_.Validate();
  embedding_ = nn::NormalTensor<T>(
      {cfg_.vocab_size, cfg_.d_model},
      1.0 / std::sqrt(static_cast<double>(cfg_.d_model)), rng);
  layers_.reserve(static_cast<size_t>(cfg_.num_layers));
  for (int i = 0; i < cfg_.num_layers; ++i) layers_.emplace_back(cfg_, rng);
}

template <typename T>
Tensor<T> StandInLm<T>::Embed(std::span<const int> ids) const {
  const T up = static_cast<T>(std::sqrt(static_cast<double>(cfg_.d_model)));
  return Scale(numerics::Embedding(embedding_, ids), up);
}

template <typename T>
Tensor<T> StandInLm<T>::Forward(const Tensor<T>& embeddings,
                                const ForwardContext& ctx,
                                bool lora_enabled) const {
  if (embeddings.rank() != 2 || embeddings.cols() != cfg_.d_model) {
    throw numerics::ShapeError("lm: expected [n x " +
                               std::to_string(cfg_.d_model) + "] embeddings");
  }
  Tensor<T> x = Add(embeddings, nn::SinusoidalEncoding<T>(embeddings.rows(),
                                                          cfg_.d_model));
  x = nn::ApplyDropout(x, ctx);
  for (const auto& layer : layers_) x = layer.Forward(x, ctx, lora_enabled);
  x = norm_out_.Forward(x);
  const T down =
      static_cast<T>(1.0 / std::sqrt(static_cast<double>(cfg_.d_model)));
  return Scale(numerics::MatMulNT(x, embedding_), down);
}

template <typename T>
void StandInLm<T>::Collect(const std::string& prefix,
                           ParameterList<T>& out) const {
  out.push_back({nn::Join(prefix, "embedding"), embedding_});
  for (size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].Collect(nn::Join(prefix, "layers." + std::to_string(i)), out);
  }
  norm_out_.Collect(nn::Join(prefix, "norm_out"), out);
}

template <typename T>
void StandInLm<T>::CollectBase(const std::string& prefix,
                               ParameterList<T>& out) const {
  out.push_back({nn::Join(prefix, "embedding"), embedding_});
  for (size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].CollectBase(nn::Join(prefix, "layers." + std::to_string(i)),
                           out);
  }
  norm_out_.Collect(nn::Join(prefix, "norm_out"), out);
}

template <typename T>
void StandInLm<T>::CollectLora(const std::string& prefix,
                               ParameterList<T>& out) const {
  for (size_t i = 0; i < layers_.size(); ++i) {
    layers_[i].CollectLora(nn::Join(prefix, "layers." + std::to_string(i)),
                           out);
  }
}

template <typename T>
void StandInLm<T>::FreezeBase() {
  ParameterList<T> base;
  CollectBase("", base);
  for (auto& p : base) {
    p.tensor.set_requires_grad(false);
    p.tensor.ZeroGrad();
  }
}

template <typename T>
void StandInLm<T>::MergeLora() {
  for (auto& layer : layers_) layer.MergeLora();
}

template class LmLayer<float>;
template class LmLayer<double>;
template class StandInLm<float>;
template class StandInLm<double>;

}  // namespace deskasr::llm
