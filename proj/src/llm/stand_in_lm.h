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

#ifndef DESKASR_LLM_STAND_IN_LM_H_
#define DESKASR_LLM_STAND_IN_LM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nn/attention.h"

namespace deskasr::llm {

using nn::ForwardContext;
using nn::ParameterList;
using numerics::Rng;
using numerics::Tensor;

struct LmConfig {
  int64_t vocab_size = 0;
  int64_t d_model = 64;
  int num_layers = 2;
  int num_heads = 0;  // 0 selects d_model / 64 (at least one)
  double ffn_expansion = 4.0;
  double dropout_p = 0.0;
  nn::LoraConfig lora;

  int heads() const {
    return num_heads > 0 ? num_heads
                         : static_cast<int>(std::max<int64_t>(1, d_model / 64));
  }
  int64_t ffn_dim() const {
    return static_cast<int64_t>(static_cast<double>(d_model) * ffn_expansion);
  }
  void Validate() const;
};

// Pre-norm block: causal self-attention (LoRA on query/value), Swish FFN.
template <typename T>
class LmLayer {
 public:
  LmLayer() = default;
  LmLayer(const LmConfig& cfg, Rng& rng);

  Tensor<T> Forward(const Tensor<T>& x, const ForwardContext& ctx,
                    bool lora_enabled) const;
  void Collect(const std::string& prefix, ParameterList<T>& out) const;
  void CollectBase(const std::string& prefix, ParameterList<T>& out) const;
  void CollectLora(const std::string& prefix, ParameterList<T>& out) const;
  void MergeLora() { attn_.MergeLora(); }
  nn::MultiHeadAttention<T>& attention() { return attn_; }

 private:
  nn::LayerNormLayer<T> norm_attn_, norm_ff_;
  nn::MultiHeadAttention<T> attn_;
  nn::FeedForward<T> ff_;
};

// Small decoder-only Transformer standing in for a pretrained LLM. Token
// embeddings are tied with the output projection.
template <typename T>
class StandInLm {
 public:
  StandInLm() = default;
  StandInLm(const LmConfig& cfg, Rng& rng);

  // Input embeddings of token ids, [n x d_model].
  Tensor<T> Embed(std::span<const int> ids) const;
  // Causal pass over an embedding sequence; logits [n x vocab].
  Tensor<T> Forward(const Tensor<T>& embeddings, const ForwardContext& ctx,
                    bool lora_enabled = true) const;

  void Collect(const std::string& prefix, ParameterList<T>& out) const;
  // Everything except the LoRA adapters.
  void CollectBase(const std::string& prefix, ParameterList<T>& out) const;
  void CollectLora(const std::string& prefix, ParameterList<T>& out) const;
  // Base weights stop recording gradients; adapters keep them.
  void FreezeBase();
  void MergeLora();

  const LmConfig& config() const { return cfg_; }
  LmLayer<T>& layer(size_t i) { return layers_[i]; }
  size_t num_layers() const { return layers_.size(); }

 private:
  LmConfig cfg_;
  Tensor<T> embedding_;  // [vocab x d_model]
  std::vector<LmLayer<T>> layers_;
  nn::LayerNormLayer<T> norm_out_;
};

extern template class LmLayer<float>;
extern template class LmLayer<double>;
extern template class StandInLm<float>;
extern template class StandInLm<double>;

}  // namespace deskasr::llm

#endif  // DESKASR_LLM_STAND_IN_LM_H_
