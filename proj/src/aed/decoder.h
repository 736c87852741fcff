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

#ifndef DESKASR_AED_DECODER_H_
#define DESKASR_AED_DECODER_H_

#include <span>
#include <string>
#include <vector>

#include "encoder/encoder.h"
#include "nn/attention.h"

namespace deskasr::aed {

using encoder::EncoderOutput;
using nn::ForwardContext;
using nn::ParameterList;
using numerics::Rng;
using numerics::Tensor;

struct DecoderConfig {
  int64_t vocab_size = 0;
  int64_t d_model = 64;
  int num_layers = 2;
  int num_heads = 0;  // 0 selects d_model / 64 (at least one)
  double ffn_expansion = 4.0;
  double dropout_p = 0.0;

  int heads() const {
    return num_heads > 0 ? num_heads
                         : static_cast<int>(std::max<int64_t>(1, d_model / 64));
  }
  int64_t ffn_dim() const {
    return static_cast<int64_t>(static_cast<double>(d_model) * ffn_expansion);
  }
  void Validate() const;
};

// Pre-norm layer: causal self-attention, cross-attention over encoder
// states, feed-forward.
template <typename T>
class DecoderLayer {
 public:
  DecoderLayer() = default;
  DecoderLayer(const DecoderConfig& cfg, Rng& rng);

  Tensor<T> Forward(const Tensor<T>& x, const EncoderOutput<T>& enc,
                    const ForwardContext& ctx) const;
  void Collect(const std::string& prefix, ParameterList<T>& out) const;

 private:
  nn::LayerNormLayer<T> norm_self_, norm_cross_, norm_ff_;
  nn::MultiHeadAttention<T> self_attn_, cross_attn_;
  nn::FeedForward<T> ff_;
};

// Transformer decoder with fixed sinusoidal positions. The token embedding
// doubles as the output projection.
template <typename T>
class TransformerDecoder {
 public:
  TransformerDecoder() = default;
  TransformerDecoder(const DecoderConfig& cfg, Rng& rng);

  // Teacher-forced logits, one row per input position: [n x vocab].
  Tensor<T> Forward(std::span<const int> tokens, const EncoderOutput<T>& enc,
                    const ForwardContext& ctx) const;
  // log p(next | prefix) over the vocabulary; prefix starts with sos.
  std::vector<double> NextLogProbs(std::span<const int> prefix,
                                   const EncoderOutput<T>& enc) const;

  void Collect(const std::string& prefix, ParameterList<T>& out) const;

  const DecoderConfig& config() const { return cfg_; }
  Tensor<T>& embedding() { return embedding_; }
  const Tensor<T>& embedding() const { return embedding_; }

 private:
  DecoderConfig cfg_;
  Tensor<T> embedding_;  // [vocab x d_model], tied with the output layer
  std::vector<DecoderLayer<T>> layers_;
  nn::LayerNormLayer<T> norm_out_;
};

extern template class DecoderLayer<float>;
extern template class DecoderLayer<double>;
extern template class TransformerDecoder<float>;
extern template class TransformerDecoder<double>;

}  // namespace deskasr::aed

#endif  // DESKASR_AED_DECODER_H_
