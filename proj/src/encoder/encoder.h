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

#ifndef DESKASR_ENCODER_ENCODER_H_
#define DESKASR_ENCODER_ENCODER_H_

#include <string>
#include <vector>

#include "encoder/conformer.h"

namespace deskasr::encoder {

template <typename T>
struct EncoderOutput {
  Tensor<T> states;  // [T' x d_model]; rows >= valid_length are padding
  int64_t valid_length = 0;
};

// Two stride-2 3x3 convolutions with ReLU over the (time, frequency) plane,
// then a projection of channel x frequency to d_model.
template <typename T>
class ConvSubsampling {
 public:
  ConvSubsampling() = default;
  ConvSubsampling(const EncoderConfig& cfg, Rng& rng);

  // features [T x input_dim]; frames beyond `valid` are treated as padding.
  Tensor<T> Forward(const Tensor<T>& features, int64_t valid) const;
  void Collect(const std::string& prefix, ParameterList<T>& out) const;

 private:
  Tensor<T> conv1_w_, conv1_b_, conv2_w_, conv2_b_;
  nn::Linear<T> proj_;
};

template <typename T>
class Encoder {
 public:
  Encoder() = default;
  Encoder(const EncoderConfig& cfg, Rng& rng);

  // Features of one utterance, [T x input_dim]. `valid_frames` < T marks
  // trailing rows as padding (masked throughout).
  EncoderOutput<T> Forward(const Tensor<T>& features, int64_t valid_frames,
                           const ForwardContext& ctx) const;
  EncoderOutput<T> Forward(const Tensor<T>& features,
                           const ForwardContext& ctx) const {
    return Forward(features, features.rows(), ctx);
  }
  // Pads every utterance to the longest one and encodes each padded copy.
  std::vector<EncoderOutput<T>> ForwardBatch(
      const std::vector<Tensor<T>>& features, const ForwardContext& ctx) const;

  void Collect(const std::string& prefix, ParameterList<T>& out) const;

  const EncoderConfig& config() const { return cfg_; }
  const ConformerBlock<T>& block(size_t i) const { return blocks_[i]; }
  size_t num_blocks() const { return blocks_.size(); }

 private:
  EncoderConfig cfg_;
  ConvSubsampling<T> subsampling_;
  std::vector<ConformerBlock<T>> blocks_;
};

extern template class ConvSubsampling<float>;
extern template class ConvSubsampling<double>;
extern template class Encoder<float>;
extern template class Encoder<double>;

}  // namespace deskasr::encoder

#endif  // DESKASR_ENCODER_ENCODER_H_
