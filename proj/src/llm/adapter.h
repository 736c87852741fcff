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

#ifndef DESKASR_LLM_ADAPTER_H_
#define DESKASR_LLM_ADAPTER_H_

#include <string>

#include "nn/layers.h"

namespace deskasr::llm {

using nn::ForwardContext;
using nn::ParameterList;
using numerics::Rng;
using numerics::Tensor;

struct AdapterConfig {
  int splice_factor = 2;     // 40 ms -> 80 ms
  int64_t encoder_dim = 64;  // encoder d_model
  int64_t hidden_dim = 0;    // 0 selects 2 x encoder_dim
  int64_t out_dim = 64;      // LM embedding width

  int64_t in_dim() const { return encoder_dim * splice_factor; }
  int64_t hidden() const { return hidden_dim > 0 ? hidden_dim : 2 * encoder_dim; }
  void Validate() const;
};

constexpr int64_t SplicedLength(int64_t frames, int factor) {
  return (frames + factor - 1) / factor;
}

// Concatenates each group of `factor` consecutive rows among the first
// `valid` rows of `states`; a short final group is zero-padded.
// Output: [ceil(valid / factor) x factor * d].
template <typename T>
Tensor<T> SpliceFrames(const Tensor<T>& states, int64_t valid, int factor);

// Linear -> ReLU -> Linear into the LM embedding space.
template <typename T>
class Adapter {
 public:
  Adapter() = default;
  Adapter(const AdapterConfig& cfg, Rng& rng);

  // Encoder states [T' x encoder_dim] -> E_S [ceil(valid / k) x out_dim].
  Tensor<T> Forward(const Tensor<T>& states, int64_t valid) const;
  // Already spliced input [n x in_dim].
  Tensor<T> Project(const Tensor<T>& spliced) const;

  void Collect(const std::string& prefix, ParameterList<T>& out) const;
  const AdapterConfig& config() const { return cfg_; }

 private:
  AdapterConfig cfg_;
  nn::Linear<T> in_;
  nn::Linear<T> out_;
};

extern template class Adapter<float>;
extern template class Adapter<double>;

}  // namespace deskasr::llm

#endif  // DESKASR_LLM_ADAPTER_H_
