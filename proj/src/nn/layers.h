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

#ifndef DESKASR_NN_LAYERS_H_
#define DESKASR_NN_LAYERS_H_

#include <string>

#include "nn/parameter.h"

namespace deskasr::nn {

// y = x W^T + b, W stored [out x in].
template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(int64_t in_dim, int64_t out_dim, Rng& rng, bool bias = true);

  Tensor<T> Forward(const Tensor<T>& x) const;
  void Collect(const std::string& prefix, ParameterList<T>& out) const;
  void ZeroInit();

  int64_t in_dim() const { return weight_.cols(); }
  int64_t out_dim() const { return weight_.rows(); }
  Tensor<T>& weight() { return weight_; }
  const Tensor<T>& weight() const { return weight_; }
  const Tensor<T>& bias() const { return bias_; }
  bool has_bias() const { return bias_.defined(); }

 private:
  Tensor<T> weight_;
  Tensor<T> bias_;
};

template <typename T>
class LayerNormLayer {
 public:
  LayerNormLayer() = default;
  explicit LayerNormLayer(int64_t dim);

  Tensor<T> Forward(const Tensor<T>& x) const {
    return numerics::LayerNorm(x, gamma_, beta_, 1e-5);
  }
  void Collect(const std::string& prefix, ParameterList<T>& out) const;

 private:
  Tensor<T> gamma_;
  Tensor<T> beta_;
};

enum class Activation { kRelu, kSwish };

// Linear -> activation -> dropout -> Linear -> dropout.
template <typename T>
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(int64_t dim, int64_t hidden, Activation act, Rng& rng);

  Tensor<T> Forward(const Tensor<T>& x, const ForwardContext& ctx) const;
  void Collect(const std::string& prefix, ParameterList<T>& out) const;
  void ZeroInitOutput() { out_.ZeroInit(); }

 private:
  Linear<T> in_;
  Linear<T> out_;
  Activation act_ = Activation::kRelu;
};

extern template class Linear<float>;
extern template class Linear<double>;
extern template class LayerNormLayer<float>;
extern template class LayerNormLayer<double>;
extern template class FeedForward<float>;
extern template class FeedForward<double>;

}  // namespace deskasr::nn

#endif  // DESKASR_NN_LAYERS_H_
