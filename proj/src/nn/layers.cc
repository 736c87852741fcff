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

#include "nn/layers.h"

namespace deskasr::nn {

template <typename T>
Linear<T>::Linear(int64_t in_dim, int64_t out_dim, Rng& rng, bool bias)
    : weight_(XavierUniform<T>(out_dim, in_dim, rng)) {
  if (bias) bias_ = ZerosParam<T>({out_dim});
}

template <typename T>
Tensor<T> Linear<T>::Forward(const Tensor<T>& x) const {
  Tensor<T> y = numerics::MatMulNT(x, weight_);
  return bias_.defined() ? numerics::AddBias(y, bias_) : y;
}

template <typename T>
void Linear<T>::Collect(const std::string& prefix,
                        ParameterList<T>& out) const {
  out.push_back({Join(prefix, "weight"), weight_});
  if (bias_.defined()) out.push_back({Join(prefix, "bias"), bias_});
}

template <typename T>
void Linear<T>::ZeroInit() {
  for (T& v : weight_.mutable_data()) v = T(0);
  if (bias_.defined()) {
    for (T& v : bias_.mutable_data()) v = T(0);
  }
}

template <typename T>
LayerNormLayer<T>::LayerNormLayer(int64_t dim)
    : gamma_(OnesParam<T>({dim})), beta_(ZerosParam<T>({dim})) {}

template <typename T>
void LayerNormLayer<T>::Collect(const std::string& prefix,
                                ParameterList<T>& out) const {
  out.push_back({Join(prefix, "gamma"), gamma_});
  out.push_back({Join(prefix, "beta"), beta_});
}

template <typename T>
FeedForward<T>::FeedForward(int64_t dim, int64_t hidden, Activation act,
                            Rng& rng)
    : in_(dim, hidden, rng), out_(hidden, dim, rng), act_(act) {}

template <typename T>
Tensor<T> FeedForward<T>::Forward(const Tensor<T>& x,
                                  const ForwardContext& ctx) const {
  Tensor<T> h = in_.Forward(x);
  h = act_ == Activation::kSwish ? numerics::Swish(h) : numerics::Relu(h);
  h = ApplyDropout(h, ctx);
  return ApplyDropout(out_.Forward(h), ctx);
}

template <typename T>
void FeedForward<T>::Collect(const std::string& prefix,
                             ParameterList<T>& out) const {
  in_.Collect(Join(prefix, "w1"), out);
  out_.Collect(Join(prefix, "w2"), out);
}

template class Linear<float>;
template class Linear<double>;
template class LayerNormLayer<float>;
template class LayerNormLayer<double>;
template class FeedForward<float>;
template class FeedForward<double>;

}  // namespace deskasr::nn
