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

#include "nn/lora.h"

#include <cmath>

namespace deskasr::nn {

template <typename T>
LoraLinear<T>::LoraLinear(int64_t in_dim, int64_t out_dim,
                          const LoraConfig& cfg, Rng& rng)
    : base_(in_dim, out_dim, rng), cfg_(cfg) {
  if (cfg_.rank > 0) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
    std::vector<T> a(static_cast<size_t>(cfg_.rank * in_dim));
    for (T& v : a) v = static_cast<T>(rng.Uniform(-bound, bound));
    a_ = Tensor<T>::FromData({cfg_.rank, in_dim}, std::move(a), true);
    b_ = ZerosParam<T>({out_dim, cfg_.rank});
  }
}

template <typename T>
Tensor<T> LoraLinear<T>::Forward(const Tensor<T>& x, bool lora_enabled) const {
  Tensor<T> y = base_.Forward(x);
  if (!lora_enabled || cfg_.rank <= 0) return y;
  Tensor<T> delta = numerics::MatMulNT(numerics::MatMulNT(x, a_), b_);
  return numerics::Add(y, numerics::Scale(delta, static_cast<T>(cfg_.scaling())));
}

template <typename T>
void LoraLinear<T>::Collect(const std::string& prefix,
                            ParameterList<T>& out) const {
  CollectBase(prefix, out);
  CollectAdapter(prefix, out);
}

template <typename T>
void LoraLinear<T>::CollectBase(const std::string& prefix,
                                ParameterList<T>& out) const {
  base_.Collect(prefix, out);
}

template <typename T>
void LoraLinear<T>::CollectAdapter(const std::string& prefix,
                                   ParameterList<T>& out) const {
  if (cfg_.rank <= 0) return;
  out.push_back({Join(prefix, "lora_a"), a_});
  out.push_back({Join(prefix, "lora_b"), b_});
}

template <typename T>
std::vector<T> LoraLinear<T>::DeltaWeight() const {
  const int64_t out_dim = base_.out_dim(), in_dim = base_.in_dim();
  std::vector<T> delta(static_cast<size_t>(out_dim * in_dim), T(0));
  if (cfg_.rank <= 0) return delta;
  const T s = static_cast<T>(cfg_.scaling());
  const auto a = a_.data();
  const auto b = b_.data();
  for (int64_t o = 0; o < out_dim; ++o) {
    for (int64_t r = 0; r < cfg_.rank; ++r) {
      const T bor = b[o * cfg_.rank + r] * s;
      if (bor == T(0)) continue;
      for (int64_t i = 0; i < in_dim; ++i) {
        delta[o * in_dim + i] += bor * a[r * in_dim + i];
      }
    }
  }
  return delta;
}

template <typename T>
void LoraLinear<T>::Merge() {
  const std::vector<T> delta = DeltaWeight();
  auto w = base_.weight().mutable_data();
  for (size_t i = 0; i < delta.size(); ++i) w[i] += delta[i];
  if (cfg_.rank > 0) {
    for (T& v : b_.mutable_data()) v = T(0);
  }
}

template class LoraLinear<float>;
template class LoraLinear<double>;

}  // namespace deskasr::nn
