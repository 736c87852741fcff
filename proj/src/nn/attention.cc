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

#include "nn/attention.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace deskasr::nn {

using numerics::ConcatCols;
using numerics::MatMul;
using numerics::MatMulNT;
using numerics::Scale;
using numerics::SliceCols;

std::vector<uint8_t> AttentionMask::Build(int64_t q_len, int64_t k_len) const {
  std::vector<uint8_t> blocked(static_cast<size_t>(q_len * k_len), 0);
  const int64_t keys = valid_keys < 0 ? k_len : valid_keys;
  for (int64_t i = 0; i < q_len; ++i) {
    for (int64_t j = 0; j < k_len; ++j) {
      if (j >= keys || (causal && j > i)) blocked[i * k_len + j] = 1;
    }
  }
  return blocked;
}

template <typename T>
Tensor<T> AttendHead(const Tensor<T>& logits, const Tensor<T>& values,
                     const std::vector<uint8_t>& blocked,
                     const ForwardContext& ctx) {
  Tensor<T> masked = numerics::MaskedFill(
      logits, blocked, -std::numeric_limits<T>::infinity());
  Tensor<T> weights = ApplyDropout(numerics::Softmax(masked, -1), ctx);
  return MatMul(weights, values);
}

template <typename T>
MultiHeadAttention<T>::MultiHeadAttention(int64_t dim, int num_heads, Rng& rng,
                                          const LoraConfig& lora)
    : num_heads_(num_heads),
      head_dim_(dim / num_heads),
      q_(dim, dim, lora, rng),
      k_(dim, dim, rng),
      v_(dim, dim, lora, rng),
      out_(dim, dim, rng) {
  if (num_heads <= 0 || dim % num_heads != 0) {
    throw std::invalid_argument("attention width " + std::to_string(dim) +
                                " not divisible by " +
                                std::to_string(num_heads) + " heads");
  }
}

template <typename T>
Tensor<T> MultiHeadAttention<T>::Forward(const Tensor<T>& query,
                                         const Tensor<T>& memory,
                                         const AttentionMask& mask,
                                         const ForwardContext& ctx,
                                         bool lora_enabled) const {
  const Tensor<T> q = q_.Forward(query, lora_enabled);
  const Tensor<T> k = k_.Forward(memory);
  const Tensor<T> v = v_.Forward(memory, lora_enabled);
  const std::vector<uint8_t> blocked = mask.Build(query.rows(), memory.rows());
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(head_dim_)));
  std::vector<Tensor<T>> heads;
  heads.reserve(static_cast<size_t>(num_heads_));
  for (int h = 0; h < num_heads_; ++h) {
    const int64_t off = h * head_dim_;
    Tensor<T> logits = Scale(
        MatMulNT(SliceCols(q, off, head_dim_), SliceCols(k, off, head_dim_)),
        scale);
    heads.push_back(AttendHead(logits, SliceCols(v, off, head_dim_), blocked, ctx));
  }
  Tensor<T> merged = num_heads_ == 1 ? heads[0] : ConcatCols<T>(heads);
  return out_.Forward(merged);
}

template <typename T>
void MultiHeadAttention<T>::Collect(const std::string& prefix,
                                    ParameterList<T>& out) const {
  CollectBase(prefix, out);
  CollectAdapter(prefix, out);
}

template <typename T>
void MultiHeadAttention<T>::CollectBase(const std::string& prefix,
                                        ParameterList<T>& out) const {
  q_.CollectBase(Join(prefix, "q"), out);
  k_.Collect(Join(prefix, "k"), out);
  v_.CollectBase(Join(prefix, "v"), out);
  out_.Collect(Join(prefix, "out"), out);
}

template <typename T>
void MultiHeadAttention<T>::CollectAdapter(const std::string& prefix,
                                           ParameterList<T>& out) const {
  q_.CollectAdapter(Join(prefix, "q"), out);
  v_.CollectAdapter(Join(prefix, "v"), out);
}

template Tensor<float> AttendHead(const Tensor<float>&, const Tensor<float>&,
                                  const std::vector<uint8_t>&,
                                  const ForwardContext&);
template Tensor<double> AttendHead(const Tensor<double>&, const Tensor<double>&,
                                   const std::vector<uint8_t>&,
                                   const ForwardContext&);
template class MultiHeadAttention<float>;
template class MultiHeadAttention<double>;

}  // namespace deskasr::nn
