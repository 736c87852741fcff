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

#ifndef DESKASR_NN_ATTENTION_H_
#define DESKASR_NN_ATTENTION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "nn/lora.h"

namespace deskasr::nn {

// Which (query, key) pairs are blocked. Keys at or beyond `valid_keys`
// are padding; `causal` additionally blocks keys after the query.
struct AttentionMask {
  int64_t valid_keys = -1;  // -1: all keys valid
  bool causal = false;

  // Row-major [q_len x k_len], 1 where blocked.
  std::vector<uint8_t> Build(int64_t q_len, int64_t k_len) const;
};

// Softmax attention of one head with blocked logits set to -inf.
template <typename T>
Tensor<T> AttendHead(const Tensor<T>& logits, const Tensor<T>& values,
                     const std::vector<uint8_t>& blocked,
                     const ForwardContext& ctx);

// Multi-head scaled dot-product attention. Query and value projections
// accept LoRA adapters (rank 0 disables them).
template <typename T>
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(int64_t dim, int num_heads, Rng& rng,
                     const LoraConfig& lora = LoraConfig{0, 0.0});

  Tensor<T> Forward(const Tensor<T>& query, const Tensor<T>& memory,
                    const AttentionMask& mask, const ForwardContext& ctx,
                    bool lora_enabled = false) const;

  void Collect(const std::string& prefix, ParameterList<T>& out) const;
  void CollectBase(const std::string& prefix, ParameterList<T>& out) const;
  void CollectAdapter(const std::string& prefix, ParameterList<T>& out) const;
  void ZeroInitOutput() { out_.ZeroInit(); }
  void MergeLora() {
    q_.Merge();
    v_.Merge();
  }

  int num_heads() const { return num_heads_; }
  LoraLinear<T>& query_proj() { return q_; }
  LoraLinear<T>& value_proj() { return v_; }

 private:
  int num_heads_ = 1;
  int64_t head_dim_ = 0;
  LoraLinear<T> q_;
  Linear<T> k_;
  LoraLinear<T> v_;
  Linear<T> out_;
};

extern template class MultiHeadAttention<float>;
extern template class MultiHeadAttention<double>;

}  // namespace deskasr::nn

#endif  // DESKASR_NN_ATTENTION_H_
