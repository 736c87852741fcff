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

#ifndef DESKASR_NN_LORA_H_
#define DESKASR_NN_LORA_H_

#include <string>

#include "nn/layers.h"

namespace deskasr::nn {

struct LoraConfig {
  int rank = 8;
  double alpha = 16.0;
  double scaling() const { return rank > 0 ? alpha / rank : 0.0; }
};

// Frozen base projection plus a trainable low-rank delta:
//   y = x W^T + b + (alpha / r) * (x A^T) B^T,   A [r x in], B [out x r].
// B starts at zero, so a fresh adapter leaves the base output untouched.
template <typename T>
class LoraLinear {
 public:
  LoraLinear() = default;
  LoraLinear(int64_t in_dim, int64_t out_dim, const LoraConfig& cfg, Rng& rng);

  Tensor<T> Forward(const Tensor<T>& x, bool lora_enabled) const;
  void Collect(const std::string& prefix, ParameterList<T>& out) const;

  // Base parameters and adapter parameters, listed separately so callers
  // can apply a trainability policy.
  void CollectBase(const std::string& prefix, ParameterList<T>& out) const;
  void CollectAdapter(const std::string& prefix, ParameterList<T>& out) const;

  // Folds (alpha/r) B A into the base weight and zeroes B.
  void Merge();
  // Dense (alpha/r) B A, [out x in].
  std::vector<T> DeltaWeight() const;

  int rank() const { return cfg_.rank; }
  const LoraConfig& config() const { return cfg_; }
  Linear<T>& base() { return base_; }
  const Linear<T>& base() const { return base_; }
  Tensor<T>& lora_a() { return a_; }
  Tensor<T>& lora_b() { return b_; }

 private:
  Linear<T> base_;
  LoraConfig cfg_;
  Tensor<T> a_;
  Tensor<T> b_;
};

extern template class LoraLinear<float>;
extern template class LoraLinear<double>;

}  // namespace deskasr::nn

#endif  // DESKASR_NN_LORA_H_
