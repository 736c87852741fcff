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

#ifndef DESKASR_NN_PARAMETER_H_
#define DESKASR_NN_PARAMETER_H_

#include <cmath>
#include <string>
#include <vector>

#include "numerics/ops.h"
#include "numerics/rng.h"
#include "numerics/tensor.h"

namespace deskasr::nn {

using numerics::Rng;
using numerics::Shape;
using numerics::Tensor;

template <typename T>
struct NamedParameter {
  std::string name;
  Tensor<T> tensor;
};

template <typename T>
using ParameterList = std::vector<NamedParameter<T>>;

inline std::string Join(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

// Everything a forward pass needs besides weights and inputs.
struct ForwardContext {
  bool training = false;
  double dropout = 0.0;
  Rng* rng = nullptr;
};

template <typename T>
Tensor<T> ApplyDropout(const Tensor<T>& x, const ForwardContext& ctx) {
  if (!ctx.training || ctx.dropout <= 0.0 || ctx.rng == nullptr) return x;
  return numerics::Dropout(x, ctx.dropout, *ctx.rng);
}

// Glorot uniform for a [fan_out x fan_in] projection.
template <typename T>
Tensor<T> XavierUniform(int64_t fan_out, int64_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<T> data(static_cast<size_t>(fan_out * fan_in));
  for (T& v : data) v = static_cast<T>(rng.Uniform(-bound, bound));
  return Tensor<T>::FromData({fan_out, fan_in}, std::move(data), true);
}

template <typename T>
Tensor<T> NormalTensor(Shape shape, double stddev, Rng& rng) {
  std::vector<T> data(static_cast<size_t>(numerics::NumElements(shape)));
  for (T& v : data) v = static_cast<T>(rng.Normal(0.0, stddev));
  return Tensor<T>::FromData(std::move(shape), std::move(data), true);
}

template <typename T>
Tensor<T> ZerosParam(Shape shape) {
  return Tensor<T>::Zeros(std::move(shape), true);
}

template <typename T>
Tensor<T> OnesParam(Shape shape) {
  return Tensor<T>::Full(std::move(shape), T(1), true);
}

template <typename T>
int64_t CountElements(const ParameterList<T>& params) {
  int64_t n = 0;
  for (const auto& p : params) n += p.tensor.numel();
  return n;
}

}  // namespace deskasr::nn

#endif  // DESKASR_NN_PARAMETER_H_
