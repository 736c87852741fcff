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

#ifndef DESKASR_NN_POSITIONAL_H_
#define DESKASR_NN_POSITIONAL_H_

#include <cmath>
#include <cstdint>
#include <vector>

#include "numerics/tensor.h"

namespace deskasr::nn {

// Fixed sinusoidal encoding of (possibly negative) positions:
//   pe[p][2i] = sin(p / 10000^(2i/d)),  pe[p][2i+1] = cos(p / 10000^(2i/d)).
template <typename T>
numerics::Tensor<T> SinusoidalEncoding(const std::vector<int64_t>& positions,
                                       int64_t dim) {
  std::vector<T> data(positions.size() * static_cast<size_t>(dim));
  for (size_t r = 0; r < positions.size(); ++r) {
    const double p = static_cast<double>(positions[r]);
    for (int64_t i = 0; i < dim; i += 2) {
      const double freq =
          std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(dim));
      data[r * dim + i] = static_cast<T>(std::sin(p * freq));
      if (i + 1 < dim) data[r * dim + i + 1] = static_cast<T>(std::cos(p * freq));
    }
  }
  return numerics::Tensor<T>::FromData(
      {static_cast<int64_t>(positions.size()), dim}, std::move(data));
}

template <typename T>
numerics::Tensor<T> SinusoidalEncoding(int64_t length, int64_t dim) {
  std::vector<int64_t> positions(static_cast<size_t>(length));
  for (int64_t i = 0; i < length; ++i) positions[i] = i;
  return SinusoidalEncoding<T>(positions, dim);
}

}  // namespace deskasr::nn

#endif  // DESKASR_NN_POSITIONAL_H_
