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

#ifndef DESKASR_ENCODER_ENCODER_CONFIG_H_
#define DESKASR_ENCODER_ENCODER_CONFIG_H_

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace deskasr::encoder {

struct EncoderConfig {
  int64_t input_dim = 80;
  int64_t d_model = 64;
  int num_layers = 2;
  // 0 selects d_model / 64 (at least one head).
  int num_heads = 0;
  double ffn_expansion = 4.0;
  int conv_kernel = 33;
  double dropout_p = 0.0;
  int64_t max_relative_distance = 256;
  // Subsampling channel plan 1 -> c1 -> c2 before the flatten projection;
  // 0 selects d_model / 4 and d_model / 2.
  int64_t subsample_channels1 = 0;
  int64_t subsample_channels2 = 0;
  // Zero the last projection of every residual branch at construction.
  bool zero_init_residual = false;

  int heads() const {
    return num_heads > 0 ? num_heads
                         : static_cast<int>(std::max<int64_t>(1, d_model / 64));
  }
  int64_t ffn_dim() const {
    return static_cast<int64_t>(static_cast<double>(d_model) * ffn_expansion);
  }
  int64_t channels1() const {
    return subsample_channels1 > 0 ? subsample_channels1
                                   : std::max<int64_t>(1, d_model / 4);
  }
  int64_t channels2() const {
    return subsample_channels2 > 0 ? subsample_channels2
                                   : std::max<int64_t>(1, d_model / 2);
  }

  void Validate() const {
    if (d_model <= 0 || num_layers < 0 || input_dim < 1) {
      throw std::invalid_argument("encoder: invalid dimensions");
    }
    if (d_model % heads() != 0) {
      throw std::invalid_argument("encoder: d_model " + std::to_string(d_model) +
                                  " not divisible by " +
                                  std::to_string(heads()) + " heads");
    }
    if (conv_kernel < 1 || conv_kernel % 2 == 0) {
      throw std::invalid_argument("encoder: conv_kernel must be odd");
    }
    if (dropout_p < 0.0 || dropout_p >= 1.0) {
      throw std::invalid_argument("encoder: dropout_p out of [0, 1)");
    }
    if (max_relative_distance < 1) {
      throw std::invalid_argument("encoder: max_relative_distance must be >= 1");
    }
  }
};

// Output length of one stride-2, kernel-3, padding-1 convolution.
constexpr int64_t ConvOutputLength(int64_t len) {
  return (len + 2 * 1 - 3) / 2 + 1;
}

// Frames after the two-convolution subsampler (10 ms -> 40 ms).
constexpr int64_t SubsampledLength(int64_t frames) {
  return ConvOutputLength(ConvOutputLength(frames));
}

}  // namespace deskasr::encoder

#endif  // DESKASR_ENCODER_ENCODER_CONFIG_H_
