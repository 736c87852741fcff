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

#ifndef DESKASR_NUMERICS_OPS_H_
#define DESKASR_NUMERICS_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "numerics/rng.h"
#include "numerics/tensor.h"

// Differentiable operations. Unless stated otherwise, matrices are rank-2
// row-major [rows x cols] and there is no broadcasting except AddBias.
namespace deskasr::numerics {

template <typename T>
Tensor<T> MatMul(const Tensor<T>& a, const Tensor<T>& b);
// a[m x k] * b[n x k]^T
template <typename T>
Tensor<T> MatMulNT(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> Transpose(const Tensor<T>& x);

template <typename T>
Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> Sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> Mul(const Tensor<T>& a, const Tensor<T>& b);
// x[..., n] + bias[n], bias broadcast over all leading positions.
template <typename T>
Tensor<T> AddBias(const Tensor<T>& x, const Tensor<T>& bias);
template <typename T>
Tensor<T> Scale(const Tensor<T>& x, T factor);

template <typename T>
Tensor<T> Relu(const Tensor<T>& x);
template <typename T>
Tensor<T> Sigmoid(const Tensor<T>& x);
template <typename T>
Tensor<T> Swish(const Tensor<T>& x);
// Splits the last axis into halves (value, gate): value * sigmoid(gate).
template <typename T>
Tensor<T> Glu(const Tensor<T>& x);

template <typename T>
Tensor<T> Softmax(const Tensor<T>& x, int axis = -1);
template <typename T>
Tensor<T> LogSoftmax(const Tensor<T>& x, int axis = -1);

// Normalizes each row over the last axis, then applies gamma/beta.
template <typename T>
Tensor<T> LayerNorm(const Tensor<T>& x, const Tensor<T>& gamma,
                    const Tensor<T>& beta, double eps = 1e-5);

// Time-major depthwise convolution: x[T x C], weight[C x K] (K odd),
// bias[C]; zero "same" padding of (K-1)/2 on both sides.
template <typename T>
Tensor<T> Conv1dDepthwise(const Tensor<T>& x, const Tensor<T>& weight,
                          const Tensor<T>& bias);
// x[T x Cin], weight[Cout x Cin], bias[Cout].
template <typename T>
Tensor<T> Conv1dPointwise(const Tensor<T>& x, const Tensor<T>& weight,
                          const Tensor<T>& bias);
// x[Cin x H x W], weight[Cout x Cin x KH x KW], bias[Cout].
template <typename T>
Tensor<T> Conv2d(const Tensor<T>& x, const Tensor<T>& weight,
                 const Tensor<T>& bias, int stride, int padding);

// Rows of table[V x d] selected by ids; out [n x d].
template <typename T>
Tensor<T> Embedding(const Tensor<T>& table, std::span<const int> ids);

// Mean negative log-likelihood over rows whose mask is 1. An all-zero mask
// yields loss 0 and zero gradients.
template <typename T>
Tensor<T> CrossEntropy(const Tensor<T>& logits, std::span<const int> targets,
                       std::span<const uint8_t> mask);

// Inverted dropout; p == 0 returns the input handle unchanged.
template <typename T>
Tensor<T> Dropout(const Tensor<T>& x, double p, Rng& rng);

// Positions where mask != 0 are replaced by `value` (gradient 0 there).
template <typename T>
Tensor<T> MaskedFill(const Tensor<T>& x, std::span<const uint8_t> mask,
                     T value);

// Leading-axis slicing and concatenation (any rank).
template <typename T>
Tensor<T> SliceRows(const Tensor<T>& x, int64_t start, int64_t length);
template <typename T>
Tensor<T> ConcatRows(std::span<const Tensor<T>> parts);
// Last-axis slicing and concatenation of rank-2 tensors.
template <typename T>
Tensor<T> SliceCols(const Tensor<T>& x, int64_t start, int64_t length);
template <typename T>
Tensor<T> ConcatCols(std::span<const Tensor<T>> parts);
template <typename T>
Tensor<T> Reshape(const Tensor<T>& x, Shape shape);
// [A x B x C] -> [B x A x C]
template <typename T>
Tensor<T> SwapLeadingAxes(const Tensor<T>& x);

// scores[T x (2M+1)] indexed by clipped relative distance; returns [T x T]
// with out[i][j] = scores[i][clamp(i - j, -M, M) + M].
template <typename T>
Tensor<T> GatherRelative(const Tensor<T>& scores, int64_t max_distance);

template <typename T>
Tensor<T> Sum(const Tensor<T>& x);
template <typename T>
Tensor<T> Mean(const Tensor<T>& x);

}  // namespace deskasr::numerics

#endif  // DESKASR_NUMERICS_OPS_H_
