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

#include "numerics/ops.h"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

namespace deskasr::numerics {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapC = Eigen::Map<const RowMat<T>>;
template <typename T>
using Map = Eigen::Map<RowMat<T>>;

template <typename T>
using BackwardFn = std::function<void(Node<T>&)>;

// Wraps freshly computed values in a node; history is recorded only when
// grad mode is on and some input needs a gradient.
template <typename T>
Tensor<T> MakeResult(Shape shape, std::vector<T> value,
                     std::initializer_list<const Tensor<T>*> inputs,
                     BackwardFn<T> backward) {
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  bool needs = false;
  if (GradEnabled()) {
    for (const Tensor<T>* in : inputs) needs = needs || in->requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    for (const Tensor<T>* in : inputs) node->inputs.push_back(in->node_ptr());
    node->backward = std::move(backward);
  }
  return Tensor<T>(std::move(node));
}

template <typename T>
Tensor<T> MakeResultN(Shape shape, std::vector<T> value,
                      std::span<const Tensor<T>> inputs,
                      BackwardFn<T> backward) {
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  bool needs = false;
  if (GradEnabled()) {
    for (const Tensor<T>& in : inputs) needs = needs || in.requires_grad();
  }
  if (needs) {
    node->requires_grad = true;
    for (const Tensor<T>& in : inputs) node->inputs.push_back(in.node_ptr());
    node->backward = std::move(backward);
  }
  return Tensor<T>(std::move(node));
}

// Gradient buffer of an input, or nullptr if it does not need one.
template <typename T>
T* GradOf(Node<T>& self, size_t i) {
  Node<T>& in = *self.inputs[i];
  if (!in.requires_grad) return nullptr;
  return in.EnsureGrad().data();
}

void RequireRank(const Shape& s, size_t rank, const char* op) {
  if (s.size() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " +
                     std::to_string(rank) + ", got " + ShapeToString(s));
  }
}

void RequireSameShape(const Shape& a, const Shape& b, const char* op) {
  if (a != b) {
    throw ShapeError(std::string(op) + ": shape mismatch " + ShapeToString(a) +
                     " vs " + ShapeToString(b));
  }
}

int NormalizeAxis(int axis, size_t rank, const char* op) {
  const int r = static_cast<int>(rank);
  if (axis < 0) axis += r;
  if (axis < 0 || axis >= r) {
    throw ShapeError(std::string(op) + ": axis out of range");
  }
  return axis;
}

// outer x n x inner decomposition around an axis.
struct AxisSplit {
  int64_t outer = 1, n = 1, inner = 1;
};

AxisSplit SplitAxis(const Shape& s, int axis) {
  AxisSplit a;
  for (int i = 0; i < axis; ++i) a.outer *= s[static_cast<size_t>(i)];
  a.n = s[static_cast<size_t>(axis)];
  for (size_t i = static_cast<size_t>(axis) + 1; i < s.size(); ++i) {
    a.inner *= s[i];
  }
  return a;
}

template <typename T>
T StableSigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T, typename Fwd, typename Deriv>
Tensor<T> Elementwise(const Tensor<T>& x, Fwd fwd, Deriv deriv) {
  std::vector<T> out(x.data().begin(), x.data().end());
  for (T& v : out) v = fwd(v);
  return MakeResult<T>(x.shape(), std::move(out), {&x},
                       [deriv](Node<T>& self) {
                         T* gx = GradOf(self, 0);
                         if (!gx) return;
                         const auto& xv = self.inputs[0]->value;
                         for (size_t i = 0; i < xv.size(); ++i) {
                           gx[i] += self.grad[i] * deriv(xv[i], self.value[i]);
                         }
                       });
}

}  // namespace

template <typename T>
Tensor<T> MatMul(const Tensor<T>& a, const Tensor<T>& b) {
  RequireRank(a.shape(), 2, "MatMul");
  RequireRank(b.shape(), 2, "MatMul");
  const int64_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw ShapeError("MatMul: inner dimensions differ, " +
                     ShapeToString(a.shape()) + " x " +
                     ShapeToString(b.shape()));
  }
  std::vector<T> out(static_cast<size_t>(m * n));
  Map<T>(out.data(), m, n).noalias() =
      MapC<T>(a.data().data(), m, k) * MapC<T>(b.data().data(), k, n);
  return MakeResult<T>({m, n}, std::move(out), {&a, &b},
                       [m, k, n](Node<T>& self) {
                         MapC<T> g(self.grad.data(), m, n);
                         if (T* ga = GradOf(self, 0)) {
                           Map<T>(ga, m, k).noalias() +=
                               g * MapC<T>(self.inputs[1]->value.data(), k, n)
                                       .transpose();
                         }
                         if (T* gb = GradOf(self, 1)) {
                           Map<T>(gb, k, n).noalias() +=
                               MapC<T>(self.inputs[0]->value.data(), m, k)
                                   .transpose() *
                               g;
                         }
                       });
}

template <typename T>
Tensor<T> MatMulNT(const Tensor<T>& a, const Tensor<T>& b) {
  RequireRank(a.shape(), 2, "MatMulNT");
  RequireRank(b.shape(), 2, "MatMulNT");
  const int64_t m = a.rows(), k = a.cols(), n = b.rows();
  if (b.cols() != k) {
    throw ShapeError("MatMulNT: inner dimensions differ, " +
                     ShapeToString(a.shape()) + " x " +
                     ShapeToString(b.shape()) + "^T");
  }
  std::vector<T> out(static_cast<size_t>(m * n));
  Map<T>(out.data(), m, n).noalias() =
      MapC<T>(a.data().data(), m, k) *
      MapC<T>(b.data().data(), n, k).transpose();
  return MakeResult<T>({m, n}, std::move(out), {&a, &b},
                       [m, k, n](Node<T>& self) {
                         MapC<T> g(self.grad.data(), m, n);
                         if (T* ga = GradOf(self, 0)) {
                           Map<T>(ga, m, k).noalias() +=
                               g * MapC<T>(self.inputs[1]->value.data(), n, k);
                         }
                         if (T* gb = GradOf(self, 1)) {
                           Map<T>(gb, n, k).noalias() +=
                               g.transpose() *
                               MapC<T>(self.inputs[0]->value.data(), m, k);
                         }
                       });
}

template <typename T>
Tensor<T> Transpose(const Tensor<T>& x) {
  RequireRank(x.shape(), 2, "Transpose");
  const int64_t r = x.rows(), c = x.cols();
  std::vector<T> out(static_cast<size_t>(r * c));
  Map<T>(out.data(), c, r) = MapC<T>(x.data().data(), r, c).transpose();
  return MakeResult<T>({c, r}, std::move(out), {&x}, [r, c](Node<T>& self) {
    if (T* gx = GradOf(self, 0)) {
      Map<T>(gx, r, c) += MapC<T>(self.grad.data(), c, r).transpose();
    }
  });
}

template <typename T>
Tensor<T> Add(const Tensor<T>& a, const Tensor<T>& b) {
  RequireSameShape(a.shape(), b.shape(), "Add");
  std::vector<T> out(a.data().begin(), a.data().end());
  const auto bv = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return MakeResult<T>(a.shape(), std::move(out), {&a, &b},
                       [](Node<T>& self) {
                         for (size_t k = 0; k < 2; ++k) {
                           if (T* g = GradOf(self, k)) {
                             for (size_t i = 0; i < self.grad.size(); ++i) {
                               g[i] += self.grad[i];
                             }
                           }
                         }
                       });
}

template <typename T>
Tensor<T> Sub(const Tensor<T>& a, const Tensor<T>& b) {
  RequireSameShape(a.shape(), b.shape(), "Sub");
  std::vector<T> out(a.data().begin(), a.data().end());
  const auto bv = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return MakeResult<T>(a.shape(), std::move(out), {&a, &b},
                       [](Node<T>& self) {
                         if (T* g = GradOf(self, 0)) {
                           for (size_t i = 0; i < self.grad.size(); ++i) {
                             g[i] += self.grad[i];
                           }
                         }
                         if (T* g = GradOf(self, 1)) {
                           for (size_t i = 0; i < self.grad.size(); ++i) {
                             g[i] -= self.grad[i];
                           }
                         }
                       });
}

template <typename T>
Tensor<T> Mul(const Tensor<T>& a, const Tensor<T>& b) {
  RequireSameShape(a.shape(), b.shape(), "Mul");
  std::vector<T> out(a.data().begin(), a.data().end());
  const auto bv = b.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return MakeResult<T>(a.shape(), std::move(out), {&a, &b},
                       [](Node<T>& self) {
                         const auto& av = self.inputs[0]->value;
                         const auto& bv = self.inputs[1]->value;
                         if (T* g = GradOf(self, 0)) {
                           for (size_t i = 0; i < av.size(); ++i) {
                             g[i] += self.grad[i] * bv[i];
                           }
                         }
                         if (T* g = GradOf(self, 1)) {
                           for (size_t i = 0; i < av.size(); ++i) {
                             g[i] += self.grad[i] * av[i];
                           }
                         }
                       });
}

template <typename T>
Tensor<T> AddBias(const Tensor<T>& x, const Tensor<T>& bias) {
  RequireRank(bias.shape(), 1, "AddBias");
  const int64_t n = bias.dim(0);
  if (x.shape().back() != n) {
    throw ShapeError("AddBias: bias " + ShapeToString(bias.shape()) +
                     " does not match last axis of " +
                     ShapeToString(x.shape()));
  }
  std::vector<T> out(x.data().begin(), x.data().end());
  const auto bv = bias.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] += bv[i % n];
  return MakeResult<T>(x.shape(), std::move(out), {&x, &bias},
                       [n](Node<T>& self) {
                         if (T* g = GradOf(self, 0)) {
                           for (size_t i = 0; i < self.grad.size(); ++i) {
                             g[i] += self.grad[i];
                           }
                         }
                         if (T* g = GradOf(self, 1)) {
                           for (size_t i = 0; i < self.grad.size(); ++i) {
                             g[i % n] += self.grad[i];
                           }
                         }
                       });
}

template <typename T>
Tensor<T> Scale(const Tensor<T>& x, T factor) {
  std::vector<T> out(x.data().begin(), x.data().end());
  for (T& v : out) v *= factor;
  return MakeResult<T>(x.shape(), std::move(out), {&x},
                       [factor](Node<T>& self) {
                         if (T* g = GradOf(self, 0)) {
                           for (size_t i = 0; i < self.grad.size(); ++i) {
                             g[i] += self.grad[i] * factor;
                           }
                         }
                       });
}

template <typename T>
Tensor<T> Relu(const Tensor<T>& x) {
  return Elementwise(
      x, [](T v) { return v > T(0) ? v : T(0); },
      [](T v, T) { return v > T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> Sigmoid(const Tensor<T>& x) {
  return Elementwise(
      x, [](T v) { return StableSigmoid(v); },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> Swish(const Tensor<T>& x) {
  return Elementwise(
      x, [](T v) { return v * StableSigmoid(v); },
      [](T v, T) {
        const T s = StableSigmoid(v);
        return s + v * s * (T(1) - s);
      });
}

template <typename T>
Tensor<T> Glu(const Tensor<T>& x) {
  const int64_t width = x.shape().back();
  if (width % 2 != 0) {
    throw ShapeError("Glu: last axis must be even, got " +
                     ShapeToString(x.shape()));
  }
  const int64_t half = width / 2;
  const int64_t rows = x.numel() / width;
  Shape out_shape = x.shape();
  out_shape.back() = half;
  std::vector<T> out(static_cast<size_t>(rows * half));
  const auto xv = x.data();
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = 0; c < half; ++c) {
      out[r * half + c] =
          xv[r * width + c] * StableSigmoid(xv[r * width + half + c]);
    }
  }
  return MakeResult<T>(
      std::move(out_shape), std::move(out), {&x},
      [rows, half, width](Node<T>& self) {
        T* g = GradOf(self, 0);
        if (!g) return;
        const auto& xv = self.inputs[0]->value;
        for (int64_t r = 0; r < rows; ++r) {
          for (int64_t c = 0; c < half; ++c) {
            const T a = xv[r * width + c];
            const T s = StableSigmoid(xv[r * width + half + c]);
            const T dy = self.grad[r * half + c];
            g[r * width + c] += dy * s;
            g[r * width + half + c] += dy * a * s * (T(1) - s);
          }
        }
      });
}

template <typename T>
Tensor<T> Softmax(const Tensor<T>& x, int axis) {
  axis = NormalizeAxis(axis, x.shape().size(), "Softmax");
  const AxisSplit s = SplitAxis(x.shape(), axis);
  const auto xv = x.data();
  std::vector<T> out(xv.size());
  for (int64_t o = 0; o < s.outer; ++o) {
    for (int64_t in = 0; in < s.inner; ++in) {
      const int64_t base = o * s.n * s.inner + in;
      T mx = -std::numeric_limits<T>::infinity();
      for (int64_t i = 0; i < s.n; ++i) mx = std::max(mx, xv[base + i * s.inner]);
      T total = 0;
      for (int64_t i = 0; i < s.n; ++i) {
        const T e = std::exp(xv[base + i * s.inner] - mx);
        out[base + i * s.inner] = e;
        total += e;
      }
      for (int64_t i = 0; i < s.n; ++i) out[base + i * s.inner] /= total;
    }
  }
  return MakeResult<T>(x.shape(), std::move(out), {&x}, [s](Node<T>& self) {
    T* g = GradOf(self, 0);
    if (!g) return;
    const auto& y = self.value;
    for (int64_t o = 0; o < s.outer; ++o) {
      for (int64_t in = 0; in < s.inner; ++in) {
        const int64_t base = o * s.n * s.inner + in;
        T dot = 0;
        for (int64_t i = 0; i < s.n; ++i) {
          const int64_t k = base + i * s.inner;
          dot += self.grad[k] * y[k];
        }
        for (int64_t i = 0; i < s.n; ++i) {
          const int64_t k = base + i * s.inner;
          g[k] += y[k] * (self.grad[k] - dot);
        }
      }
    }
  });
}

template <typename T>
Tensor<T> LogSoftmax(const Tensor<T>& x, int axis) {
  axis = NormalizeAxis(axis, x.shape().size(), "LogSoftmax");
  const AxisSplit s = SplitAxis(x.shape(), axis);
  const auto xv = x.data();
  std::vector<T> out(xv.size());
  for (int64_t o = 0; o < s.outer; ++o) {
    for (int64_t in = 0; in < s.inner; ++in) {
      const int64_t base = o * s.n * s.inner + in;
      T mx = -std::numeric_limits<T>::infinity();
      for (int64_t i = 0; i < s.n; ++i) mx = std::max(mx, xv[base + i * s.inner]);
      T total = 0;
      for (int64_t i = 0; i < s.n; ++i) total += std::exp(xv[base + i * s.inner] - mx);
      const T lse = mx + std::log(total);
      for (int64_t i = 0; i < s.n; ++i) {
        out[base + i * s.inner] = xv[base + i * s.inner] - lse;
      }
    }
  }
  return MakeResult<T>(x.shape(), std::move(out), {&x}, [s](Node<T>& self) {
    T* g = GradOf(self, 0);
    if (!g) return;
    const auto& y = self.value;
    for (int64_t o = 0; o < s.outer; ++o) {
      for (int64_t in = 0; in < s.inner; ++in) {
        const int64_t base = o * s.n * s.inner + in;
        T total = 0;
        for (int64_t i = 0; i < s.n; ++i) total += self.grad[base + i * s.inner];
        for (int64_t i = 0; i < s.n; ++i) {
          const int64_t k = base + i * s.inner;
          g[k] += self.grad[k] - std::exp(y[k]) * total;
        }
      }
    }
  });
}

template <typename T>
Tensor<T> LayerNorm(const Tensor<T>& x, const Tensor<T>& gamma,
                    const Tensor<T>& beta, double eps) {
  const int64_t n = x.shape().back();
  if (gamma.shape() != Shape{n} || beta.shape() != Shape{n}) {
    throw ShapeError("LayerNorm: gamma/beta must be [" + std::to_string(n) +
                     "], got " + ShapeToString(gamma.shape()) + " and " +
                     ShapeToString(beta.shape()));
  }
  const int64_t rows = x.numel() / n;
  const auto xv = x.data();
  const auto gv = gamma.data();
  const auto bv = beta.data();
  auto xhat = std::make_shared<std::vector<T>>(xv.size());
  auto inv_std = std::make_shared<std::vector<T>>(static_cast<size_t>(rows));
  std::vector<T> out(xv.size());
  for (int64_t r = 0; r < rows; ++r) {
    const T* row = xv.data() + r * n;
    T mean = 0;
    for (int64_t i = 0; i < n; ++i) mean += row[i];
    mean /= T(n);
    T var = 0;
    for (int64_t i = 0; i < n; ++i) var += (row[i] - mean) * (row[i] - mean);
    var /= T(n);
    const T inv = T(1) / std::sqrt(var + T(eps));
    (*inv_std)[r] = inv;
    for (int64_t i = 0; i < n; ++i) {
      const T h = (row[i] - mean) * inv;
      (*xhat)[r * n + i] = h;
      out[r * n + i] = h * gv[i] + bv[i];
    }
  }
  return MakeResult<T>(
      x.shape(), std::move(out), {&x, &gamma, &beta},
      [rows, n, xhat, inv_std](Node<T>& self) {
        const auto& gv = self.inputs[1]->value;
        T* gx = GradOf(self, 0);
        T* gg = GradOf(self, 1);
        T* gb = GradOf(self, 2);
        for (int64_t r = 0; r < rows; ++r) {
          const T* dy = self.grad.data() + r * n;
          const T* h = xhat->data() + r * n;
          if (gg || gb) {
            for (int64_t i = 0; i < n; ++i) {
              if (gg) gg[i] += dy[i] * h[i];
              if (gb) gb[i] += dy[i];
            }
          }
          if (gx) {
            T mean_dh = 0, mean_dh_h = 0;
            for (int64_t i = 0; i < n; ++i) {
              const T dh = dy[i] * gv[i];
              mean_dh += dh;
              mean_dh_h += dh * h[i];
            }
            mean_dh /= T(n);
            mean_dh_h /= T(n);
            const T inv = (*inv_std)[r];
            for (int64_t i = 0; i < n; ++i) {
              const T dh = dy[i] * gv[i];
              gx[r * n + i] += inv * (dh - mean_dh - h[i] * mean_dh_h);
            }
          }
        }
      });
}

template <typename T>
Tensor<T> Conv1dDepthwise(const Tensor<T>& x, const Tensor<T>& weight,
                          const Tensor<T>& bias) {
  RequireRank(x.shape(), 2, "Conv1dDepthwise");
  RequireRank(weight.shape(), 2, "Conv1dDepthwise");
  const int64_t len = x.rows(), ch = x.cols(), k = weight.cols();
  if (weight.rows() != ch || bias.shape() != Shape{ch} || k % 2 == 0) {
    throw ShapeError("Conv1dDepthwise: input " + ShapeToString(x.shape()) +
                     ", weight " + ShapeToString(weight.shape()) + ", bias " +
                     ShapeToString(bias.shape()) +
                     " (weight must be [C x K] with odd K)");
  }
  const int64_t pad = (k - 1) / 2;
  const auto xv = x.data();
  const auto wv = weight.data();
  const auto bv = bias.data();
  std::vector<T> out(xv.size());
  for (int64_t t = 0; t < len; ++t) {
    for (int64_t c = 0; c < ch; ++c) {
      T acc = bv[c];
      for (int64_t j = 0; j < k; ++j) {
        const int64_t src = t + j - pad;
        if (src >= 0 && src < len) acc += wv[c * k + j] * xv[src * ch + c];
      }
      out[t * ch + c] = acc;
    }
  }
  return MakeResult<T>(
      x.shape(), std::move(out), {&x, &weight, &bias},
      [len, ch, k, pad](Node<T>& self) {
        const auto& xv = self.inputs[0]->value;
        const auto& wv = self.inputs[1]->value;
        T* gx = GradOf(self, 0);
        T* gw = GradOf(self, 1);
        T* gb = GradOf(self, 2);
        for (int64_t t = 0; t < len; ++t) {
          for (int64_t c = 0; c < ch; ++c) {
            const T dy = self.grad[t * ch + c];
            if (gb) gb[c] += dy;
            for (int64_t j = 0; j < k; ++j) {
              const int64_t src = t + j - pad;
              if (src < 0 || src >= len) continue;
              if (gw) gw[c * k + j] += dy * xv[src * ch + c];
              if (gx) gx[src * ch + c] += dy * wv[c * k + j];
            }
          }
        }
      });
}

template <typename T>
Tensor<T> Conv1dPointwise(const Tensor<T>& x, const Tensor<T>& weight,
                          const Tensor<T>& bias) {
  return AddBias(MatMulNT(x, weight), bias);
}

template <typename T>
Tensor<T> Conv2d(const Tensor<T>& x, const Tensor<T>& weight,
                 const Tensor<T>& bias, int stride, int padding) {
  RequireRank(x.shape(), 3, "Conv2d");
  RequireRank(weight.shape(), 4, "Conv2d");
  const int64_t cin = x.dim(0), h = x.dim(1), w = x.dim(2);
  const int64_t cout = weight.dim(0), kh = weight.dim(2), kw = weight.dim(3);
  if (weight.dim(1) != cin || bias.shape() != Shape{cout}) {
    throw ShapeError("Conv2d: input " + ShapeToString(x.shape()) +
                     ", weight " + ShapeToString(weight.shape()) + ", bias " +
                     ShapeToString(bias.shape()));
  }
  if (stride < 1 || padding < 0) throw ShapeError("Conv2d: bad stride/padding");
  const int64_t ho = (h + 2 * padding - kh) / stride + 1;
  const int64_t wo = (w + 2 * padding - kw) / stride + 1;
  if (ho <= 0 || wo <= 0) {
    throw ShapeError("Conv2d: input " + ShapeToString(x.shape()) +
                     " too small for kernel " + ShapeToString(weight.shape()));
  }
  const int64_t patch = cin * kh * kw;
  const int64_t positions = ho * wo;
  // im2col: cols[patch x positions]
  auto cols = std::make_shared<std::vector<T>>(
      static_cast<size_t>(patch * positions), T(0));
  const auto xv = x.data();
  for (int64_t ci = 0; ci < cin; ++ci) {
    for (int64_t a = 0; a < kh; ++a) {
      for (int64_t b = 0; b < kw; ++b) {
        T* row = cols->data() + ((ci * kh + a) * kw + b) * positions;
        for (int64_t oy = 0; oy < ho; ++oy) {
          const int64_t iy = oy * stride - padding + a;
          if (iy < 0 || iy >= h) continue;
          for (int64_t ox = 0; ox < wo; ++ox) {
            const int64_t ix = ox * stride - padding + b;
            if (ix < 0 || ix >= w) continue;
            row[oy * wo + ox] = xv[(ci * h + iy) * w + ix];
          }
        }
      }
    }
  }
  std::vector<T> out(static_cast<size_t>(cout * positions));
  Map<T> om(out.data(), cout, positions);
  om.noalias() = MapC<T>(weight.data().data(), cout, patch) *
                 MapC<T>(cols->data(), patch, positions);
  const auto bv = bias.data();
  for (int64_t co = 0; co < cout; ++co) om.row(co).array() += bv[co];
  const int p = padding, s = stride;
  return MakeResult<T>(
      {cout, ho, wo}, std::move(out), {&x, &weight, &bias},
      [=](Node<T>& self) {
        MapC<T> g(self.grad.data(), cout, positions);
        if (T* gb = GradOf(self, 2)) {
          for (int64_t co = 0; co < cout; ++co) gb[co] += g.row(co).sum();
        }
        if (T* gw = GradOf(self, 1)) {
          Map<T>(gw, cout, patch).noalias() +=
              g * MapC<T>(cols->data(), patch, positions).transpose();
        }
        if (T* gx = GradOf(self, 0)) {
          RowMat<T> dcols =
              MapC<T>(self.inputs[1]->value.data(), cout, patch).transpose() *
              g;
          for (int64_t ci = 0; ci < cin; ++ci) {
            for (int64_t a = 0; a < kh; ++a) {
              for (int64_t b = 0; b < kw; ++b) {
                const T* row = dcols.data() + ((ci * kh + a) * kw + b) * positions;
                for (int64_t oy = 0; oy < ho; ++oy) {
                  const int64_t iy = oy * s - p + a;
                  if (iy < 0 || iy >= h) continue;
                  for (int64_t ox = 0; ox < wo; ++ox) {
                    const int64_t ix = ox * s - p + b;
                    if (ix < 0 || ix >= w) continue;
                    gx[(ci * h + iy) * w + ix] += row[oy * wo + ox];
                  }
                }
              }
            }
          }
        }
      });
}

template <typename T>
Tensor<T> Embedding(const Tensor<T>& table, std::span<const int> ids) {
  RequireRank(table.shape(), 2, "Embedding");
  const int64_t vocab = table.rows(), d = table.cols();
  if (ids.empty()) throw ShapeError("Embedding: empty id sequence");
  auto idx = std::make_shared<std::vector<int>>(ids.begin(), ids.end());
  std::vector<T> out(static_cast<size_t>(ids.size() * d));
  const auto tv = table.data();
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= vocab) {
      throw std::out_of_range("Embedding: id " + std::to_string(ids[i]) +
                              " at position " + std::to_string(i) +
                              " outside vocabulary of " + std::to_string(vocab));
    }
    std::copy_n(tv.data() + ids[i] * d, d, out.data() + i * d);
  }
  return MakeResult<T>({static_cast<int64_t>(ids.size()), d}, std::move(out),
                       {&table}, [idx, d](Node<T>& self) {
                         T* g = GradOf(self, 0);
                         if (!g) return;
                         for (size_t i = 0; i < idx->size(); ++i) {
                           const T* src = self.grad.data() + i * d;
                           T* dst = g + (*idx)[i] * d;
                           for (int64_t j = 0; j < d; ++j) dst[j] += src[j];
                         }
                       });
}

template <typename T>
Tensor<T> CrossEntropy(const Tensor<T>& logits, std::span<const int> targets,
                       std::span<const uint8_t> mask) {
  RequireRank(logits.shape(), 2, "CrossEntropy");
  const int64_t n = logits.rows(), vocab = logits.cols();
  if (static_cast<int64_t>(targets.size()) != n ||
      static_cast<int64_t>(mask.size()) != n) {
    throw ShapeError("CrossEntropy: logits " + ShapeToString(logits.shape()) +
                     " with " + std::to_string(targets.size()) +
                     " targets and " + std::to_string(mask.size()) +
                     " mask entries");
  }
  int64_t count = 0;
  for (int64_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    if (targets[i] < 0 || targets[i] >= vocab) {
      throw std::out_of_range("CrossEntropy: target " +
                              std::to_string(targets[i]) + " at row " +
                              std::to_string(i));
    }
    ++count;
  }
  const auto lv = logits.data();
  auto probs = std::make_shared<std::vector<T>>(lv.size(), T(0));
  T total = 0;
  for (int64_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const T* row = lv.data() + i * vocab;
    T mx = *std::max_element(row, row + vocab);
    T z = 0;
    for (int64_t j = 0; j < vocab; ++j) z += std::exp(row[j] - mx);
    const T lse = mx + std::log(z);
    total += lse - row[targets[i]];
    for (int64_t j = 0; j < vocab; ++j) {
      (*probs)[i * vocab + j] = std::exp(row[j] - lse);
    }
  }
  const T loss = count > 0 ? total / T(count) : T(0);
  auto tgt = std::make_shared<std::vector<int>>(targets.begin(), targets.end());
  auto msk = std::make_shared<std::vector<uint8_t>>(mask.begin(), mask.end());
  return MakeResult<T>(
      {1}, {loss}, {&logits}, [=](Node<T>& self) {
        T* g = GradOf(self, 0);
        if (!g || count == 0) return;
        const T scale = self.grad[0] / T(count);
        for (int64_t i = 0; i < n; ++i) {
          if (!(*msk)[i]) continue;
          for (int64_t j = 0; j < vocab; ++j) {
            g[i * vocab + j] += scale * (*probs)[i * vocab + j];
          }
          g[i * vocab + (*tgt)[i]] -= scale;
        }
      });
}

template <typename T>
Tensor<T> Dropout(const Tensor<T>& x, double p, Rng& rng) {
  if (p <= 0.0) return x;
  if (p >= 1.0) throw std::invalid_argument("Dropout: p must be < 1");
  const T keep_scale = T(1.0 / (1.0 - p));
  auto factor = std::make_shared<std::vector<T>>(static_cast<size_t>(x.numel()));
  std::vector<T> out(x.data().begin(), x.data().end());
  for (size_t i = 0; i < out.size(); ++i) {
    (*factor)[i] = rng.Bernoulli(p) ? T(0) : keep_scale;
    out[i] *= (*factor)[i];
  }
  return MakeResult<T>(x.shape(), std::move(out), {&x},
                       [factor](Node<T>& self) {
                         if (T* g = GradOf(self, 0)) {
                           for (size_t i = 0; i < self.grad.size(); ++i) {
                             g[i] += self.grad[i] * (*factor)[i];
                           }
                         }
                       });
}

template <typename T>
Tensor<T> MaskedFill(const Tensor<T>& x, std::span<const uint8_t> mask,
                     T value) {
  if (static_cast<int64_t>(mask.size()) != x.numel()) {
    throw ShapeError("MaskedFill: mask of " + std::to_string(mask.size()) +
                     " entries for " + ShapeToString(x.shape()));
  }
  std::vector<T> out(x.data().begin(), x.data().end());
  for (size_t i = 0; i < out.size(); ++i) {
    if (mask[i]) out[i] = value;
  }
  auto m = std::make_shared<std::vector<uint8_t>>(mask.begin(), mask.end());
  return MakeResult<T>(x.shape(), std::move(out), {&x}, [m](Node<T>& self) {
    if (T* g = GradOf(self, 0)) {
      for (size_t i = 0; i < self.grad.size(); ++i) {
        if (!(*m)[i]) g[i] += self.grad[i];
      }
    }
  });
}

template <typename T>
Tensor<T> SliceRows(const Tensor<T>& x, int64_t start, int64_t length) {
  const int64_t rows = x.dim(0);
  if (start < 0 || length <= 0 || start + length > rows) {
    throw ShapeError("SliceRows: [" + std::to_string(start) + ", " +
                     std::to_string(start + length) + ") outside " +
                     ShapeToString(x.shape()));
  }
  const int64_t stride = x.numel() / rows;
  Shape shape = x.shape();
  shape[0] = length;
  std::vector<T> out(x.data().begin() + start * stride,
                     x.data().begin() + (start + length) * stride);
  return MakeResult<T>(std::move(shape), std::move(out), {&x},
                       [start, stride](Node<T>& self) {
                         if (T* g = GradOf(self, 0)) {
                           T* dst = g + start * stride;
                           for (size_t i = 0; i < self.grad.size(); ++i) {
                             dst[i] += self.grad[i];
                           }
                         }
                       });
}

template <typename T>
Tensor<T> ConcatRows(std::span<const Tensor<T>> parts) {
  if (parts.empty()) throw ShapeError("ConcatRows: no inputs");
  Shape shape = parts[0].shape();
  int64_t rows = 0;
  std::vector<T> out;
  for (const auto& p : parts) {
    Shape tail(p.shape().begin() + 1, p.shape().end());
    if (p.rank() != static_cast<int64_t>(shape.size()) ||
        tail != Shape(shape.begin() + 1, shape.end())) {
      throw ShapeError("ConcatRows: " + ShapeToString(p.shape()) +
                       " incompatible with " + ShapeToString(shape));
    }
    rows += p.dim(0);
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  shape[0] = rows;
  return MakeResultN<T>(std::move(shape), std::move(out), parts,
                        [](Node<T>& self) {
                          size_t offset = 0;
                          for (size_t k = 0; k < self.inputs.size(); ++k) {
                            const size_t n = self.inputs[k]->value.size();
                            if (T* g = GradOf(self, k)) {
                              for (size_t i = 0; i < n; ++i) {
                                g[i] += self.grad[offset + i];
                              }
                            }
                            offset += n;
                          }
                        });
}

template <typename T>
Tensor<T> SliceCols(const Tensor<T>& x, int64_t start, int64_t length) {
  RequireRank(x.shape(), 2, "SliceCols");
  const int64_t rows = x.rows(), cols = x.cols();
  if (start < 0 || length <= 0 || start + length > cols) {
    throw ShapeError("SliceCols: [" + std::to_string(start) + ", " +
                     std::to_string(start + length) + ") outside " +
                     ShapeToString(x.shape()));
  }
  std::vector<T> out(static_cast<size_t>(rows * length));
  const auto xv = x.data();
  for (int64_t r = 0; r < rows; ++r) {
    std::copy_n(xv.data() + r * cols + start, length, out.data() + r * length);
  }
  return MakeResult<T>({rows, length}, std::move(out), {&x},
                       [rows, cols, start, length](Node<T>& self) {
                         if (T* g = GradOf(self, 0)) {
                           for (int64_t r = 0; r < rows; ++r) {
                             for (int64_t c = 0; c < length; ++c) {
                               g[r * cols + start + c] +=
                                   self.grad[r * length + c];
                             }
                           }
                         }
                       });
}

template <typename T>
Tensor<T> ConcatCols(std::span<const Tensor<T>> parts) {
  if (parts.empty()) throw ShapeError("ConcatCols: no inputs");
  const int64_t rows = parts[0].dim(0);
  std::vector<int64_t> widths;
  int64_t total = 0;
  for (const auto& p : parts) {
    RequireRank(p.shape(), 2, "ConcatCols");
    if (p.rows() != rows) {
      throw ShapeError("ConcatCols: row count " + std::to_string(p.rows()) +
                       " differs from " + std::to_string(rows));
    }
    widths.push_back(p.cols());
    total += p.cols();
  }
  std::vector<T> out(static_cast<size_t>(rows * total));
  int64_t offset = 0;
  for (size_t k = 0; k < parts.size(); ++k) {
    const auto pv = parts[k].data();
    for (int64_t r = 0; r < rows; ++r) {
      std::copy_n(pv.data() + r * widths[k], widths[k],
                  out.data() + r * total + offset);
    }
    offset += widths[k];
  }
  return MakeResultN<T>({rows, total}, std::move(out), parts,
                        [rows, total, widths](Node<T>& self) {
                          int64_t offset = 0;
                          for (size_t k = 0; k < widths.size(); ++k) {
                            if (T* g = GradOf(self, k)) {
                              for (int64_t r = 0; r < rows; ++r) {
                                for (int64_t c = 0; c < widths[k]; ++c) {
                                  g[r * widths[k] + c] +=
                                      self.grad[r * total + offset + c];
                                }
                              }
                            }
                            offset += widths[k];
                          }
                        });
}

template <typename T>
Tensor<T> Reshape(const Tensor<T>& x, Shape shape) {
  if (NumElements(shape) != x.numel()) {
    throw ShapeError("Reshape: " + ShapeToString(x.shape()) + " to " +
                     ShapeToString(shape));
  }
  std::vector<T> out(x.data().begin(), x.data().end());
  return MakeResult<T>(std::move(shape), std::move(out), {&x},
                       [](Node<T>& self) {
                         if (T* g = GradOf(self, 0)) {
                           for (size_t i = 0; i < self.grad.size(); ++i) {
                             g[i] += self.grad[i];
                           }
                         }
                       });
}

template <typename T>
Tensor<T> SwapLeadingAxes(const Tensor<T>& x) {
  RequireRank(x.shape(), 3, "SwapLeadingAxes");
  const int64_t a = x.dim(0), b = x.dim(1), c = x.dim(2);
  std::vector<T> out(static_cast<size_t>(x.numel()));
  const auto xv = x.data();
  for (int64_t i = 0; i < a; ++i) {
    for (int64_t j = 0; j < b; ++j) {
      std::copy_n(xv.data() + (i * b + j) * c, c, out.data() + (j * a + i) * c);
    }
  }
  return MakeResult<T>({b, a, c}, std::move(out), {&x}, [a, b, c](Node<T>& self) {
    if (T* g = GradOf(self, 0)) {
      for (int64_t i = 0; i < a; ++i) {
        for (int64_t j = 0; j < b; ++j) {
          const T* src = self.grad.data() + (j * a + i) * c;
          T* dst = g + (i * b + j) * c;
          for (int64_t k = 0; k < c; ++k) dst[k] += src[k];
        }
      }
    }
  });
}

template <typename T>
Tensor<T> GatherRelative(const Tensor<T>& scores, int64_t max_distance) {
  RequireRank(scores.shape(), 2, "GatherRelative");
  const int64_t len = scores.rows(), width = scores.cols();
  if (max_distance < 0 || width != 2 * max_distance + 1) {
    throw ShapeError("GatherRelative: expected " +
                     std::to_string(2 * max_distance + 1) + " columns, got " +
                     ShapeToString(scores.shape()));
  }
  auto column = [max_distance](int64_t i, int64_t j) {
    return std::clamp(i - j, -max_distance, max_distance) + max_distance;
  };
  std::vector<T> out(static_cast<size_t>(len * len));
  const auto sv = scores.data();
  for (int64_t i = 0; i < len; ++i) {
    for (int64_t j = 0; j < len; ++j) {
      out[i * len + j] = sv[i * width + column(i, j)];
    }
  }
  return MakeResult<T>({len, len}, std::move(out), {&scores},
                       [len, width, column](Node<T>& self) {
                         if (T* g = GradOf(self, 0)) {
                           for (int64_t i = 0; i < len; ++i) {
                             for (int64_t j = 0; j < len; ++j) {
                               g[i * width + column(i, j)] +=
                                   self.grad[i * len + j];
                             }
                           }
                         }
                       });
}

template <typename T>
Tensor<T> Sum(const Tensor<T>& x) {
  T total = 0;
  for (T v : x.data()) total += v;
  return MakeResult<T>({1}, {total}, {&x}, [](Node<T>& self) {
    if (T* g = GradOf(self, 0)) {
      const size_t n = self.inputs[0]->value.size();
      for (size_t i = 0; i < n; ++i) g[i] += self.grad[0];
    }
  });
}

template <typename T>
Tensor<T> Mean(const Tensor<T>& x) {
  return Scale(Sum(x), T(1) / T(x.numel()));
}

#define DESKASR_INSTANTIATE_OPS(T)                                            \
  template Tensor<T> MatMul(const Tensor<T>&, const Tensor<T>&);              \
  template Tensor<T> MatMulNT(const Tensor<T>&, const Tensor<T>&);            \
  template Tensor<T> Transpose(const Tensor<T>&);                             \
  template Tensor<T> Add(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> Sub(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> Mul(const Tensor<T>&, const Tensor<T>&);                 \
  template Tensor<T> AddBias(const Tensor<T>&, const Tensor<T>&);             \
  template Tensor<T> Scale(const Tensor<T>&, T);                              \
  template Tensor<T> Relu(const Tensor<T>&);                                  \
  template Tensor<T> Sigmoid(const Tensor<T>&);                               \
  template Tensor<T> Swish(const Tensor<T>&);                                 \
  template Tensor<T> Glu(const Tensor<T>&);                                   \
  template Tensor<T> Softmax(const Tensor<T>&, int);                          \
  template Tensor<T> LogSoftmax(const Tensor<T>&, int);                       \
  template Tensor<T> LayerNorm(const Tensor<T>&, const Tensor<T>&,            \
                               const Tensor<T>&, double);                     \
  template Tensor<T> Conv1dDepthwise(const Tensor<T>&, const Tensor<T>&,      \
                                     const Tensor<T>&);                       \
  template Tensor<T> Conv1dPointwise(const Tensor<T>&, const Tensor<T>&,      \
                                     const Tensor<T>&);                       \
  template Tensor<T> Conv2d(const Tensor<T>&, const Tensor<T>&,               \
                            const Tensor<T>&, int, int);                      \
  template Tensor<T> Embedding(const Tensor<T>&, std::span<const int>);       \
  template Tensor<T> CrossEntropy(const Tensor<T>&, std::span<const int>,     \
                                  std::span<const uint8_t>);                  \
  template Tensor<T> Dropout(const Tensor<T>&, double, Rng&);                 \
  template Tensor<T> MaskedFill(const Tensor<T>&, std::span<const uint8_t>,   \
                                T);                                           \
  template Tensor<T> SliceRows(const Tensor<T>&, int64_t, int64_t);           \
  template Tensor<T> ConcatRows(std::span<const Tensor<T>>);                  \
  template Tensor<T> SliceCols(const Tensor<T>&, int64_t, int64_t);           \
  template Tensor<T> ConcatCols(std::span<const Tensor<T>>);                  \
  template Tensor<T> Reshape(const Tensor<T>&, Shape);                        \
  template Tensor<T> SwapLeadingAxes(const Tensor<T>&);                       \
  template Tensor<T> GatherRelative(const Tensor<T>&, int64_t);               \
  template Tensor<T> Sum(const Tensor<T>&);                                   \
  template Tensor<T> Mean(const Tensor<T>&);

DESKASR_INSTANTIATE_OPS(float)
DESKASR_INSTANTIATE_OPS(double)

#undef DESKASR_INSTANTIATE_OPS

}  // namespace deskasr::numerics
