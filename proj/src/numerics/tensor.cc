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

#include "numerics/tensor.h"

#include <sstream>
#include <unordered_set>

namespace deskasr::numerics {

int64_t NumElements(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {
thread_local bool g_grad_enabled = true;

void CheckShape(const Shape& shape) {
  for (int64_t d : shape) {
    if (d <= 0) {
      throw ShapeError("tensor dimensions must be positive, got " +
                       ShapeToString(shape));
    }
  }
}
}  // namespace

bool GradEnabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <typename T>
Tensor<T> Tensor<T>::Zeros(Shape shape, bool requires_grad) {
  return Full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::Full(Shape shape, T fill, bool requires_grad) {
  CheckShape(shape);
  auto node = std::make_shared<Node<T>>();
  node->value.assign(static_cast<size_t>(NumElements(shape)), fill);
  node->shape = std::move(shape);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

template <typename T>
Tensor<T> Tensor<T>::FromData(Shape shape, std::vector<T> data,
                              bool requires_grad) {
  CheckShape(shape);
  if (NumElements(shape) != static_cast<int64_t>(data.size())) {
    throw ShapeError("shape " + ShapeToString(shape) + " needs " +
                     std::to_string(NumElements(shape)) + " values, got " +
                     std::to_string(data.size()));
  }
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(data);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

template <typename T>
int64_t Tensor<T>::dim(int axis) const {
  const int r = static_cast<int>(node_->shape.size());
  if (axis < 0) axis += r;
  if (axis < 0 || axis >= r) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for " +
                     ShapeToString(node_->shape));
  }
  return node_->shape[static_cast<size_t>(axis)];
}

template <typename T>
T Tensor<T>::item() const {
  if (node_->value.size() != 1) {
    throw ShapeError("item() on tensor of shape " +
                     ShapeToString(node_->shape));
  }
  return node_->value[0];
}

template <typename T>
void Tensor<T>::Backward() const {
  if (node_->value.size() != 1) {
    throw ShapeError("Backward() needs a single-element tensor, got " +
                     ShapeToString(node_->shape));
  }
  // Iterative post-order DFS; reversed, it is a valid reverse topological
  // order for the sweep.
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> visited;
  std::vector<std::pair<Node<T>*, size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->inputs.size()) {
      Node<T>* child = n->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  node_->EnsureGrad()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
}

template <typename T>
Tensor<T> Tensor<T>::Detach() const {
  return FromData(node_->shape, node_->value, false);
}

template <typename T>
Tensor<T> Tensor<T>::Clone(bool requires_grad) const {
  return FromData(node_->shape, node_->value, requires_grad);
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace deskasr::numerics
