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

#include "training/optimizer.h"

#include <cmath>
#include <stdexcept>

#include "training/numerical_error.h"

namespace deskasr::training {

void AdamConfig::Validate() const {
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("adam: betas must lie in (0, 1)");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("adam: eps must be > 0");
}

template <typename T>
Adam<T>::Adam(nn::ParameterList<T> params, const AdamConfig& cfg)
    : cfg_(cfg) {
  cfg_.Validate();
  for (auto& p : params) {
    if (p.tensor.requires_grad()) params_.push_back(std::move(p));
  }
  for (const auto& p : params_) {
    state_.m.emplace_back(static_cast<size_t>(p.tensor.numel()), 0.0);
    state_.v.emplace_back(static_cast<size_t>(p.tensor.numel()), 0.0);
  }
}

template <typename T>
double Adam<T>::GradNorm() const {
  double sq = 0.0;
  for (const auto& p : params_) {
    for (T g : p.tensor.grad()) sq += static_cast<double>(g) * g;
  }
  return std::sqrt(sq);
}

template <typename T>
double Adam<T>::Step(double lr) {
  const double norm = GradNorm();
  if (!std::isfinite(norm)) {
    throw NumericalError("non-finite gradient norm",
                         "optimizer step " + std::to_string(state_.steps + 1));
  }
  const double clip =
      cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm ? cfg_.clip_norm / norm
                                                    : 1.0;
  ++state_.steps;
  const double t = static_cast<double>(state_.steps);
  const double c1 = 1.0 - std::pow(cfg_.beta1, t);
  const double c2 = 1.0 - std::pow(cfg_.beta2, t);
  for (size_t i = 0; i < params_.size(); ++i) {
    numerics::Tensor<T>& w = params_[i].tensor;
    const auto grad = w.grad();
    if (grad.empty()) continue;  // no gradient reached this parameter
    auto data = w.mutable_data();
    auto& m = state_.m[i];
    auto& v = state_.v[i];
    for (size_t k = 0; k < data.size(); ++k) {
      const double g = static_cast<double>(grad[k]) * clip;
      m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g;
      v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g * g;
      const double update = lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + cfg_.eps);
      data[k] = static_cast<T>(static_cast<double>(data[k]) - update);
    }
  }
  return norm;
}

template <typename T>
void Adam<T>::ZeroGrad() {
  for (auto& p : params_) p.tensor.ZeroGrad();
}

template <typename T>
void Adam<T>::set_state(AdamState s) {
  if (s.m.size() != params_.size() || s.v.size() != params_.size()) {
    throw std::invalid_argument("adam: state does not match parameters");
  }
  for (size_t i = 0; i < params_.size(); ++i) {
    const auto n = static_cast<size_t>(params_[i].tensor.numel());
    if (s.m[i].size() != n || s.v[i].size() != n) {
      throw std::invalid_argument("adam: state size mismatch for " +
                                  params_[i].name);
    }
  }
  state_ = std::move(s);
}

template class Adam<float>;
template class Adam<double>;

}  // namespace deskasr::training
