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

#ifndef DESKASR_TRAINING_OPTIMIZER_H_
#define DESKASR_TRAINING_OPTIMIZER_H_

#include <cstdint>
#include <vector>

#include "nn/parameter.h"

namespace deskasr::training {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
  double clip_norm = 5.0;  // <= 0 disables clipping

  void Validate() const;
};

struct AdamState {
  int64_t steps = 0;
  std::vector<std::vector<double>> m;  // first moments, parameter order
  std::vector<std::vector<double>> v;  // second moments
};

// Adam over the parameters that record gradients; frozen ones are skipped.
template <typename T>
class Adam {
 public:
  Adam() = default;
  Adam(nn::ParameterList<T> params, const AdamConfig& cfg);

  // Global gradient L2 norm before clipping.
  double GradNorm() const;
  // Clips to `clip_norm`, applies one update, returns the pre-clip norm.
  // Throws NumericalError when the gradient is not finite.
  double Step(double lr);
  void ZeroGrad();

  const AdamState& state() const { return state_; }
  void set_state(AdamState s);
  const nn::ParameterList<T>& params() const { return params_; }

 private:
  nn::ParameterList<T> params_;
  AdamConfig cfg_;
  AdamState state_;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace deskasr::training

#endif  // DESKASR_TRAINING_OPTIMIZER_H_
