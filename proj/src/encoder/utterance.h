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

#ifndef DESKASR_ENCODER_UTTERANCE_H_
#define DESKASR_ENCODER_UTTERANCE_H_

#include <vector>

#include "numerics/tensor.h"

namespace deskasr::encoder {

// Acoustic features [frames x 80] and target ids without sos/eos.
template <typename T>
struct Utterance {
  numerics::Tensor<T> features;
  std::vector<int> targets;
};

}  // namespace deskasr::encoder

#endif  // DESKASR_ENCODER_UTTERANCE_H_
