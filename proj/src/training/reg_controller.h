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

#ifndef DESKASR_TRAINING_REG_CONTROLLER_H_
#define DESKASR_TRAINING_REG_CONTROLLER_H_

#include <limits>
#include <vector>

#include "frontend/spec_augment.h"

namespace deskasr::training {

struct RegStage {
  int index = 0;
  double dropout_p = 0.0;
  frontend::SpecAugmentPolicy specaugment;
};

// No regularization, then light, then full dropout and SpecAugment.
std::vector<RegStage> DefaultStages();

struct RegScheduleState {
  int current_stage = 0;
  double best_validation_loss = std::numeric_limits<double>::infinity();
  int evals_since_improvement = 0;
  int patience = 2;
};

// Starts without regularization and moves one stage up each time the
// validation loss has not improved for `patience` consecutive evaluations.
class RegController {
 public:
  RegController() : RegController(DefaultStages(), 2) {}
  RegController(std::vector<RegStage> stages, int patience);

  // Returns true when this evaluation advanced the stage.
  bool Update(double validation_loss);

  const RegStage& current() const {
    return stages_[static_cast<size_t>(state_.current_stage)];
  }
  bool at_final_stage() const {
    return state_.current_stage + 1 == static_cast<int>(stages_.size());
  }
  const std::vector<RegStage>& stages() const { return stages_; }
  const RegScheduleState& state() const { return state_; }
  void set_state(const RegScheduleState& s);

 private:
  std::vector<RegStage> stages_;
  RegScheduleState state_;
};

}  // namespace deskasr::training

#endif  // DESKASR_TRAINING_REG_CONTROLLER_H_
