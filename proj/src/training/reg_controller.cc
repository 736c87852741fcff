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

#include "training/reg_controller.h"

#include <stdexcept>
#include <string>

namespace deskasr::training {

std::vector<RegStage> DefaultStages() {
  RegStage none;
  none.index = 0;
  none.dropout_p = 0.0;
  none.specaugment.enabled = false;

  RegStage light;
  light.index = 1;
  light.dropout_p = 0.1;
  light.specaugment = {true, 1, 5, 1, 25, 0.2};

  RegStage full;
  full.index = 2;
  full.dropout_p = 0.2;
  full.specaugment = {true, 2, 10, 2, 50, 0.2};
  return {none, light, full};
}

namespace {

int Strength(const frontend::SpecAugmentPolicy& p, bool freq) {
  if (!p.enabled) return 0;
  return freq ? p.num_freq_masks * p.max_freq_width
              : p.num_time_masks * p.max_time_width;
}

}  // namespace

RegController::RegController(std::vector<RegStage> stages, int patience)
    : stages_(std::move(stages)) {
  if (stages_.empty()) throw std::invalid_argument("no regularization stages");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  for (size_t i = 0; i < stages_.size(); ++i) {
    stages_[i].specaugment.Validate();
    if (stages_[i].dropout_p < 0.0 || stages_[i].dropout_p >= 1.0) {
      throw std::invalid_argument("stage dropout out of [0, 1)");
    }
    if (i == 0) continue;
    const RegStage& a = stages_[i - 1];
    const RegStage& b = stages_[i];
    if (b.dropout_p < a.dropout_p ||
        Strength(b.specaugment, true) < Strength(a.specaugment, true) ||
        Strength(b.specaugment, false) < Strength(a.specaugment, false)) {
      throw std::invalid_argument("stage " + std::to_string(i) +
                                  " is weaker than the stage before it");
    }
  }
  state_.patience = patience;
}

bool RegController::Update(double validation_loss) {
  if (validation_loss < state_.best_validation_loss) {
    state_.best_validation_loss = validation_loss;
    state_.evals_since_improvement = 0;
    return false;
  }
  if (++state_.evals_since_improvement < state_.patience) return false;
  state_.evals_since_improvement = 0;
  if (at_final_stage()) return false;
  ++state_.current_stage;
  return true;
}

void RegController::set_state(const RegScheduleState& s) {
  if (s.current_stage < 0 ||
      s.current_stage >= static_cast<int>(stages_.size()) || s.patience < 1) {
    throw std::invalid_argument("regularization state out of range");
  }
  state_ = s;
}

}  // namespace deskasr::training
