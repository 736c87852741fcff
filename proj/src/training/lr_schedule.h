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

#ifndef DESKASR_TRAINING_LR_SCHEDULE_H_
#define DESKASR_TRAINING_LR_SCHEDULE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace deskasr::training {

// Linear warmup to the peak, then inverse-square-root decay. The peak
// shrinks as 1/sqrt(d_model / ref_d_model) for wider models.
struct LrSchedule {
  double base_peak = 1e-3;
  int64_t warmup_steps = 100;
  int64_t ref_d_model = 64;
  int64_t d_model = 64;

  void Validate() const {
    if (!(base_peak > 0.0) || warmup_steps < 1 || ref_d_model < 1 ||
        d_model < 1) {
      throw std::invalid_argument("lr schedule: all values must be positive");
    }
  }
  double Peak() const {
    return base_peak / std::sqrt(static_cast<double>(d_model) /
                                 static_cast<double>(ref_d_model));
  }
  double Rate(int64_t step) const {
    if (step <= 0) return 0.0;
    const double s = static_cast<double>(step);
    const double w = static_cast<double>(warmup_steps);
    return Peak() * std::min(s / w, std::sqrt(w / s));
  }
};

}  // namespace deskasr::training

#endif  // DESKASR_TRAINING_LR_SCHEDULE_H_
