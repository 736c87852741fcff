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

#ifndef DESKASR_FRONTEND_SPEC_AUGMENT_H_
#define DESKASR_FRONTEND_SPEC_AUGMENT_H_

#include "frontend/fbank.h"
#include "numerics/rng.h"

namespace deskasr::frontend {

struct SpecAugmentPolicy {
  bool enabled = false;
  int num_freq_masks = 2;
  int max_freq_width = 10;  // F
  int num_time_masks = 2;
  int max_time_width = 50;  // T_mask
  double max_time_ratio = 0.2;

  void Validate() const;
  // Upper bound on the number of cells one call may zero.
  int64_t MaxMaskedCells(int64_t num_frames) const;
};

// Masked cells are set to 0, the corpus mean after CMVN.
FeatureMatrix SpecAugment(const FeatureMatrix& f, const SpecAugmentPolicy& p,
                          numerics::Rng& rng);

}  // namespace deskasr::frontend

#endif  // DESKASR_FRONTEND_SPEC_AUGMENT_H_
