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

#include "frontend/spec_augment.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace deskasr::frontend {

void SpecAugmentPolicy::Validate() const {
  if (num_freq_masks < 0 || num_time_masks < 0 || max_freq_width < 0 ||
      max_time_width < 0) {
    throw std::invalid_argument("SpecAugment counts and widths must be >= 0");
  }
  if (max_freq_width > kNumMelBins) {
    throw std::invalid_argument("SpecAugment frequency width exceeds 80");
  }
  if (max_time_ratio < 0.0 || max_time_ratio > 1.0) {
    throw std::invalid_argument("SpecAugment time ratio must be in [0, 1]");
  }
}

int64_t SpecAugmentPolicy::MaxMaskedCells(int64_t num_frames) const {
  return static_cast<int64_t>(num_freq_masks) * max_freq_width * num_frames +
         static_cast<int64_t>(num_time_masks) * max_time_width * kNumMelBins;
}

FeatureMatrix SpecAugment(const FeatureMatrix& f, const SpecAugmentPolicy& p,
                          numerics::Rng& rng) {
  p.Validate();
  FeatureMatrix out = f;
  if (!p.enabled) return out;
  const int64_t frames = f.num_frames;
  for (int i = 0; i < p.num_freq_masks && p.max_freq_width > 0; ++i) {
    const int width = static_cast<int>(rng.UniformInt(0, p.max_freq_width));
    const int start =
        static_cast<int>(rng.UniformInt(0, kNumMelBins - width));
    for (int64_t t = 0; t < frames; ++t) {
      auto row = out.row(t);
      for (int d = start; d < start + width; ++d) row[d] = 0.0;
    }
  }
  const int64_t cap = std::min<int64_t>(
      p.max_time_width,
      static_cast<int64_t>(std::floor(p.max_time_ratio * frames)));
  for (int i = 0; i < p.num_time_masks && cap > 0; ++i) {
    const int64_t width = rng.UniformInt(0, cap);
    const int64_t start = rng.UniformInt(0, frames - width);
    for (int64_t t = start; t < start + width; ++t) {
      auto row = out.row(t);
      std::fill(row.begin(), row.end(), 0.0);
    }
  }
  return out;
}

}  // namespace deskasr::frontend
