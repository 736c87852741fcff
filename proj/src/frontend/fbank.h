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

#ifndef DESKASR_FRONTEND_FBANK_H_
#define DESKASR_FRONTEND_FBANK_H_

#include <cstdint>
#include <span>
#include <vector>

#include "frontend/wav.h"

namespace deskasr::frontend {

inline constexpr int kNumMelBins = 80;
inline constexpr int kFrameLength = 400;  // 25 ms
inline constexpr int kFrameShift = 160;   // 10 ms
inline constexpr int kFftSize = 512;
inline constexpr double kLowFreq = 0.0;
inline constexpr double kHighFreq = 8000.0;
inline constexpr double kLogFloor = 1e-10;

// Row-major [num_frames x 80].
struct FeatureMatrix {
  int64_t num_frames = 0;
  std::vector<double> values;

  static constexpr int dim() { return kNumMelBins; }
  std::span<const double> row(int64_t t) const {
    return {values.data() + t * kNumMelBins, static_cast<size_t>(kNumMelBins)};
  }
  std::span<double> row(int64_t t) {
    return {values.data() + t * kNumMelBins, static_cast<size_t>(kNumMelBins)};
  }
};

// 1 + floor((N - 400) / 160); zero when the audio is shorter than a window.
constexpr int64_t NumFrames(int64_t num_samples) {
  return num_samples < kFrameLength
             ? 0
             : 1 + (num_samples - kFrameLength) / kFrameShift;
}

double HzToMel(double hz);
double MelToHz(double mel);
// Peak frequency of each triangular filter.
std::vector<double> MelCenterFrequencies();
// [80 x (kFftSize/2 + 1)] filter weights over FFT bins.
const std::vector<std::vector<double>>& MelFilterbank();

FeatureMatrix ComputeFbank(const Waveform& wave);

}  // namespace deskasr::frontend

#endif  // DESKASR_FRONTEND_FBANK_H_
