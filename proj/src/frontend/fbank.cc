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

#include "frontend/fbank.h"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace deskasr::frontend {

namespace {

constexpr int kNumBins = kFftSize / 2 + 1;

// FFTW planning is not thread-safe; execution with new-array is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  RealFft() {
    in_ = fftw_alloc_real(kFftSize);
    out_ = fftw_alloc_complex(kNumBins);
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan_ = fftw_plan_dft_r2c_1d(kFftSize, in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(PlannerMutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }
  void Execute() { fftw_execute(plan_); }
  double Power(int k) const {
    return out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
  }

 private:
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

const std::vector<double>& HammingWindow() {
  static const std::vector<double> w = [] {
    std::vector<double> v(kFrameLength);
    for (int i = 0; i < kFrameLength; ++i) {
      v[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i /
                                    (kFrameLength - 1));
    }
    return v;
  }();
  return w;
}

}  // namespace

double HzToMel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

std::vector<double> MelCenterFrequencies() {
  const double lo = HzToMel(kLowFreq);
  const double step = (HzToMel(kHighFreq) - lo) / (kNumMelBins + 1);
  std::vector<double> centers(kNumMelBins);
  for (int m = 0; m < kNumMelBins; ++m) {
    centers[m] = MelToHz(lo + (m + 1) * step);
  }
  return centers;
}

const std::vector<std::vector<double>>& MelFilterbank() {
  static const std::vector<std::vector<double>> bank = [] {
    const double lo = HzToMel(kLowFreq);
    const double step = (HzToMel(kHighFreq) - lo) / (kNumMelBins + 1);
    std::vector<std::vector<double>> b(kNumMelBins,
                                       std::vector<double>(kNumBins, 0.0));
    for (int m = 0; m < kNumMelBins; ++m) {
      const double left = lo + m * step;
      const double center = left + step;
      const double right = center + step;
      for (int k = 0; k < kNumBins; ++k) {
        const double mel =
            HzToMel(static_cast<double>(k) * kSampleRate / kFftSize);
        if (mel > left && mel < right) {
          b[m][k] = mel <= center ? (mel - left) / step : (right - mel) / step;
        }
      }
    }
    return b;
  }();
  return bank;
}

FeatureMatrix ComputeFbank(const Waveform& wave) {
  if (wave.sample_rate != kSampleRate) {
    throw AudioError("expected 16000 Hz audio, got " +
                     std::to_string(wave.sample_rate) + " Hz");
  }
  const int64_t n = static_cast<int64_t>(wave.samples.size());
  if (n < kFrameLength) {
    throw AudioError("audio shorter than one window (" + std::to_string(n) +
                     " < 400 samples)");
  }
  const auto& window = HammingWindow();
  const auto& bank = MelFilterbank();
  FeatureMatrix out;
  out.num_frames = NumFrames(n);
  out.values.resize(static_cast<size_t>(out.num_frames * kNumMelBins));
  RealFft fft;
  std::vector<double> power(kNumBins);
  for (int64_t t = 0; t < out.num_frames; ++t) {
    double* in = fft.input();
    const double* frame = wave.samples.data() + t * kFrameShift;
    for (int i = 0; i < kFrameLength; ++i) in[i] = frame[i] * window[i];
    for (int i = kFrameLength; i < kFftSize; ++i) in[i] = 0.0;
    fft.Execute();
    for (int k = 0; k < kNumBins; ++k) power[k] = fft.Power(k);
    auto row = out.row(t);
    for (int m = 0; m < kNumMelBins; ++m) {
      double e = 0.0;
      for (int k = 0; k < kNumBins; ++k) e += bank[m][k] * power[k];
      row[m] = std::log(e + kLogFloor);
    }
  }
  return out;
}

}  // namespace deskasr::frontend
