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

#ifndef DESKASR_FRONTEND_WAV_H_
#define DESKASR_FRONTEND_WAV_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace deskasr::frontend {

inline constexpr int kSampleRate = 16000;

struct Waveform {
  std::vector<double> samples;  // mono PCM in [-1, 1]
  int sample_rate = kSampleRate;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

class AudioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class WavEncoding { kPcm16, kFloat32 };

// Accepts RIFF/WAVE with one channel at 16 kHz, either 16-bit integer PCM or
// 32-bit IEEE float samples. Anything else throws AudioError.
Waveform ReadWav(const std::string& path);
Waveform ParseWav(const std::string& bytes, const std::string& origin = "");

void WriteWav(const std::string& path, const Waveform& wave,
              WavEncoding encoding = WavEncoding::kPcm16);
std::string SerializeWav(const Waveform& wave, WavEncoding encoding);

}  // namespace deskasr::frontend

#endif  // DESKASR_FRONTEND_WAV_H_
