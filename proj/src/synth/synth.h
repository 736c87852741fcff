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

#ifndef DESKASR_SYNTH_SYNTH_H_
#define DESKASR_SYNTH_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "frontend/manifest.h"
#include "frontend/wav.h"

namespace deskasr::synth {

// Token inventory and tone coding of the synthetic corpus.
struct SynthSpec {
  std::vector<std::string> tokens = DefaultTokens();
  double base_hz = 300.0;
  double step_hz = 150.0;  // token k sounds at base_hz + k * step_hz
  int tone_ms = 80;
  int gap_ms = 20;
  double amplitude = 0.5;
  double noise_stddev = 0.0;
  int min_tokens = 2;
  int max_tokens = 6;
  uint64_t seed = 1;

  static std::vector<std::string> DefaultTokens();
  int segment_samples() const;  // tone plus gap
  double FrequencyOf(size_t token) const;
  void Validate() const;
};

struct SynthUtterance {
  std::string utt_id;
  std::vector<size_t> token_indices;
  std::string transcript;
  frontend::Waveform wave;
};

// Tone segments for the given token sequence, plus the configured noise drawn
// from `noise_seed`.
frontend::Waveform Synthesize(const SynthSpec& spec,
                              const std::vector<size_t>& tokens,
                              uint64_t noise_seed);

// Utterance i depends only on (spec.seed, i).
SynthUtterance GenerateUtterance(const SynthSpec& spec, int64_t index);
std::vector<SynthUtterance> GenerateCorpus(const SynthSpec& spec, int64_t n);

// Writes <dir>/wav/<id>.wav (16-bit PCM) and <dir>/manifest.tsv; returns
// the manifest entries.
std::vector<frontend::ManifestEntry> WriteCorpus(const SynthSpec& spec,
                                                 int64_t n,
                                                 const std::string& dir);

}  // namespace deskasr::synth

#endif  // DESKASR_SYNTH_SYNTH_H_
