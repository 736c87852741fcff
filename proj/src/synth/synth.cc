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

#include "synth/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <set>
#include <stdexcept>

#include "numerics/rng.h"

namespace deskasr::synth {

namespace {

constexpr uint64_t kNoiseTag = 0x4e4f495345ULL;
constexpr int kFadeSamples = 80;  // 5 ms raised-cosine edges

}  // namespace

std::vector<std::string> SynthSpec::DefaultTokens() {
  return {"的", "一", "是", "在", "不", "了", "有", "和", "人", "这",
          "中", "大", "为", "上", "个", "国", "我", "以", "要", "他"};
}

int SynthSpec::segment_samples() const {
  return (tone_ms + gap_ms) * frontend::kSampleRate / 1000;
}

double SynthSpec::FrequencyOf(size_t token) const {
  return base_hz + static_cast<double>(token) * step_hz;
}

void SynthSpec::Validate() const {
  if (tokens.empty()) throw std::invalid_argument("synth: empty token list");
  if (std::set<std::string>(tokens.begin(), tokens.end()).size() !=
      tokens.size()) {
    throw std::invalid_argument("synth: duplicate tokens");
  }
  if (!(step_hz > 0.0) || !(base_hz > 0.0)) {
    throw std::invalid_argument("synth: tone frequencies must be positive");
  }
  if (FrequencyOf(tokens.size() - 1) >= frontend::kSampleRate / 2.0) {
    throw std::invalid_argument("synth: highest tone exceeds Nyquist");
  }
  if (tone_ms <= 0 || gap_ms < 0) {
    throw std::invalid_argument("synth: invalid segment timing");
  }
  if (min_tokens < 1 || max_tokens < min_tokens) {
    throw std::invalid_argument("synth: invalid utterance length range");
  }
  if (segment_samples() * min_tokens < 400) {
    throw std::invalid_argument("synth: utterances shorter than one window");
  }
  if (noise_stddev < 0.0 || amplitude <= 0.0 || amplitude > 1.0) {
    throw std::invalid_argument("synth: invalid amplitude or noise level");
  }
}

frontend::Waveform Synthesize(const SynthSpec& spec,
                              const std::vector<size_t>& tokens,
                              uint64_t noise_seed) {
  const int seg = spec.segment_samples();
  const int tone = spec.tone_ms * frontend::kSampleRate / 1000;
  frontend::Waveform w;
  w.samples.assign(tokens.size() * static_cast<size_t>(seg), 0.0);
  for (size_t k = 0; k < tokens.size(); ++k) {
    if (tokens[k] >= spec.tokens.size()) {
      throw std::out_of_range("synth: token index out of range");
    }
    const double f = spec.FrequencyOf(tokens[k]);
    double* out = w.samples.data() + k * static_cast<size_t>(seg);
    for (int i = 0; i < tone; ++i) {
      double env = 1.0;
      const int edge = std::min(i, tone - 1 - i);
      if (edge < kFadeSamples) {
        env = 0.5 - 0.5 * std::cos(std::numbers::pi * edge / kFadeSamples);
      }
      out[i] = spec.amplitude * env *
               std::sin(2.0 * std::numbers::pi * f * i / frontend::kSampleRate);
    }
  }
  if (spec.noise_stddev > 0.0) {
    numerics::Rng rng(noise_seed);
    for (double& s : w.samples) {
      s = std::clamp(s + rng.Normal(0.0, spec.noise_stddev), -1.0, 1.0);
    }
  }
  return w;
}

SynthUtterance GenerateUtterance(const SynthSpec& spec, int64_t index) {
  spec.Validate();
  numerics::Rng rng(
      numerics::Rng::DeriveSeed(spec.seed, static_cast<uint64_t>(index)));
  SynthUtterance u;
  char id[32];
  std::snprintf(id, sizeof(id), "synth%05lld", static_cast<long long>(index));
  u.utt_id = id;
  const auto len = rng.UniformInt(spec.min_tokens, spec.max_tokens);
  for (int64_t i = 0; i < len; ++i) {
    const auto t = static_cast<size_t>(
        rng.UniformInt(0, static_cast<int64_t>(spec.tokens.size()) - 1));
    u.token_indices.push_back(t);
    u.transcript += spec.tokens[t];
  }
  u.wave = Synthesize(spec, u.token_indices,
                      numerics::Rng::DeriveSeed(rng.NextU64(), kNoiseTag));
  return u;
}

std::vector<SynthUtterance> GenerateCorpus(const SynthSpec& spec, int64_t n) {
  if (n < 1) throw std::invalid_argument("synth: corpus size must be >= 1");
  std::vector<SynthUtterance> out;
  out.reserve(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) out.push_back(GenerateUtterance(spec, i));
  return out;
}

std::vector<frontend::ManifestEntry> WriteCorpus(const SynthSpec& spec,
                                                 int64_t n,
                                                 const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "wav");
  std::vector<frontend::ManifestEntry> entries;
  for (const SynthUtterance& u : GenerateCorpus(spec, n)) {
    const std::string rel = "wav/" + u.utt_id + ".wav";
    frontend::WriteWav((fs::path(dir) / rel).string(), u.wave);
    entries.push_back({u.utt_id, rel, u.transcript});
  }
  frontend::WriteManifest((fs::path(dir) / "manifest.tsv").string(), entries);
  return entries;
}

}  // namespace deskasr::synth
