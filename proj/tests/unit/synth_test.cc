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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>

#include "frontend/manifest.h"
#include "frontend/wav.h"
#include "support/test_support.h"

namespace deskasr::synth {
namespace {

// Frequency bin (in step_hz units above base_hz) with the largest DFT
// magnitude over [begin, begin + len).
size_t DominantToken(const SynthSpec& spec, const std::vector<double>& x,
                     size_t begin, size_t len) {
  size_t best = 0;
  double best_mag = -1.0;
  for (size_t t = 0; t < spec.tokens.size(); ++t) {
    const double f = spec.FrequencyOf(t);
    double re = 0.0, im = 0.0;
    for (size_t i = 0; i < len; ++i) {
      const double ph = 2.0 * std::numbers::pi * f * static_cast<double>(i) /
                        frontend::kSampleRate;
      re += x[begin + i] * std::cos(ph);
      im -= x[begin + i] * std::sin(ph);
    }
    const double mag = std::hypot(re, im);
    if (mag > best_mag) {
      best_mag = mag;
      best = t;
    }
  }
  return best;
}

TEST(SynthTest, SingleTokenDurationIsOneSegment) {
  SynthSpec spec;
  const frontend::Waveform w = Synthesize(spec, {3}, 7);
  EXPECT_EQ(w.samples.size(), static_cast<size_t>(spec.segment_samples()));
  EXPECT_EQ(spec.segment_samples(), 1600);
  EXPECT_NEAR(w.duration_seconds(), 0.1, 1e-12);
}

TEST(SynthTest, LengthIsTokenCountTimesSegment) {
  SynthSpec spec;
  for (int64_t i = 0; i < 30; ++i) {
    const SynthUtterance u = GenerateUtterance(spec, i);
    EXPECT_GE(u.token_indices.size(), static_cast<size_t>(spec.min_tokens));
    EXPECT_LE(u.token_indices.size(), static_cast<size_t>(spec.max_tokens));
    EXPECT_EQ(u.wave.samples.size(),
              u.token_indices.size() * spec.segment_samples());
    std::string expect;
    for (size_t t : u.token_indices) expect += spec.tokens[t];
    EXPECT_EQ(u.transcript, expect);
  }
}

TEST(SynthTest, SameSeedIsBitIdentical) {
  SynthSpec spec;
  spec.noise_stddev = 0.05;
  const auto a = GenerateCorpus(spec, 8);
  const auto b = GenerateCorpus(spec, 8);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].utt_id, b[i].utt_id);
    EXPECT_EQ(a[i].transcript, b[i].transcript);
    EXPECT_EQ(a[i].wave.samples, b[i].wave.samples);
  }
  spec.seed = 2;
  const auto c = GenerateCorpus(spec, 8);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) {
    differs |= a[i].wave.samples != c[i].wave.samples;
  }
  EXPECT_TRUE(differs);
}

TEST(SynthTest, WrittenWavsRegenerateIdentically) {
  SynthSpec spec;
  spec.noise_stddev = 0.02;
  const std::string d1 = testsupport::TempDir("synth_a");
  const std::string d2 = testsupport::TempDir("synth_b");
  const auto e1 = WriteCorpus(spec, 5, d1);
  const auto e2 = WriteCorpus(spec, 5, d2);
  ASSERT_EQ(e1.size(), 5u);
  for (size_t i = 0; i < e1.size(); ++i) {
    EXPECT_EQ(testsupport::ReadFile(d1 + "/" + e1[i].wav_path),
              testsupport::ReadFile(d2 + "/" + e2[i].wav_path));
  }
}

TEST(SynthTest, TokenToFrequencyIsInjective) {
  SynthSpec spec;
  std::set<double> freqs;
  for (size_t t = 0; t < spec.tokens.size(); ++t) {
    freqs.insert(spec.FrequencyOf(t));
  }
  EXPECT_EQ(freqs.size(), spec.tokens.size());
  EXPECT_LT(*freqs.rbegin(), frontend::kSampleRate / 2.0);
}

TEST(SynthTest, EachSegmentCarriesItsTokenTone) {
  SynthSpec spec;
  const int tone = spec.tone_ms * frontend::kSampleRate / 1000;
  for (int64_t i = 0; i < 10; ++i) {
    const SynthUtterance u = GenerateUtterance(spec, i);
    for (size_t k = 0; k < u.token_indices.size(); ++k) {
      EXPECT_EQ(DominantToken(spec, u.wave.samples, k * spec.segment_samples(),
                              static_cast<size_t>(tone)),
                u.token_indices[k]);
    }
  }
}

TEST(SynthTest, ManifestRoundTripsThroughReader) {
  SynthSpec spec;
  const std::string dir = testsupport::TempDir("synth_manifest");
  const auto entries = WriteCorpus(spec, 4, dir);
  const auto back = frontend::ReadManifest(dir + "/manifest.tsv");
  ASSERT_EQ(back.size(), entries.size());
  for (size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].utt_id, entries[i].utt_id);
    EXPECT_EQ(back[i].transcript, entries[i].transcript);
    const frontend::Waveform w = frontend::ReadWav(back[i].wav_path);
    EXPECT_EQ(w.sample_rate, frontend::kSampleRate);
    EXPECT_EQ(w.samples.size() % spec.segment_samples(), 0u);
  }
}

TEST(SynthTest, RejectsInvalidSpecs) {
  SynthSpec dup;
  dup.tokens = {"a", "a"};
  EXPECT_THROW(dup.Validate(), std::invalid_argument);
  SynthSpec nyquist;
  nyquist.step_hz = 1000.0;
  EXPECT_THROW(nyquist.Validate(), std::invalid_argument);
  SynthSpec lengths;
  lengths.min_tokens = 4;
  lengths.max_tokens = 3;
  EXPECT_THROW(lengths.Validate(), std::invalid_argument);
  EXPECT_THROW(GenerateCorpus(SynthSpec{}, 0), std::invalid_argument);
  EXPECT_THROW(Synthesize(SynthSpec{}, {20}, 1), std::out_of_range);
}

}  // namespace
}  // namespace deskasr::synth
