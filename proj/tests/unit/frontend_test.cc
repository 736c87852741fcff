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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "frontend/cmvn.h"
#include "frontend/fbank.h"
#include "frontend/manifest.h"
#include "frontend/spec_augment.h"
#include "frontend/wav.h"
#include "numerics/rng.h"
#include "support/test_support.h"

namespace deskasr::frontend {
namespace {

using numerics::Rng;

Waveform Sine(double hz, int64_t n, double amp = 0.5) {
  Waveform w;
  w.samples.resize(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    w.samples[static_cast<size_t>(i)] =
        amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / 16000.0);
  }
  return w;
}

Waveform Noise(int64_t n, uint64_t seed) {
  Rng rng(seed);
  Waveform w;
  w.samples.resize(static_cast<size_t>(n));
  for (double& s : w.samples) s = rng.Uniform(-0.5, 0.5);
  return w;
}

// Independent feature extractor: direct DFT, no FFT library.
std::vector<double> ReferenceFrame(const Waveform& w, int64_t t) {
  const int n_fft = 512;
  std::vector<double> x(n_fft, 0.0);
  for (int i = 0; i < 400; ++i) {
    const double win =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / 399.0);
    x[static_cast<size_t>(i)] = w.samples[static_cast<size_t>(t * 160 + i)] * win;
  }
  std::vector<double> power(n_fft / 2 + 1);
  for (int k = 0; k <= n_fft / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (int i = 0; i < n_fft; ++i) {
      const double a = -2.0 * std::numbers::pi * k * i / n_fft;
      re += x[static_cast<size_t>(i)] * std::cos(a);
      im += x[static_cast<size_t>(i)] * std::sin(a);
    }
    power[static_cast<size_t>(k)] = re * re + im * im;
  }
  const auto mel = [](double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); };
  const double top = mel(8000.0);
  std::vector<double> out(80);
  for (int m = 0; m < 80; ++m) {
    const double l = top * m / 81.0, c = top * (m + 1) / 81.0,
                 r = top * (m + 2) / 81.0;
    double e = 0.0;
    for (int k = 0; k <= n_fft / 2; ++k) {
      const double f = mel(k * 16000.0 / n_fft);
      double wgt = 0.0;
      if (f > l && f <= c) wgt = (f - l) / (c - l);
      if (f > c && f < r) wgt = (r - f) / (r - c);
      e += wgt * power[static_cast<size_t>(k)];
    }
    out[static_cast<size_t>(m)] = std::log(e + 1e-10);
  }
  return out;
}

TEST(Fbank, OneSecondGives98Frames) {
  const Waveform w = Noise(16000, 1);
  const FeatureMatrix f = ComputeFbank(w);
  EXPECT_EQ(f.num_frames, 98);
  EXPECT_EQ(f.values.size(), 98u * 80u);
  EXPECT_EQ(FeatureMatrix::dim(), 80);
}

TEST(Fbank, MatchesDirectDftReference) {
  const Waveform w = Noise(16000, 2);
  const FeatureMatrix f = ComputeFbank(w);
  for (int64_t t : {0, 37, 97}) {
    const auto ref = ReferenceFrame(w, t);
    for (int m = 0; m < 80; ++m) {
      EXPECT_NEAR(f.row(t)[static_cast<size_t>(m)], ref[static_cast<size_t>(m)],
                  1e-6)
          << "frame " << t << " bin " << m;
    }
  }
}

TEST(Fbank, FrameCountFormulaProperty) {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int64_t n = rng.UniformInt(400, 6000);
    Waveform w = Noise(n, static_cast<uint64_t>(trial));
    EXPECT_EQ(ComputeFbank(w).num_frames, 1 + (n - 400) / 160) << n;
    EXPECT_EQ(NumFrames(n), 1 + (n - 400) / 160);
  }
}

TEST(Fbank, SilenceGivesIdenticalFloorFrames) {
  Waveform w;
  w.samples.assign(4000, 0.0);
  const FeatureMatrix f = ComputeFbank(w);
  for (int64_t t = 0; t < f.num_frames; ++t) {
    for (int m = 0; m < 80; ++m) {
      EXPECT_EQ(f.row(t)[static_cast<size_t>(m)], std::log(1e-10));
    }
  }
}

TEST(Fbank, Sine440PeaksInNearestFilter) {
  const auto centers = MelCenterFrequencies();
  size_t nearest = 0;
  for (size_t m = 1; m < centers.size(); ++m) {
    if (std::abs(centers[m] - 440.0) < std::abs(centers[nearest] - 440.0)) {
      nearest = m;
    }
  }
  const FeatureMatrix f = ComputeFbank(Sine(440.0, 16000));
  for (int64_t t = 0; t < f.num_frames; ++t) {
    const auto row = f.row(t);
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    ASSERT_EQ(static_cast<size_t>(best), nearest) << "frame " << t;
  }
}

TEST(Fbank, RejectsShortAudioAndWrongRate) {
  Waveform w = Noise(399, 1);
  try {
    ComputeFbank(w);
    FAIL();
  } catch (const AudioError& e) {
    EXPECT_NE(std::string(e.what()).find("audio shorter than one window"),
              std::string::npos);
  }
  Waveform w8 = Noise(8000, 1);
  w8.sample_rate = 8000;
  EXPECT_THROW(ComputeFbank(w8), AudioError);
}

TEST(Fbank, FilterbankSpansZeroTo8k) {
  const auto centers = MelCenterFrequencies();
  ASSERT_EQ(centers.size(), 80u);
  EXPECT_GT(centers.front(), 0.0);
  EXPECT_LT(centers.back(), 8000.0);
  for (size_t i = 1; i < centers.size(); ++i) EXPECT_GT(centers[i], centers[i - 1]);
  EXPECT_NEAR(MelToHz(HzToMel(1234.5)), 1234.5, 1e-9);
}

FeatureMatrix RandomFeatures(int64_t frames, Rng& rng, double scale = 3.0) {
  FeatureMatrix f;
  f.num_frames = frames;
  f.values.resize(static_cast<size_t>(frames * 80));
  for (double& v : f.values) v = rng.Uniform(-scale, scale) + 2.0;
  return f;
}

TEST(Cmvn, IdenticalFramesGiveFloorVariance) {
  FeatureMatrix f;
  f.num_frames = 5;
  for (int t = 0; t < 5; ++t) {
    for (int m = 0; m < 80; ++m) f.values.push_back(m * 0.5);
  }
  const std::vector<FeatureMatrix> corpus = {f};
  const CmvnStats s = FitCmvn(corpus);
  for (int m = 0; m < 80; ++m) {
    EXPECT_DOUBLE_EQ(s.mean[static_cast<size_t>(m)], m * 0.5);
    EXPECT_EQ(s.variance[static_cast<size_t>(m)], kVarianceFloor);
  }
}

TEST(Cmvn, TwoFramesHandArithmetic) {
  FeatureMatrix f;
  f.num_frames = 2;
  f.values.assign(80, 0.0);
  f.values.insert(f.values.end(), 80, 2.0);
  const std::vector<FeatureMatrix> corpus = {f};
  const CmvnStats s = FitCmvn(corpus);
  EXPECT_EQ(s.frame_count, 2);
  for (int m = 0; m < 80; ++m) {
    EXPECT_DOUBLE_EQ(s.mean[static_cast<size_t>(m)], 1.0);
    EXPECT_DOUBLE_EQ(s.variance[static_cast<size_t>(m)], 1.0);
  }
}

TEST(Cmvn, MatchesTwoPassOracle) {
  Rng rng(4);
  std::vector<FeatureMatrix> corpus;
  for (int i = 0; i < 4; ++i) corpus.push_back(RandomFeatures(rng.UniformInt(3, 30), rng));
  const CmvnStats s = FitCmvn(corpus);
  for (int m = 0; m < 80; ++m) {
    double sum = 0.0, n = 0.0;
    for (const auto& f : corpus) {
      for (int64_t t = 0; t < f.num_frames; ++t) {
        sum += f.row(t)[static_cast<size_t>(m)];
        n += 1.0;
      }
    }
    const double mean = sum / n;
    double var = 0.0;
    for (const auto& f : corpus) {
      for (int64_t t = 0; t < f.num_frames; ++t) {
        var += std::pow(f.row(t)[static_cast<size_t>(m)] - mean, 2);
      }
    }
    var /= n;
    EXPECT_NEAR(s.mean[static_cast<size_t>(m)], mean, 1e-6);
    EXPECT_NEAR(s.variance[static_cast<size_t>(m)], var, 1e-6);
  }
}

TEST(Cmvn, EmptyCorpusIsError) {
  const std::vector<FeatureMatrix> corpus;
  EXPECT_THROW(FitCmvn(corpus), std::invalid_argument);
}

TEST(Cmvn, ApplyProperties) {
  Rng rng(5);
  std::vector<FeatureMatrix> corpus;
  for (int i = 0; i < 3; ++i) corpus.push_back(RandomFeatures(40, rng));
  const CmvnStats s = FitCmvn(corpus);

  FeatureMatrix at_mean;
  at_mean.num_frames = 1;
  at_mean.values = s.mean;
  for (double v : ApplyCmvn(at_mean, s).values) EXPECT_NEAR(v, 0.0, 1e-12);

  const FeatureMatrix same = ApplyCmvn(corpus[0], CmvnStats::Identity());
  EXPECT_EQ(same.values, corpus[0].values);

  std::vector<FeatureMatrix> normalized;
  for (const auto& f : corpus) normalized.push_back(ApplyCmvn(f, s));
  const CmvnStats after = FitCmvn(normalized);
  for (int m = 0; m < 80; ++m) {
    EXPECT_LT(std::abs(after.mean[static_cast<size_t>(m)]), 1e-5);
    EXPECT_NEAR(after.variance[static_cast<size_t>(m)], 1.0, 1e-3);
  }
  const FeatureMatrix back = InvertCmvn(normalized[1], s);
  for (size_t i = 0; i < back.values.size(); ++i) {
    EXPECT_NEAR(back.values[i], corpus[1].values[i], 1e-5);
  }
}

TEST(Cmvn, TextRoundTripIsExact) {
  Rng rng(6);
  const std::vector<FeatureMatrix> corpus = {RandomFeatures(17, rng)};
  const CmvnStats s = FitCmvn(corpus);
  const std::string text = SerializeCmvn(s);
  const CmvnStats back = ParseCmvn(text);
  EXPECT_EQ(back.mean, s.mean);
  EXPECT_EQ(back.variance, s.variance);
  EXPECT_EQ(back.frame_count, s.frame_count);
  // 80 means, 80 variances and the frame count, one per line.
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 161);
}

TEST(SpecAugment, DisabledIsIdentity) {
  Rng rng(7);
  const FeatureMatrix f = RandomFeatures(100, rng);
  SpecAugmentPolicy p;
  p.enabled = false;
  EXPECT_EQ(SpecAugment(f, p, rng).values, f.values);
}

TEST(SpecAugment, ZeroWidthsAreIdentity) {
  Rng rng(8);
  const FeatureMatrix f = RandomFeatures(100, rng);
  SpecAugmentPolicy p;
  p.enabled = true;
  p.max_freq_width = 0;
  p.max_time_width = 0;
  EXPECT_EQ(SpecAugment(f, p, rng).values, f.values);
}

TEST(SpecAugment, FixedSeedIsReproducible) {
  Rng data(9);
  const FeatureMatrix f = RandomFeatures(120, data);
  SpecAugmentPolicy p;
  p.enabled = true;
  Rng a(10), b(10);
  EXPECT_EQ(SpecAugment(f, p, a).values, SpecAugment(f, p, b).values);
}

TEST(SpecAugment, MaskedCellsWithinBoundProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const FeatureMatrix f = RandomFeatures(rng.UniformInt(1, 300), rng);
    SpecAugmentPolicy p;
    p.enabled = true;
    p.num_freq_masks = static_cast<int>(rng.UniformInt(0, 3));
    p.max_freq_width = static_cast<int>(rng.UniformInt(0, 27));
    p.num_time_masks = static_cast<int>(rng.UniformInt(0, 3));
    p.max_time_width = static_cast<int>(rng.UniformInt(0, 80));
    const FeatureMatrix g = SpecAugment(f, p, rng);
    int64_t changed = 0;
    for (size_t i = 0; i < f.values.size(); ++i) {
      if (g.values[i] != f.values[i]) {
        ++changed;
        EXPECT_EQ(g.values[i], 0.0);
      }
    }
    const int64_t bound = p.num_freq_masks * p.max_freq_width * f.num_frames +
                          p.num_time_masks * p.max_time_width * 80;
    EXPECT_LE(changed, bound);
    EXPECT_LE(changed, p.MaxMaskedCells(f.num_frames));
  }
}

TEST(SpecAugment, RejectsInvalidPolicy) {
  SpecAugmentPolicy p;
  p.max_freq_width = 81;
  EXPECT_THROW(p.Validate(), std::invalid_argument);
  p.max_freq_width = -1;
  EXPECT_THROW(p.Validate(), std::invalid_argument);
}

TEST(Wav, Pcm16AndFloatRoundTrip) {
  Waveform w = Sine(300.0, 1600);
  const Waveform f = ParseWav(SerializeWav(w, WavEncoding::kFloat32));
  ASSERT_EQ(f.samples.size(), w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i) {
    EXPECT_NEAR(f.samples[i], w.samples[i], 1e-7);
  }
  const Waveform p = ParseWav(SerializeWav(w, WavEncoding::kPcm16));
  for (size_t i = 0; i < w.samples.size(); ++i) {
    EXPECT_NEAR(p.samples[i], w.samples[i], 1.0 / 32767.0);
  }
  EXPECT_EQ(p.sample_rate, 16000);
}

TEST(Wav, RejectsOtherFormats) {
  std::string bytes = SerializeWav(Sine(300.0, 1600), WavEncoding::kPcm16);
  std::string stereo = bytes;
  stereo[22] = 2;  // channel count
  EXPECT_THROW(ParseWav(stereo), AudioError);
  std::string rate = bytes;
  rate[24] = static_cast<char>(0x40);  // 8000 Hz
  rate[25] = static_cast<char>(0x1f);
  EXPECT_THROW(ParseWav(rate), AudioError);
  EXPECT_THROW(ParseWav("RIFF"), AudioError);
  EXPECT_THROW(ReadWav("/nonexistent/file.wav"), AudioError);
}

TEST(Manifest, ParsesTabSeparatedLines) {
  const auto entries =
      ParseManifest("a\twav/a.wav\t你好\nb\t/abs/b.wav\thello world\n", "/data");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].utt_id, "a");
  EXPECT_EQ(entries[0].wav_path, "/data/wav/a.wav");
  EXPECT_EQ(entries[0].transcript, "你好");
  EXPECT_EQ(entries[1].wav_path, "/abs/b.wav");
  EXPECT_THROW(ParseManifest("only_one_field\n", ""), std::runtime_error);
}

}  // namespace
}  // namespace deskasr::frontend
