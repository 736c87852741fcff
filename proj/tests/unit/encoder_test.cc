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

#include "encoder/encoder.h"
#include "numerics/ops.h"
#include "runtime/config.h"
#include "runtime/param_count.h"
#include "support/test_support.h"

namespace deskasr::encoder {
namespace {

using testsupport::RandomTensor;

EncoderConfig SmallConfig() {
  EncoderConfig cfg;
  cfg.input_dim = 80;
  cfg.d_model = 16;
  cfg.num_layers = 2;
  cfg.num_heads = 2;
  cfg.conv_kernel = 5;
  cfg.max_relative_distance = 8;
  return cfg;
}

// Output length of a stride-2, kernel-3, padding-1 conv computed by sliding
// the window over the padded input.
int64_t CountWindows(int64_t len) {
  int64_t n = 0;
  for (int64_t start = -1; start + 3 <= len + 1; start += 2) ++n;
  return n;
}

TEST(Subsampling, KnownLengths) {
  EXPECT_EQ(ConvOutputLength(98), 49);
  EXPECT_EQ(SubsampledLength(98), 25);
  EXPECT_EQ(ConvOutputLength(4), 2);
  EXPECT_EQ(SubsampledLength(4), 1);
}

TEST(Subsampling, RunningConvMatchesFormula) {
  Rng rng(31);
  const EncoderConfig cfg = SmallConfig();
  ConvSubsampling<double> sub(cfg, rng);
  numerics::NoGradGuard guard;
  for (int64_t t : {1, 2, 3, 4, 7, 50, 98}) {
    const Tensor<double> out = sub.Forward(RandomTensor({t, 80}, rng, 1.0, false), t);
    EXPECT_EQ(out.rows(), SubsampledLength(t)) << t;
    EXPECT_EQ(out.cols(), 16);
  }
}

TEST(Subsampling, LengthFormulaProperty) {
  for (int64_t t = 1; t <= 2000; ++t) {
    ASSERT_EQ(ConvOutputLength(t), CountWindows(t)) << t;
    ASSERT_EQ(SubsampledLength(t), CountWindows(CountWindows(t))) << t;
    if (t > 1) ASSERT_GE(SubsampledLength(t), SubsampledLength(t - 1));
  }
  EXPECT_NEAR(static_cast<double>(SubsampledLength(2000)) / SubsampledLength(1000),
              2.0, 0.01);
}

TEST(Encoder, EmptyInputIsError) {
  Rng rng(32);
  Encoder<double> enc(SmallConfig(), rng);
  EXPECT_ANY_THROW(enc.Forward(Tensor<double>::Zeros({0, 80}), {}));
}

TEST(Encoder, SingleFrameGivesSingleFiniteOutput) {
  Rng rng(33);
  Encoder<double> enc(SmallConfig(), rng);
  numerics::NoGradGuard guard;
  const auto out = enc.Forward(RandomTensor({1, 80}, rng, 1.0, false), {});
  EXPECT_EQ(out.states.rows(), 1);
  EXPECT_EQ(out.valid_length, 1);
  for (double v : out.states.data()) EXPECT_TRUE(std::isfinite(v));
}

TEST(Encoder, ActivationsFiniteForRandomInputs) {
  Rng rng(34);
  Encoder<float> enc(SmallConfig(), rng);
  numerics::NoGradGuard guard;
  for (int trial = 0; trial < 10; ++trial) {
    const int64_t t = rng.UniformInt(1, 150);
    std::vector<float> data(static_cast<size_t>(t * 80));
    for (float& v : data) v = static_cast<float>(rng.Normal(0.0, 3.0));
    const auto out =
        enc.Forward(Tensor<float>::FromData({t, 80}, std::move(data)), {});
    EXPECT_EQ(out.states.rows(), SubsampledLength(t));
    for (float v : out.states.data()) ASSERT_TRUE(std::isfinite(v));
  }
}

TEST(Encoder, PaddedBatchMatchesSeparateEncoding) {
  Rng rng(35);
  Encoder<double> enc(SmallConfig(), rng);
  numerics::NoGradGuard guard;
  const std::vector<Tensor<double>> feats = {RandomTensor({98, 80}, rng, 1.0, false),
                                             RandomTensor({50, 80}, rng, 1.0, false)};
  const auto batch = enc.ForwardBatch(feats, {});
  ASSERT_EQ(batch.size(), 2u);
  for (size_t u = 0; u < 2; ++u) {
    const auto alone = enc.Forward(feats[u], {});
    ASSERT_EQ(batch[u].valid_length, alone.valid_length);
    for (int64_t t = 0; t < alone.valid_length; ++t) {
      for (int64_t d = 0; d < 16; ++d) {
        ASSERT_NEAR(batch[u].states.at(t, d), alone.states.at(t, d), 1e-5);
      }
    }
  }
  EXPECT_EQ(batch[1].valid_length, 13);
}

TEST(Encoder, PaddingInvarianceProperty) {
  Rng rng(36);
  Encoder<double> enc(SmallConfig(), rng);
  numerics::NoGradGuard guard;
  for (int trial = 0; trial < 8; ++trial) {
    const int64_t a = rng.UniformInt(4, 60), b = rng.UniformInt(4, 60);
    const std::vector<Tensor<double>> feats = {RandomTensor({a, 80}, rng, 1.0, false),
                                               RandomTensor({b, 80}, rng, 1.0, false)};
    const auto batch = enc.ForwardBatch(feats, {});
    for (size_t u = 0; u < 2; ++u) {
      const auto alone = enc.Forward(feats[u], {});
      for (int64_t t = 0; t < alone.valid_length; ++t) {
        for (int64_t d = 0; d < 16; ++d) {
          ASSERT_NEAR(batch[u].states.at(t, d), alone.states.at(t, d), 1e-5)
              << a << " " << b;
        }
      }
    }
  }
}

TEST(RelPosition, LogitsDependOnOffsetNotAbsolutePosition) {
  Rng rng(37);
  RelPositionAttention<double> attn(16, 2, 64, rng);
  numerics::NoGradGuard guard;
  const int64_t t = 10, pad = 7;
  const Tensor<double> x = RandomTensor({t, 16}, rng, 1.0, false);
  const Tensor<double> shifted = numerics::ConcatRows<double>(std::vector<Tensor<double>>{
      RandomTensor({pad, 16}, rng, 1.0, false), x});
  const auto base = attn.Logits(x);
  const auto moved = attn.Logits(shifted);
  ASSERT_EQ(base.size(), 2u);
  for (size_t h = 0; h < 2; ++h) {
    for (int64_t i = 0; i < t; ++i) {
      for (int64_t j = 0; j < t; ++j) {
        EXPECT_NEAR(moved[h].at(i + pad, j + pad), base[h].at(i, j), 1e-10);
      }
    }
  }
}

TEST(RelPosition, ClipsBeyondMaxDistance) {
  Rng rng(38);
  RelPositionAttention<double> attn(8, 1, 2, rng);
  numerics::NoGradGuard guard;
  // Identical rows isolate the positional term.
  std::vector<double> row(8);
  for (double& v : row) v = rng.Normal();
  std::vector<double> data;
  for (int i = 0; i < 9; ++i) data.insert(data.end(), row.begin(), row.end());
  const auto logits = attn.Logits(Tensor<double>::FromData({9, 8}, data))[0];
  EXPECT_NEAR(logits.at(0, 3), logits.at(0, 8), 1e-12);
  EXPECT_NEAR(logits.at(8, 0), logits.at(7, 0), 1e-12);
}

TEST(Conformer, ZeroInitResidualIsIdentityBeforeFinalNorm) {
  Rng rng(39);
  EncoderConfig cfg = SmallConfig();
  cfg.zero_init_residual = true;
  ConformerBlock<double> block(cfg, rng);
  numerics::NoGradGuard guard;
  const Tensor<double> x = RandomTensor({6, 16}, rng, 1.0, false);
  const Tensor<double> y = block.Forward(x, 6, {});
  // Every residual branch contributes zero, leaving LayerNorm(x).
  const Tensor<double> expected = numerics::LayerNorm(
      x, Tensor<double>::Full({16}, 1.0), Tensor<double>::Zeros({16}), 1e-5);
  for (int64_t i = 0; i < y.numel(); ++i) {
    EXPECT_NEAR(y.at(i), expected.at(i), 1e-6);
  }
}

TEST(Conformer, GradientCheckWidth16) {
  Rng rng(40);
  EncoderConfig cfg;
  cfg.d_model = 16;
  cfg.num_layers = 1;
  cfg.num_heads = 2;
  cfg.max_relative_distance = 8;
  ConformerBlock<double> block(cfg, rng);
  const Tensor<double> x = RandomTensor({5, 16}, rng);
  nn::ParameterList<double> params;
  block.Collect("block", params);
  std::vector<Tensor<double>> wrt = {x};
  for (const auto& p : params) wrt.push_back(p.tensor);
  testsupport::GradCheckOptions opts;
  opts.max_elements = 8;
  const auto r = testsupport::GradCheck([&] { return block.Forward(x, 5, {}); },
                                        wrt, 41, opts);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
}

TEST(Config, RejectsBadShapes) {
  EncoderConfig cfg = SmallConfig();
  cfg.num_heads = 3;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg = SmallConfig();
  cfg.conv_kernel = 32;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg = SmallConfig();
  cfg.num_heads = 0;
  cfg.d_model = 512;
  EXPECT_EQ(cfg.heads(), 8);
}

TEST(ParamCount, XsEncoderNearTableFigure) {
  const runtime::RunConfig cfg = runtime::ParseConfig("preset: full-xs\n");
  const auto counts = runtime::AnalyticCounts(cfg, runtime::NominalVocab(cfg));
  const double ratio = static_cast<double>(counts.encoder) / 86e6;
  EXPECT_GT(ratio, 0.85);
  EXPECT_LT(ratio, 1.15);
}

}  // namespace
}  // namespace deskasr::encoder
