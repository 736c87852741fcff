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
#include <sstream>

#include "aed/aed_model.h"
#include "numerics/ops.h"
#include "support/test_support.h"
#include "training/batching.h"
#include "training/lr_schedule.h"
#include "training/numerical_error.h"
#include "training/optimizer.h"
#include "training/reg_controller.h"
#include "training/trainer.h"

namespace deskasr::training {
namespace {

using numerics::Rng;
using numerics::Tensor;
using testsupport::RandomTensor;

TEST(LrSchedule, WarmupPeakAndDecay) {
  LrSchedule s;
  s.base_peak = 2e-3;
  s.warmup_steps = 100;
  EXPECT_EQ(s.Rate(0), 0.0);
  EXPECT_NEAR(s.Rate(50), 1e-3, 1e-15);
  EXPECT_NEAR(s.Rate(1) * 2, s.Rate(2), 1e-15);
  EXPECT_DOUBLE_EQ(s.Rate(100), s.Peak());
  EXPECT_NEAR(s.Rate(400), s.Peak() / 2.0, 1e-15);
  for (int64_t k = 101; k < 2000; k += 37) EXPECT_LT(s.Rate(k), s.Rate(k - 1));
}

TEST(LrSchedule, PeakShrinksWithWidth) {
  LrSchedule s;
  s.base_peak = 1e-3;
  s.ref_d_model = 512;
  s.d_model = 512;
  const double xs = s.Peak();
  s.d_model = 1280;
  EXPECT_NEAR(s.Peak(), xs / std::sqrt(1280.0 / 512.0), 1e-15);
  EXPECT_LT(s.Peak(), xs);
  s.warmup_steps = 0;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
}

TEST(RegController, ImprovingLossNeverAdvances) {
  RegController c(DefaultStages(), 2);
  for (int i = 0; i < 50; ++i) EXPECT_FALSE(c.Update(10.0 - 0.1 * i));
  EXPECT_EQ(c.state().current_stage, 0);
}

TEST(RegController, HandTrace) {
  RegController c(DefaultStages(), 2);
  EXPECT_FALSE(c.Update(1.0));
  EXPECT_FALSE(c.Update(1.1));
  EXPECT_EQ(c.state().current_stage, 0);
  EXPECT_TRUE(c.Update(1.2));
  EXPECT_EQ(c.state().current_stage, 1);
  EXPECT_EQ(c.state().evals_since_improvement, 0);
  EXPECT_FALSE(c.Update(1.3));
  EXPECT_EQ(c.state().current_stage, 1);
}

TEST(RegController, SaturatesAtFinalStage) {
  RegController c(DefaultStages(), 1);
  c.Update(1.0);
  EXPECT_TRUE(c.Update(2.0));
  EXPECT_TRUE(c.Update(2.0));
  EXPECT_TRUE(c.at_final_stage());
  for (int i = 0; i < 5; ++i) EXPECT_FALSE(c.Update(3.0));
  EXPECT_EQ(c.state().current_stage, 2);
}

TEST(RegController, StageMonotonicityProperty) {
  Rng rng(81);
  for (int trial = 0; trial < 50; ++trial) {
    RegController c(DefaultStages(), static_cast<int>(rng.UniformInt(1, 3)));
    int prev = 0;
    for (int i = 0; i < 40; ++i) {
      c.Update(rng.Uniform(0.0, 2.0));
      ASSERT_GE(c.state().current_stage, prev);
      prev = c.state().current_stage;
    }
  }
}

TEST(RegController, DefaultLadderIsNonDecreasing) {
  const auto stages = DefaultStages();
  ASSERT_EQ(stages.size(), 3u);
  EXPECT_EQ(stages[0].dropout_p, 0.0);
  EXPECT_FALSE(stages[0].specaugment.enabled);
  for (size_t i = 1; i < stages.size(); ++i) {
    EXPECT_GE(stages[i].dropout_p, stages[i - 1].dropout_p);
    const auto width = [](const RegStage& st) {
      return st.specaugment.enabled ? st.specaugment.max_freq_width : 0;
    };
    EXPECT_GE(width(stages[i]), width(stages[i - 1]));
  }
  auto bad = stages;
  std::swap(bad[0], bad[2]);
  EXPECT_THROW(RegController(bad, 2), std::invalid_argument);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  auto w = Tensor<double>::FromData({3}, {1.0, -2.0, 0.5}, true);
  AdamConfig cfg;
  cfg.clip_norm = 0.0;
  Adam<double> adam({{"w", w}}, cfg);
  const auto loss = numerics::Sum(numerics::Mul(w, w));
  loss.Backward();
  adam.Step(0.1);
  // Bias-corrected first step is lr * sign(g) up to eps.
  EXPECT_NEAR(w.at(0), 0.9, 1e-9);
  EXPECT_NEAR(w.at(1), -1.9, 1e-9);
  EXPECT_NEAR(w.at(2), 0.4, 1e-9);
}

TEST(Adam, MatchesReferenceTrace) {
  Rng rng(82);
  std::vector<double> init(5);
  for (double& v : init) v = rng.Normal();
  auto w = Tensor<double>::FromData({5}, init, true);
  AdamConfig cfg;
  cfg.clip_norm = 1.0;
  Adam<double> adam({{"w", w}}, cfg);
  std::vector<double> ref = init, m(5, 0.0), v(5, 0.0);
  for (int t = 1; t <= 20; ++t) {
    adam.ZeroGrad();
    // loss = sum(w^3) / 3, gradient w^2.
    numerics::Sum(numerics::Mul(numerics::Mul(w, w), w)).Backward();
    adam.Step(0.05);
    std::vector<double> g(5);
    double norm = 0.0;
    for (int k = 0; k < 5; ++k) {
      g[k] = 3.0 * ref[k] * ref[k];
      norm += g[k] * g[k];
    }
    norm = std::sqrt(norm);
    const double scale = norm > 1.0 ? 1.0 / norm : 1.0;
    for (int k = 0; k < 5; ++k) {
      const double gk = g[k] * scale;
      m[k] = 0.9 * m[k] + 0.1 * gk;
      v[k] = 0.98 * v[k] + 0.02 * gk * gk;
      ref[k] -= 0.05 * (m[k] / (1 - std::pow(0.9, t))) /
                (std::sqrt(v[k] / (1 - std::pow(0.98, t))) + 1e-9);
    }
    for (int k = 0; k < 5; ++k) ASSERT_NEAR(w.at(k), ref[k], 1e-12) << t;
  }
}

TEST(Adam, NonFiniteGradientThrows) {
  auto w = Tensor<double>::FromData({1}, {0.0}, true);
  Adam<double> adam({{"w", w}}, {});
  numerics::Mul(w, Tensor<double>::Scalar(std::nan(""))).Backward();
  EXPECT_THROW(adam.Step(0.1), NumericalError);
}

Example MakeExample(const std::string& id, int64_t frames, std::vector<int> targets,
                    Rng& rng) {
  Example e;
  e.utt_id = id;
  e.features.num_frames = frames;
  e.features.values.resize(static_cast<size_t>(frames * 80));
  for (double& v : e.features.values) v = rng.Normal();
  for (int id : targets) e.transcript += static_cast<char>('a' + id);
  e.targets = std::move(targets);
  return e;
}

TEST(Batching, RespectsBudgetAndCoversAll) {
  Rng rng(83);
  std::vector<Example> ex;
  for (int i = 0; i < 30; ++i) {
    ex.push_back(MakeExample("u" + std::to_string(i), rng.UniformInt(10, 200), {5}, rng));
  }
  Rng shuffle(84);
  const auto batches = MakeBatches(ex, 400, &shuffle);
  std::vector<int> seen(ex.size(), 0);
  for (const auto& b : batches) {
    int64_t frames = 0;
    for (size_t i : b) {
      ++seen[i];
      frames += ex[i].features.num_frames;
    }
    EXPECT_TRUE(frames <= 400 || b.size() == 1);
  }
  for (int s : seen) EXPECT_EQ(s, 1);
  Rng again(84);
  EXPECT_EQ(MakeBatches(ex, 400, &again), batches);
}

TEST(Batching, ZeroLengthTargetRejected) {
  Rng rng(85);
  std::vector<Example> ex = {MakeExample("a", 20, {5}, rng), MakeExample("b", 20, {}, rng)};
  EXPECT_THROW(MakeBatches(ex, 100, nullptr), std::invalid_argument);
}

struct TinySetup {
  Rng rng{86};
  std::unique_ptr<aed::AedModel<double>> model;
  TinySetup() {
    encoder::EncoderConfig enc;
    enc.d_model = 16;
    enc.num_layers = 1;
    enc.num_heads = 2;
    enc.conv_kernel = 5;
    aed::DecoderConfig dec;
    dec.vocab_size = 10;
    dec.d_model = 16;
    dec.num_layers = 1;
    dec.num_heads = 2;
    model = std::make_unique<aed::AedModel<double>>(enc, dec, rng);
  }
  ModelHooks<double> Hooks() {
    ModelHooks<double> h;
    auto* m = model.get();
    h.loss = [m](std::span<const encoder::Utterance<double>> b,
                 const nn::ForwardContext& ctx) { return m->Loss(b, ctx); };
    h.decode = [m](const Tensor<double>& x) {
      aed::BeamSearchOptions o;
      o.beam = 1;
      o.max_len = 8;
      auto t = m->Decode(x, o).hypotheses[0].tokens;
      std::vector<int> out(t.begin() + 1, t.end());
      if (!out.empty() && out.back() == 2) out.pop_back();
      return out;
    };
    h.detokenize = [](const std::vector<int>& ids) {
      std::string s;
      for (int id : ids) s += static_cast<char>('a' + id);
      return s;
    };
    h.parameters = [m](nn::ParameterList<double>& out) { m->Collect(out); };
    return h;
  }
};

TEST(AedTraining, InitialLossNearUniform) {
  TinySetup s;
  const std::vector<encoder::Utterance<double>> batch = {
      {RandomTensor({60, 80}, s.rng, 1.0, false), {5, 6, 7, 8}},
      {RandomTensor({40, 80}, s.rng, 1.0, false), {9, 3}}};
  numerics::NoGradGuard guard;
  const double loss = s.model->Loss(batch, {}).item();
  EXPECT_NEAR(loss, std::log(10.0), 0.1 * std::log(10.0));
}

TEST(AedTraining, SingleUtteranceOverfits) {
  TinySetup s;
  const std::vector<encoder::Utterance<double>> batch = {
      {RandomTensor({60, 80}, s.rng, 1.0, false), {5, 6, 7, 8, 9}}};
  nn::ParameterList<double> params;
  s.model->Collect(params);
  Adam<double> adam(params, {});
  double loss = 0.0;
  for (int step = 0; step < 200; ++step) {
    adam.ZeroGrad();
    const auto l = s.model->Loss(batch, {});
    l.Backward();
    adam.Step(5e-3);
    loss = l.item();
  }
  EXPECT_LT(loss, 0.1);
}

TEST(MaskedLoss, AllMaskedIsZero) {
  Rng rng(87);
  const auto logits = RandomTensor({4, 6}, rng);
  const std::vector<int> targets = {1, 2, 3, 4};
  const std::vector<uint8_t> mask(4, 0);
  const auto loss = numerics::CrossEntropy(logits, targets, mask);
  EXPECT_EQ(loss.item(), 0.0);
  loss.Backward();
  for (double g : logits.grad()) EXPECT_EQ(g, 0.0);
}

std::vector<Example> TinyCorpus(Rng& rng) {
  std::vector<Example> ex;
  for (int i = 0; i < 6; ++i) {
    std::vector<int> t;
    for (int k = 0; k < 3; ++k) t.push_back(static_cast<int>(rng.UniformInt(3, 9)));
    ex.push_back(MakeExample("u" + std::to_string(i), rng.UniformInt(30, 60), t, rng));
  }
  return ex;
}

TEST(Trainer, FixedSeedIsBitExact) {
  std::vector<std::vector<double>> runs;
  for (int r = 0; r < 2; ++r) {
    TinySetup s;
    Rng data(88);
    TrainerConfig cfg;
    cfg.max_steps = 50;
    cfg.frame_budget = 120;
    cfg.lr.warmup_steps = 10;
    cfg.eval_every = 20;
    cfg.seed = 5;
    Trainer<double> trainer(cfg, s.Hooks(), TinyCorpus(data), {});
    std::ostringstream log;
    const TrainResult res = trainer.Run(&log);
    EXPECT_EQ(res.steps, 50);
    runs.push_back(res.losses);
    const std::string text = log.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 50);
  }
  ASSERT_EQ(runs[0].size(), 50u);
  for (size_t i = 0; i < 50; ++i) EXPECT_EQ(runs[0][i], runs[1][i]) << i;
  EXPECT_LT(runs[0].back(), runs[0].front());
}

TEST(Trainer, StepLogColumns) {
  TinySetup s;
  Rng data(89);
  TrainerConfig cfg;
  cfg.max_steps = 3;
  cfg.frame_budget = 120;
  Trainer<double> trainer(cfg, s.Hooks(), TinyCorpus(data), {});
  std::ostringstream log;
  trainer.Run(&log);
  std::istringstream in(log.str());
  std::string line;
  int64_t expected_step = 1;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    int64_t step;
    int stage;
    double lr, loss;
    ASSERT_TRUE(f >> step >> stage >> lr >> loss) << line;
    EXPECT_EQ(step, expected_step++);
    EXPECT_EQ(stage, 0);
    EXPECT_NEAR(lr, cfg.lr.Rate(step), 1e-12 + 1e-6 * lr);
    EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 3);
  }
}

}  // namespace
}  // namespace deskasr::training
