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

#include <filesystem>
#include <fstream>
#include <string>

#include "frontend/cmvn.h"
#include "frontend/fbank.h"
#include "frontend/wav.h"
#include "runtime/checkpoint.h"
#include "runtime/commands.h"
#include "runtime/config.h"
#include "runtime/engine.h"
#include "runtime/param_count.h"
#include "runtime/train.h"
#include "support/test_support.h"
#include "tokenizer/tokenizer.h"

namespace deskasr::runtime {
namespace {

namespace fs = std::filesystem;
using testsupport::MakeSynthCorpus;
using testsupport::ReadFile;
using testsupport::TempDir;
using testsupport::TinyRunConfig;
using testsupport::WriteFile;

std::string ErrorOf(const std::string& yaml) {
  try {
    ParseConfig(yaml, "run.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ConfigTest, UnknownKeyNamesOriginAndLine) {
  const std::string err = ErrorOf("model: aed\ntraining:\n  max_stepz: 3\n");
  EXPECT_NE(err.find("run.yaml:3"), std::string::npos) << err;
  EXPECT_NE(err.find("training.max_stepz"), std::string::npos) << err;
  const std::string top = ErrorOf("model: aed\nbogus: 1\n");
  EXPECT_NE(top.find("run.yaml:2"), std::string::npos) << top;
}

TEST(ConfigTest, BadValueNamesOriginAndLine) {
  const std::string err = ErrorOf("seed: 4\ndecode:\n  beam: wide\n");
  EXPECT_NE(err.find("run.yaml:3"), std::string::npos) << err;
  EXPECT_NE(err.find("decode.beam"), std::string::npos) << err;
  EXPECT_FALSE(ErrorOf("preset: huge\n").empty());
  EXPECT_FALSE(ErrorOf("decode:\n  beam: 0\n").empty());
  EXPECT_FALSE(ErrorOf("model: ctc\n").empty());
}

TEST(ConfigTest, SerializeParseFixpoint) {
  for (const Preset& p : Presets()) {
    for (const std::string model : {"aed", "llm"}) {
      RunConfig cfg;
      cfg.model = model;
      ApplyPreset(p, cfg);
      cfg.seed = 17;
      cfg.precision = "double";
      cfg.data.train_manifest = "data/train.tsv";
      cfg.training.base_lr = 3.5e-4;
      cfg.decode.length_penalty = 0.25;
      const std::string once = SerializeConfig(cfg);
      const RunConfig back = ParseConfig(once);
      EXPECT_TRUE(back == cfg) << p.name << " " << model;
      EXPECT_EQ(SerializeConfig(back), once);
    }
  }
}

TEST(ConfigTest, MissingDataPathNamesField) {
  const std::string dir = TempDir("rt_missing");
  RunConfig cfg = TinyRunConfig("aed", dir + "/nope.tsv", dir + "/out");
  try {
    RunTraining(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("data.train_manifest"),
              std::string::npos)
        << e.what();
  }
}

TEST(ConfigTest, AutoMaxLenFollowsEncoderLength) {
  EXPECT_EQ(ResolveMaxLen(0, 98), 2 + 25 / 2);
  EXPECT_EQ(ResolveMaxLen(0, 4), 2);
  EXPECT_EQ(ResolveMaxLen(7, 98), 7);
}

TEST(ParamCountTest, AnalyticMatchesEnumeratedOnDeskPresets) {
  for (const Preset& p : Presets()) {
    if (p.full_width) continue;
    for (const std::string model : {"aed", "llm"}) {
      RunConfig cfg;
      cfg.model = model;
      ApplyPreset(p, cfg);
      const int64_t vocab = NominalVocab(cfg);
      const ParamCounts a = AnalyticCounts(cfg, vocab);
      const ParamCounts e = EnumeratedCounts(cfg, vocab);
      EXPECT_EQ(a, e) << p.name << " " << model << "\n"
                      << FormatCounts(a, cfg.kind()) << "\n"
                      << FormatCounts(e, cfg.kind());
      EXPECT_GT(a.total(), 0);
    }
  }
}

TEST(ParamCountTest, FullWidthPresetsNearReportedSizes) {
  RunConfig aed;
  aed.model = "aed";
  ApplyPreset(FindPreset("full-l"), aed);
  const ParamCounts a = AnalyticCounts(aed, NominalVocab(aed));
  EXPECT_NEAR(static_cast<double>(a.total()), 1.1e9, 0.15 * 1.1e9);

  RunConfig llm;
  llm.model = "llm";
  ApplyPreset(FindPreset("full-l"), llm);
  const ParamCounts l = AnalyticCounts(llm, NominalVocab(llm));
  EXPECT_NEAR(static_cast<double>(l.encoder), 710e6, 0.15 * 710e6);
  EXPECT_NEAR(static_cast<double>(l.adapter), 22e6, 0.30 * 22e6);
}

class EngineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new std::string(TempDir("rt_engine"));
    MakeSynthCorpus(*dir_, 4);
  }
  static void TearDownTestSuite() { delete dir_; }

  static std::unique_ptr<Engine> Fresh(const std::string& model,
                                       const std::string& precision) {
    RunConfig cfg = TinyRunConfig(model, manifest(), *dir_ + "/unused");
    cfg.precision = precision;
    std::vector<std::string> lines;
    std::vector<frontend::FeatureMatrix> feats;
    for (const CorpusItem& c : LoadCorpus(manifest(), "data.train_manifest")) {
      lines.push_back(c.entry.transcript);
      feats.push_back(c.features);
    }
    lines.push_back(cfg.tokenizer.prompt);
    return Engine::Create(cfg, tokenizer::Tokenizer::Train(lines, 20),
                          frontend::FitCmvn(feats));
  }

  static std::string manifest() { return *dir_ + "/manifest.tsv"; }
  static frontend::FeatureMatrix Features(int i) {
    char name[64];
    std::snprintf(name, sizeof(name), "/wav/synth%05d.wav", i);
    return frontend::ComputeFbank(frontend::ReadWav(*dir_ + name));
  }

  static std::string* dir_;
};

std::string* EngineTest::dir_ = nullptr;

TEST_F(EngineTest, CheckpointRoundTripGivesBitIdenticalProbe) {
  for (const std::string model : {"aed", "llm"}) {
    for (const std::string precision : {"float", "double"}) {
      auto engine = Fresh(model, precision);
      const std::string path = *dir_ + "/rt_" + model + precision + ".dasr";
      SaveCheckpoint(path, engine->ToCheckpoint());
      auto loaded = Engine::Load(path);
      const frontend::FeatureMatrix f = Features(1);
      EXPECT_EQ(engine->Probe(f), loaded->Probe(f)) << model << precision;
      EXPECT_EQ(engine->Counts(), loaded->Counts());
      EXPECT_TRUE(loaded->config() == engine->config());
      DecodeConfig d;
      EXPECT_EQ(engine->DecodeIds(f, d), loaded->DecodeIds(f, d));
    }
  }
}

TEST_F(EngineTest, CorruptCheckpointIsRefused) {
  auto engine = Fresh("aed", "float");
  const std::string bytes = SerializeCheckpoint(engine->ToCheckpoint());
  EXPECT_NO_THROW(ParseCheckpoint(bytes));
  std::string flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x10;
  EXPECT_THROW(ParseCheckpoint(flipped), CheckpointError);
  EXPECT_THROW(ParseCheckpoint(bytes.substr(0, bytes.size() - 9)),
               CheckpointError);
  std::string magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(ParseCheckpoint(magic), CheckpointError);
  EXPECT_THROW(LoadCheckpoint(*dir_ + "/absent.dasr"), CheckpointError);
}

TEST_F(EngineTest, DecodeIsDeterministicAcrossRunsAndEngines) {
  auto a = Fresh("aed", "float");
  auto b = Fresh("aed", "float");
  const std::vector<WavListEntry> list =
      ParseWavList("u0\twav/synth00000.wav\nwav/synth00002.wav\n", *dir_);
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[1].utt_id, "synth00002");
  DecodeConfig d;
  const std::string first = DecodeList(*a, list, d).FormatHypotheses();
  EXPECT_EQ(DecodeList(*a, list, d).FormatHypotheses(), first);
  EXPECT_EQ(DecodeList(*b, list, d).FormatHypotheses(), first);
}

TEST_F(EngineTest, EmptyListAndBadWav) {
  auto engine = Fresh("aed", "float");
  const DecodeListResult empty = DecodeList(*engine, {}, DecodeConfig{});
  EXPECT_TRUE(empty.hypotheses.empty());
  EXPECT_TRUE(empty.failures.empty());
  EXPECT_EQ(empty.FormatHypotheses(), "");

  WriteFile(*dir_ + "/junk.wav", "not a wav file");
  const DecodeListResult r = DecodeList(
      *engine, {{"bad", *dir_ + "/junk.wav"},
                {"ok", *dir_ + "/wav/synth00001.wav"}},
      DecodeConfig{});
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].utt_id, "bad");
  ASSERT_EQ(r.hypotheses.size(), 1u);
  EXPECT_EQ(r.hypotheses[0].first, "ok");
}

TEST(TrainRunTest, ResumeReproducesUninterruptedRun) {
  const std::string dir = TempDir("rt_resume");
  MakeSynthCorpus(dir + "/data", 4);
  RunConfig cfg = TinyRunConfig("aed", dir + "/data/manifest.tsv", dir + "/full");
  cfg.precision = "double";
  cfg.training.max_steps = 12;
  cfg.training.checkpoint_every = 6;
  cfg.training.eval_every = 4;
  cfg.training.warmup_steps = 4;
  const TrainSummary full = RunTraining(cfg);
  ASSERT_EQ(full.result.losses.size(), 12u);
  ASSERT_TRUE(fs::exists(dir + "/full/step_6.dasr"));

  RunConfig resumed = cfg;
  resumed.data.output_dir = dir + "/resumed";
  resumed.training.resume_from = dir + "/full/step_6.dasr";
  const TrainSummary tail = RunTraining(resumed);
  ASSERT_EQ(tail.result.losses.size(), 6u);
  for (size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(tail.result.losses[i], full.result.losses[6 + i]) << i;
  }
  const auto a = Engine::Load(full.final_checkpoint);
  const auto b = Engine::Load(tail.final_checkpoint);
  const frontend::FeatureMatrix f = frontend::ComputeFbank(
      frontend::ReadWav(dir + "/data/wav/synth00000.wav"));
  EXPECT_EQ(a->Probe(f), b->Probe(f));

  RunConfig again = cfg;
  again.data.output_dir = dir + "/again";
  const TrainSummary repeat = RunTraining(again);
  EXPECT_EQ(repeat.result.losses, full.result.losses);
  EXPECT_EQ(ReadFile(dir + "/again/train_log.tsv"),
            ReadFile(dir + "/full/train_log.tsv"));
}

TEST(ScoreFilesTest, WarnsAboutMissingIdsAndScoresIntersection) {
  const std::string dir = TempDir("rt_score");
  WriteFile(dir + "/ref.txt", "a\t今天天气\nb\t你好\nc\t再见\n");
  WriteFile(dir + "/hyp.txt", "a\t今天天\nb\t你好\nz\t多余\n");
  WriteFile(dir + "/base.txt", "a\t明天天\nb\t你\nc\t再见\n");
  std::string warnings;
  const eval::ScoreReport r =
      ScoreFiles(dir + "/ref.txt", dir + "/hyp.txt", eval::Unit::kChar,
                 dir + "/base.txt", &warnings);
  EXPECT_EQ(r.score.ids, (std::vector<std::string>{"a", "b"}));
  EXPECT_NEAR(r.score.rate, 100.0 / 6.0, 1e-9);
  EXPECT_NE(warnings.find("missing 1 reference ids: c"), std::string::npos)
      << warnings;
  EXPECT_NE(warnings.find("1 ids not in the reference: z"), std::string::npos)
      << warnings;
  ASSERT_TRUE(r.baseline.has_value());
  EXPECT_NEAR(r.baseline->rate, 300.0 / 8.0, 1e-9);
  ASSERT_TRUE(r.cerr.has_value());
  EXPECT_NEAR(*r.cerr, (37.5 - 100.0 / 6.0) / 37.5 * 100.0, 1e-9);

  WriteFile(dir + "/empty.txt", "");
  EXPECT_THROW(ScoreFiles(dir + "/empty.txt", dir + "/hyp.txt",
                          eval::Unit::kChar, std::nullopt, nullptr),
               ConfigError);
}

TEST(CountParamsReportTest, ListsComponents) {
  RunConfig cfg;
  cfg.model = "llm";
  ApplyPreset(FindPreset("xs"), cfg);
  const std::string report = CountParamsReport(cfg);
  EXPECT_NE(report.find("encoder"), std::string::npos) << report;
  EXPECT_NE(report.find("adapter"), std::string::npos) << report;
  EXPECT_NE(report.find("lora"), std::string::npos) << report;
}

}  // namespace
}  // namespace deskasr::runtime
