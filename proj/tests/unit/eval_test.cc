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

#include <algorithm>

#include "eval/edit_distance.h"
#include "eval/metrics.h"
#include "eval/report.h"
#include "numerics/rng.h"
#include "support/oracles.h"

#ifndef DESKASR_TEST_DATA_DIR
#define DESKASR_TEST_DATA_DIR "tests/data"
#endif

namespace deskasr::eval {
namespace {

using numerics::Rng;

using testsupport::MemoDistance;

std::string RandomString(Rng& rng, int max_len) {
  std::string s;
  const int64_t n = rng.UniformInt(0, max_len);
  for (int64_t i = 0; i < n; ++i) s += static_cast<char>('a' + rng.UniformInt(0, 3));
  return s;
}

EditCounts Dist(const std::string& a, const std::string& b) {
  return EditDistance(std::vector<char>(a.begin(), a.end()),
                      std::vector<char>(b.begin(), b.end()));
}

TEST(EditDistance, IdenticalAndSingleSubstitution) {
  const EditCounts same = Dist("abcd", "abcd");
  EXPECT_EQ(same.distance(), 0);
  const EditCounts sub = Dist("abcd", "abxd");
  EXPECT_EQ(sub.sub, 1);
  EXPECT_EQ(sub.del, 0);
  EXPECT_EQ(sub.ins, 0);
  EXPECT_EQ(sub.ref_len, 4);
  const EditCounts empty = Dist("", "");
  EXPECT_EQ(empty.distance(), 0);
}

TEST(EditDistance, MatchesMemoizedOracleOn500Pairs) {
  Rng rng(91);
  int64_t total = 0, oracle = 0;
  for (int i = 0; i < 500; ++i) {
    const std::string a = RandomString(rng, 12), b = RandomString(rng, 12);
    const EditCounts c = Dist(a, b);
    const int64_t o = MemoDistance(a, b);
    ASSERT_EQ(c.distance(), o) << a << " / " << b;
    // Counts must describe a valid alignment.
    ASSERT_EQ(static_cast<int64_t>(a.size()) - c.del + c.ins,
              static_cast<int64_t>(b.size()));
    total += c.distance();
    oracle += o;
  }
  EXPECT_EQ(total, oracle);
}

TEST(EditDistance, SymmetryAndTriangleProperty) {
  Rng rng(92);
  for (int i = 0; i < 300; ++i) {
    const std::string a = RandomString(rng, 10), b = RandomString(rng, 10),
                      c = RandomString(rng, 10);
    EXPECT_EQ(Dist(a, b).distance(), Dist(b, a).distance());
    EXPECT_LE(Dist(a, c).distance(), Dist(a, b).distance() + Dist(b, c).distance());
  }
}

TEST(EditDistance, TiePrefersSubstitution) {
  const EditCounts c = Dist("ab", "ba");
  EXPECT_EQ(c.sub, 2);
  EXPECT_EQ(c.del + c.ins, 0);
}

TEST(ErrorRate, OneDeletionInFiveCharacters) {
  const std::vector<ScoredPair> pairs = {ScorePair("今天天气好", "今天气好", Unit::kChar)};
  EXPECT_EQ(pairs[0].counts.del, 1);
  EXPECT_EQ(pairs[0].counts.distance(), 1);
  EXPECT_DOUBLE_EQ(ErrorRate(pairs), 20.0);
  EXPECT_EQ(FormatFixed(ErrorRate(pairs), 2), "20.00");
}

TEST(ErrorRate, IdenticalAndEmptyHypothesis) {
  const std::vector<ScoredPair> same = {ScorePair("你好世界", "你好世界", Unit::kChar),
                                        ScorePair("北京", "北京", Unit::kChar)};
  EXPECT_EQ(ErrorRate(same), 0.0);
  const std::vector<ScoredPair> none = {ScorePair("你好世界", "", Unit::kChar)};
  EXPECT_EQ(ErrorRate(none), 100.0);
  EXPECT_EQ(none[0].counts.del, 4);
}

TEST(ErrorRate, EmptyReferenceCorpusIsError) {
  const std::vector<ScoredPair> nothing;
  EXPECT_THROW(ErrorRate(nothing), std::invalid_argument);
  const std::vector<ScoredPair> blank = {ScorePair("，。 ", "abc", Unit::kChar)};
  EXPECT_THROW(ErrorRate(blank), std::invalid_argument);
}

TEST(ErrorRate, ReorderingInvariance) {
  Rng rng(93);
  std::vector<ScoredPair> pairs;
  for (int i = 0; i < 40; ++i) {
    pairs.push_back(ScorePair(RandomString(rng, 8) + "x", RandomString(rng, 8), Unit::kChar));
  }
  const double rate = ErrorRate(pairs);
  for (int k = 0; k < 5; ++k) {
    for (size_t i = pairs.size(); i > 1; --i) {
      std::swap(pairs[i - 1], pairs[static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(i) - 1))]);
    }
    EXPECT_DOUBLE_EQ(ErrorRate(pairs), rate);
  }
}

TEST(Normalization, CharAndWordUnits) {
  EXPECT_EQ(CharUnits("你好，世界！ ok"),
            (std::vector<std::string>{"你", "好", "世", "界", "o", "k"}));
  EXPECT_EQ(WordUnits("Hello  WORLD\tfoo"),
            (std::vector<std::string>{"hello", "world", "foo"}));
  const std::vector<ScoredPair> w = {ScorePair("the cat sat", "The bat sat", Unit::kWord)};
  EXPECT_NEAR(ErrorRate(w), 100.0 / 3.0, 1e-12);
  EXPECT_EQ(ParseUnit("word"), Unit::kWord);
  EXPECT_THROW(ParseUnit("phone"), std::invalid_argument);
}

TEST(AverageN, ReportedAverageRows) {
  const std::vector<double> llm = {0.76, 2.15, 4.60, 4.67};
  const std::vector<double> aed = {0.55, 2.52, 4.88, 4.76};
  EXPECT_EQ(FormatFixed(AverageN(llm), 2), "3.05");
  EXPECT_EQ(FormatFixed(AverageN(aed), 2), "3.18");
  const std::vector<double> one = {1.234};
  EXPECT_DOUBLE_EQ(AverageN(one), 1.234);
  EXPECT_THROW(AverageN(std::vector<double>{}), std::invalid_argument);
}

TEST(Cerr, AbstractAndTable4) {
  EXPECT_EQ(FormatFixed(Cerr(3.33, 3.05), 1), "8.4");
  EXPECT_EQ(FormatFixed(Cerr(4.56, 3.48), 1), "23.7");
  EXPECT_EQ(FormatFixed(Cerr(5.80, 3.48), 1), "40.0");
  EXPECT_EQ(FormatFixed(Cerr(14.16, 7.05), 1), "50.2");
  EXPECT_EQ(FormatFixed(Cerr(2.5, 2.5), 1), "0.0");
  EXPECT_THROW(Cerr(0.0, 1.0), std::invalid_argument);
}

TEST(Cerr, Table4FullColumn) {
  struct Row { double speech; const char* s_cerr; double singing; const char* g_cerr; };
  const Row rows[] = {{3.74, "7.0", 7.51, "6.1"},
                      {4.56, "23.7", 14.16, "50.2"},
                      {5.67, "38.6", 21.37, "67.0"},
                      {5.80, "40.0", 21.19, "66.7"}};
  for (const Row& r : rows) {
    EXPECT_EQ(FormatFixed(Cerr(r.speech, 3.48), 1), r.s_cerr);
    EXPECT_EQ(FormatFixed(Cerr(r.singing, 7.05), 1), r.g_cerr);
  }
}

TEST(Cerr, ScalingTableAndSixSetAverage) {
  EXPECT_EQ(FormatFixed(Cerr(3.29, 3.05), 1), "7.3");
  EXPECT_EQ(FormatFixed(Cerr(3.79, 3.56), 1), "6.1");
  EXPECT_EQ(FormatFixed(Cerr(2.98, 2.86), 1), "4.0");
}

TEST(Rounding, HalfUpAtDisplay) {
  EXPECT_EQ(FormatFixed(3.045, 2), "3.05");
  EXPECT_EQ(FormatFixed(3.325, 2), "3.33");
  EXPECT_EQ(FormatFixed(4.4675, 2), "4.47");
  EXPECT_EQ(FormatFixed(0.05, 1), "0.1");
}

TEST(Table, PublicMandarinFixture) {
  BenchmarkTable t = ReadTable(std::string(DESKASR_TEST_DATA_DIR) + "/public_mandarin.tsv");
  ASSERT_EQ(t.sets.size(), 4u);
  ComputeTable(t, std::string("Seed-ASR"));
  const std::map<std::string, std::string> averages = {
      {"LLM-L", "3.05"}, {"AED-L", "3.18"},
      {"Seed-ASR", "3.33"},       {"Qwen-Audio", "6.19"},
      {"SenseVoice-L", "4.47"},   {"Whisper-Large-v3", "9.86"},
      {"Paraformer-Large", "4.56"}};
  for (const auto& row : t.rows) {
    EXPECT_EQ(FormatFixed(row.average, 2), averages.at(row.system)) << row.system;
  }
  EXPECT_EQ(FormatFixed(t.cerr.at("LLM-L"), 1), "8.4");
  const std::string human = FormatTableHuman(t);
  EXPECT_NE(human.find("Average-4"), std::string::npos);
  const std::string machine = FormatTableMachine(t);
  EXPECT_NE(machine.find("AED-L.average=3.18"), std::string::npos);
  EXPECT_THROW(ComputeTable(t, std::string("nobody")), std::invalid_argument);
}

TEST(Report, MismatchedIdsIntersect) {
  const UttList ref = ParseUttList("a\t你好\nb\t世界\nc\t北京\n");
  const UttList hyp = ParseUttList("a\t你好\nc\t北\nd\t多余\n");
  const CorpusScore s = ScoreCorpus(ref, hyp, Unit::kChar);
  EXPECT_EQ(s.ids, (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(s.missing_in_hyp, (std::vector<std::string>{"b"}));
  EXPECT_EQ(s.missing_in_ref, (std::vector<std::string>{"d"}));
  EXPECT_DOUBLE_EQ(s.rate, 25.0);
  ScoreReport r{s, std::nullopt, std::nullopt};
  EXPECT_NE(FormatHuman(r).find("CER 25.00%"), std::string::npos);
}

TEST(Report, ManifestLinesGiveTranscript) {
  const UttList ref = ParseUttList("a\twav/a.wav\t你好\nb\tx.wav\t\n");
  EXPECT_EQ(ref, (UttList{{"a", "你好"}, {"b", ""}}));
}

}  // namespace
}  // namespace deskasr::eval
