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
#include <set>

#include "numerics/rng.h"
#include "tokenizer/bpe.h"
#include "tokenizer/tokenizer.h"
#include "tokenizer/unicode.h"

namespace deskasr::tokenizer {
namespace {

using numerics::Rng;

const std::vector<std::string>& ToyCorpus() {
  static const std::vector<std::string> lines = {
      "hello world 北京",
      "help the world 你好",
      "hello hello 上海 2024",
      "the low lower lowest 北京大学",
      "world wide web 你好，世界",
  };
  return lines;
}

// Reference trainer: rescans the raw word stream every step and merges the
// winning pair left to right.
std::vector<SymbolPair> ReferenceMerges(const std::vector<std::string>& lines,
                                        int num_merges) {
  std::vector<std::vector<std::string>> words;
  for (const auto& w : ExtractLatinWords(lines)) words.push_back(SplitWord(w));
  std::vector<SymbolPair> merges;
  for (int step = 0; step < num_merges; ++step) {
    std::vector<std::pair<SymbolPair, int64_t>> counts;
    for (const auto& w : words) {
      for (size_t i = 0; i + 1 < w.size(); ++i) {
        const SymbolPair p{w[i], w[i + 1]};
        auto it = std::find_if(counts.begin(), counts.end(),
                               [&](const auto& c) { return c.first == p; });
        if (it == counts.end()) {
          counts.emplace_back(p, 1);
        } else {
          ++it->second;
        }
      }
    }
    if (counts.empty()) break;
    SymbolPair best = counts[0].first;
    int64_t best_n = counts[0].second;
    for (const auto& [p, n] : counts) {
      if (n > best_n || (n == best_n && p < best)) {
        best = p;
        best_n = n;
      }
    }
    merges.push_back(best);
    for (auto& w : words) {
      std::vector<std::string> out;
      for (size_t i = 0; i < w.size(); ++i) {
        if (i + 1 < w.size() && w[i] == best.first && w[i + 1] == best.second) {
          out.push_back(best.first + best.second);
          ++i;
        } else {
          out.push_back(w[i]);
        }
      }
      w = out;
    }
  }
  return merges;
}

// Reference segmentation: apply every merge in list order.
std::vector<std::string> ReferenceSegment(const std::u32string& word,
                                          const std::vector<SymbolPair>& merges) {
  std::vector<std::string> s = SplitWord(word);
  for (const auto& m : merges) {
    std::vector<std::string> out;
    for (size_t i = 0; i < s.size(); ++i) {
      if (i + 1 < s.size() && s[i] == m.first && s[i + 1] == m.second) {
        out.push_back(m.first + m.second);
        ++i;
      } else {
        out.push_back(s[i]);
      }
    }
    s = out;
  }
  return s;
}

TEST(Bpe, FirstMergeOnRepeatedLetters) {
  const BpeModel m = TrainBpe({"aaab aaab"}, 1);
  ASSERT_EQ(m.merges().size(), 1u);
  EXPECT_EQ(m.merges()[0], SymbolPair("a", "a"));
}

TEST(Bpe, ZeroMergesKeepsBaseSymbolsOnly) {
  const BpeModel m = TrainBpe({"abc cab"}, 0);
  EXPECT_TRUE(m.merges().empty());
  EXPECT_EQ(m.Symbols(), m.base_symbols());
  const std::set<std::string> expected = {"a", "b", "c", "\xE2\x96\x81" "a",
                                          "\xE2\x96\x81" "b", "\xE2\x96\x81" "c"};
  EXPECT_EQ(std::set<std::string>(m.base_symbols().begin(), m.base_symbols().end()),
            expected);
}

TEST(Bpe, EmptyCorpusIsError) {
  EXPECT_THROW(TrainBpe({}, 5), std::invalid_argument);
  EXPECT_THROW(TrainBpe({"北京 123"}, 5), std::invalid_argument);
}

TEST(Bpe, RetrainingIsDeterministic) {
  const BpeModel a = TrainBpe(ToyCorpus(), 30);
  const BpeModel b = TrainBpe(ToyCorpus(), 30);
  EXPECT_EQ(a.merges(), b.merges());
}

TEST(Bpe, MatchesReferenceTrainerOnRandomCorpora) {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> lines;
    const int64_t n_lines = rng.UniformInt(1, 6);
    for (int64_t l = 0; l < n_lines; ++l) {
      std::string line;
      const int64_t n_words = rng.UniformInt(1, 6);
      for (int64_t w = 0; w < n_words; ++w) {
        const int64_t len = rng.UniformInt(1, 7);
        for (int64_t c = 0; c < len; ++c) {
          line += static_cast<char>('a' + rng.UniformInt(0, 3));
        }
        line += ' ';
      }
      lines.push_back(line);
    }
    const int merges = static_cast<int>(rng.UniformInt(0, 12));
    const BpeModel m = TrainBpe(lines, merges);
    ASSERT_EQ(m.merges(), ReferenceMerges(lines, merges)) << "trial " << trial;
    for (const auto& w : ExtractLatinWords(lines)) {
      EXPECT_EQ(m.Segment(w), ReferenceSegment(w, m.merges()));
    }
  }
}

TEST(Bpe, MergesTextRoundTrip) {
  const BpeModel m = TrainBpe(ToyCorpus(), 20);
  EXPECT_EQ(BpeModel::ParseMerges(m.SerializeMerges()), m.merges());
  EXPECT_THROW(BpeModel::ParseMerges("a b c\n"), std::runtime_error);
}

TEST(Tokenizer, EmptyTextEncodesToNothing) {
  const Tokenizer tok = Tokenizer::Train(ToyCorpus(), 20);
  EXPECT_TRUE(tok.Encode("").empty());
  EXPECT_EQ(tok.Decode({}), "");
}

TEST(Tokenizer, ChineseIsPerCharacter) {
  const Tokenizer tok = Tokenizer::Train(ToyCorpus(), 20);
  const std::vector<int> ids = tok.Encode("北京");
  ASSERT_EQ(ids.size(), 2u);
  EXPECT_EQ(ids[0], tok.vocab().id("北"));
  EXPECT_EQ(ids[1], tok.vocab().id("京"));
  EXPECT_NE(ids[0], kUnkId);
}

TEST(Tokenizer, MixedTextIsBpeThenCharacters) {
  const Tokenizer tok = Tokenizer::Train(ToyCorpus(), 20);
  std::vector<int> expected;
  for (const auto& piece : ReferenceSegment(U"hello", tok.bpe().merges())) {
    expected.push_back(tok.vocab().id(piece));
  }
  expected.push_back(tok.vocab().id("北"));
  expected.push_back(tok.vocab().id("京"));
  EXPECT_EQ(tok.Encode("hello 北京"), expected);
  for (int id : expected) EXPECT_NE(id, kUnkId);
}

TEST(Tokenizer, UnknownSymbolsMapToUnk) {
  const Tokenizer tok = Tokenizer::Train(ToyCorpus(), 20);
  const std::vector<int> ids = tok.Encode("猫");
  ASSERT_EQ(ids.size(), 1u);
  EXPECT_EQ(ids[0], kUnkId);
}

TEST(Tokenizer, EosTruncatesDecode) {
  const Tokenizer tok = Tokenizer::Train(ToyCorpus(), 20);
  std::vector<int> ids = tok.Encode("北京");
  const std::vector<int> tail = tok.Encode("上海");
  ids.push_back(kEosId);
  ids.insert(ids.end(), tail.begin(), tail.end());
  EXPECT_EQ(tok.Decode(ids), "北京");
}

TEST(Tokenizer, OutOfRangeIdNamesIndex) {
  const Tokenizer tok = Tokenizer::Train(ToyCorpus(), 20);
  try {
    tok.Decode({5, 6, tok.size() + 3});
    FAIL();
  } catch (const std::out_of_range& e) {
    EXPECT_NE(std::string(e.what()).find("index 2"), std::string::npos);
  }
  EXPECT_THROW(tok.Decode({-1}), std::out_of_range);
}

TEST(Tokenizer, SizeAccounting) {
  const Tokenizer tok = Tokenizer::Train(ToyCorpus(), 20);
  EXPECT_EQ(tok.size(), tok.num_bpe_symbols() + tok.num_characters() + 5);
  std::set<char32_t> chars;
  for (const auto& line : ToyCorpus()) {
    for (char32_t cp : DecodeUtf8(line)) {
      if (!IsWhitespace(cp) && !IsLatinLetter(cp)) chars.insert(cp);
    }
  }
  EXPECT_EQ(tok.num_characters(), static_cast<int>(chars.size()));
  EXPECT_EQ(1000 + 6827 + 5, 7832);
}

TEST(Tokenizer, SpecialsAreFixed) {
  const Tokenizer tok = Tokenizer::Train(ToyCorpus(), 10);
  EXPECT_EQ(tok.vocab().token(kPadId), "<pad>");
  EXPECT_EQ(tok.vocab().token(kSosId), "<sos>");
  EXPECT_EQ(tok.vocab().token(kEosId), "<eos>");
  EXPECT_EQ(tok.vocab().token(kUnkId), "<unk>");
  EXPECT_EQ(tok.vocab().token(kBlankId), "<blank>");
}

TEST(Tokenizer, VocabularyIsBijection) {
  const Tokenizer tok = Tokenizer::Train(ToyCorpus(), 40);
  for (int id = 0; id < tok.size(); ++id) {
    EXPECT_EQ(tok.vocab().id(tok.vocab().token(id)), id);
  }
  EXPECT_THROW(Vocabulary({"a", "a"}), std::invalid_argument);
}

std::string RandomInVocabText(Rng& rng) {
  static const std::vector<std::string> cjk = {"北", "京", "你", "好", "上",
                                               "海", "大", "学", "世", "界"};
  static const std::vector<std::string> latin = {
      "hello", "world", "the", "low", "lower", "web", "help", "wide", "ow", "e"};
  std::string out;
  const int64_t n = rng.UniformInt(0, 8);
  bool prev_latin = false;
  for (int64_t i = 0; i < n; ++i) {
    if (rng.Bernoulli(0.5)) {
      if (prev_latin) out += ' ';
      out += latin[static_cast<size_t>(rng.UniformInt(0, 9))];
      prev_latin = true;
    } else {
      out += cjk[static_cast<size_t>(rng.UniformInt(0, 9))];
      prev_latin = false;
    }
  }
  return out;
}

TEST(Tokenizer, RoundTripPropertyAndNoSpecials) {
  const Tokenizer tok = Tokenizer::Train(ToyCorpus(), 40);
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    const std::string text = RandomInVocabText(rng);
    const std::vector<int> ids = tok.Encode(text);
    for (int id : ids) {
      EXPECT_NE(id, kPadId);
      EXPECT_NE(id, kSosId);
      EXPECT_NE(id, kEosId);
      EXPECT_NE(id, kBlankId);
      EXPECT_NE(id, kUnkId) << text;
    }
    EXPECT_EQ(tok.Decode(ids), text);
  }
}

TEST(Tokenizer, RoundTripNormalizesSpaces) {
  const Tokenizer tok = Tokenizer::Train(ToyCorpus(), 40);
  EXPECT_EQ(tok.Decode(tok.Encode("  hello   world ")), "hello world");
  EXPECT_EQ(tok.Decode(tok.Encode("hello 北京 world")), "hello北京world");
}

TEST(Tokenizer, SaveLoadPreservesEncoding) {
  const Tokenizer tok = Tokenizer::Train(ToyCorpus(), 40);
  const Tokenizer back = Tokenizer::FromStrings(tok.vocab().Serialize(),
                                                tok.bpe().SerializeMerges());
  EXPECT_EQ(back.vocab().tokens(), tok.vocab().tokens());
  EXPECT_EQ(back.num_bpe_symbols(), tok.num_bpe_symbols());
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    const std::string text = RandomInVocabText(rng);
    EXPECT_EQ(back.Encode(text), tok.Encode(text));
  }
  EXPECT_THROW(Vocabulary::Parse("<pad>\n<sos>\n"), std::runtime_error);
}

TEST(Unicode, Classes) {
  EXPECT_TRUE(IsCjk(U'北'));
  EXPECT_FALSE(IsCjk(U'a'));
  EXPECT_TRUE(IsLatinLetter(U'Z'));
  EXPECT_TRUE(IsLatinLetter(U'é'));
  EXPECT_FALSE(IsLatinLetter(U'1'));
  EXPECT_TRUE(IsAsciiDigit(U'7'));
  EXPECT_TRUE(IsPunctuation(U'，'));
  EXPECT_TRUE(IsWhitespace(U'　'));
  EXPECT_EQ(EncodeUtf8(DecodeUtf8("a北€")), "a北€");
}

}  // namespace
}  // namespace deskasr::tokenizer
