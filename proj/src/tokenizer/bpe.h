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

#ifndef DESKASR_TOKENIZER_BPE_H_
#define DESKASR_TOKENIZER_BPE_H_

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace deskasr::tokenizer {

// Prefixed to the first symbol of every word (U+2581).
inline constexpr std::string_view kWordStart = "\xE2\x96\x81";

using SymbolPair = std::pair<std::string, std::string>;

class BpeModel {
 public:
  BpeModel() = default;
  BpeModel(std::vector<std::string> base_symbols,
           std::vector<SymbolPair> merges);

  // Symbols of `word` after applying merges by rank.
  std::vector<std::string> Segment(std::u32string_view word) const;

  const std::vector<std::string>& base_symbols() const { return base_; }
  const std::vector<SymbolPair>& merges() const { return merges_; }
  // Base symbols followed by merge products in merge order, deduplicated.
  std::vector<std::string> Symbols() const;

  std::string SerializeMerges() const;
  static std::vector<SymbolPair> ParseMerges(const std::string& text);

 private:
  std::vector<std::string> base_;
  std::vector<SymbolPair> merges_;
  std::map<SymbolPair, size_t> rank_;
};

// Initial symbol split of a Latin word: one symbol per letter, the first one
// carrying the word-start marker.
std::vector<std::string> SplitWord(std::u32string_view word);

// Maximal runs of Latin letters in each line.
std::vector<std::u32string> ExtractLatinWords(const std::vector<std::string>& lines);

// Greedy pair merging by weighted frequency; ties go to the
// lexicographically smallest pair. Throws on a corpus without Latin words.
BpeModel TrainBpe(const std::vector<std::string>& lines, int num_merges);

}  // namespace deskasr::tokenizer

#endif  // DESKASR_TOKENIZER_BPE_H_
