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

#include "tokenizer/bpe.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tokenizer/unicode.h"

namespace deskasr::tokenizer {

namespace {

void MergeInPlace(std::vector<std::string>& symbols, const SymbolPair& pair) {
  std::vector<std::string> out;
  out.reserve(symbols.size());
  for (size_t i = 0; i < symbols.size(); ++i) {
    if (i + 1 < symbols.size() && symbols[i] == pair.first &&
        symbols[i + 1] == pair.second) {
      out.push_back(pair.first + pair.second);
      ++i;
    } else {
      out.push_back(symbols[i]);
    }
  }
  symbols = std::move(out);
}

}  // namespace

BpeModel::BpeModel(std::vector<std::string> base_symbols,
                   std::vector<SymbolPair> merges)
    : base_(std::move(base_symbols)), merges_(std::move(merges)) {
  std::sort(base_.begin(), base_.end());
  base_.erase(std::unique(base_.begin(), base_.end()), base_.end());
  for (size_t i = 0; i < merges_.size(); ++i) rank_.emplace(merges_[i], i);
}

std::vector<std::string> SplitWord(std::u32string_view word) {
  std::vector<std::string> symbols;
  symbols.reserve(word.size());
  for (size_t i = 0; i < word.size(); ++i) {
    std::string s = EncodeUtf8(word[i]);
    symbols.push_back(i == 0 ? std::string(kWordStart) + s : s);
  }
  return symbols;
}

std::vector<std::string> BpeModel::Segment(std::u32string_view word) const {
  std::vector<std::string> symbols = SplitWord(word);
  while (symbols.size() > 1) {
    size_t best = merges_.size();
    for (size_t i = 0; i + 1 < symbols.size(); ++i) {
      const auto it = rank_.find({symbols[i], symbols[i + 1]});
      if (it != rank_.end() && it->second < best) best = it->second;
    }
    if (best == merges_.size()) break;
    MergeInPlace(symbols, merges_[best]);
  }
  return symbols;
}

std::vector<std::string> BpeModel::Symbols() const {
  std::vector<std::string> out = base_;
  std::set<std::string> seen(base_.begin(), base_.end());
  for (const SymbolPair& m : merges_) {
    std::string s = m.first + m.second;
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

std::string BpeModel::SerializeMerges() const {
  std::string out;
  for (const SymbolPair& m : merges_) out += m.first + " " + m.second + "\n";
  return out;
}

std::vector<SymbolPair> BpeModel::ParseMerges(const std::string& text) {
  std::vector<SymbolPair> merges;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0 || sp + 1 >= line.size() ||
        line.find(' ', sp + 1) != std::string::npos) {
      throw std::runtime_error("merges line " + std::to_string(line_no) +
                               ": expected two space-separated symbols");
    }
    merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
  }
  return merges;
}

std::vector<std::u32string> ExtractLatinWords(
    const std::vector<std::string>& lines) {
  std::vector<std::u32string> words;
  for (const std::string& line : lines) {
    std::u32string run;
    for (char32_t cp : DecodeUtf8(line)) {
      if (IsLatinLetter(cp)) {
        run.push_back(cp);
      } else if (!run.empty()) {
        words.push_back(std::move(run));
        run.clear();
      }
    }
    if (!run.empty()) words.push_back(std::move(run));
  }
  return words;
}

BpeModel TrainBpe(const std::vector<std::string>& lines, int num_merges) {
  if (num_merges < 0) throw std::invalid_argument("num_merges must be >= 0");
  std::map<std::u32string, int64_t> freq;
  for (auto& w : ExtractLatinWords(lines)) ++freq[w];
  if (freq.empty()) {
    throw std::invalid_argument("BPE training corpus has no Latin-script words");
  }
  std::vector<std::pair<std::vector<std::string>, int64_t>> words;
  std::set<std::string> base;
  for (const auto& [w, n] : freq) {
    words.emplace_back(SplitWord(w), n);
    // Both the word-initial and the inner form of every letter, so any word
    // over the seen alphabet segments without unknown pieces.
    for (char32_t cp : w) {
      base.insert(EncodeUtf8(cp));
      base.insert(std::string(kWordStart) + EncodeUtf8(cp));
    }
  }
  std::vector<SymbolPair> merges;
  for (int step = 0; step < num_merges; ++step) {
    std::map<SymbolPair, int64_t> counts;
    for (const auto& [symbols, n] : words) {
      for (size_t i = 0; i + 1 < symbols.size(); ++i) {
        counts[{symbols[i], symbols[i + 1]}] += n;
      }
    }
    if (counts.empty()) break;
    // std::map iterates pairs in lexicographic order, so the first maximum
    // is the tie-break winner.
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    merges.push_back(best->first);
    for (auto& entry : words) MergeInPlace(entry.first, best->first);
  }
  return BpeModel({base.begin(), base.end()}, std::move(merges));
}

}  // namespace deskasr::tokenizer
