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

#include "tokenizer/tokenizer.h"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tokenizer/unicode.h"

namespace deskasr::tokenizer {

namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
}

bool EndsWithLatin(const std::string& s) {
  if (s.empty()) return false;
  size_t i = s.size() - 1;
  while (i > 0 && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) --i;
  const std::u32string last = DecodeUtf8(std::string_view(s).substr(i));
  return !last.empty() && IsLatinLetter(last.back());
}

}  // namespace

const std::vector<std::string>& SpecialTokens() {
  static const std::vector<std::string> specials = {
      "<pad>", "<sos>", "<eos>", "<unk>", "<blank>"};
  return specials;
}

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) {
  id_to_token_ = SpecialTokens();
  id_to_token_.insert(id_to_token_.end(), tokens.begin(), tokens.end());
  for (size_t i = 0; i < id_to_token_.size(); ++i) {
    const std::string& t = id_to_token_[i];
    if (t.empty() || t.find('\n') != std::string::npos) {
      throw std::invalid_argument("vocabulary token " + std::to_string(i) +
                                  " is empty or contains a newline");
    }
    if (!token_to_id_.emplace(t, static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate vocabulary token '" + t + "'");
    }
  }
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) {
    throw std::out_of_range("token id " + std::to_string(id) +
                            " outside vocabulary of size " +
                            std::to_string(size()));
  }
  return id_to_token_[static_cast<size_t>(id)];
}

int Vocabulary::id(const std::string& token) const {
  const auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnkId : it->second;
}

std::string Vocabulary::Serialize() const {
  std::string out;
  for (const std::string& t : id_to_token_) out += t + "\n";
  return out;
}

Vocabulary Vocabulary::Parse(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  const auto& specials = SpecialTokens();
  if (lines.size() < specials.size()) {
    throw std::runtime_error("vocabulary file lacks the special tokens");
  }
  for (size_t i = 0; i < specials.size(); ++i) {
    if (lines[i] != specials[i]) {
      throw std::runtime_error("vocabulary line " + std::to_string(i + 1) +
                               ": expected " + specials[i]);
    }
  }
  return Vocabulary(std::vector<std::string>(
      lines.begin() + static_cast<std::ptrdiff_t>(specials.size()),
      lines.end()));
}

Tokenizer::Tokenizer(Vocabulary vocab, BpeModel bpe)
    : vocab_(std::move(vocab)), bpe_(std::move(bpe)) {
  for (const std::string& s : bpe_.Symbols()) {
    if (vocab_.contains(s)) ++num_bpe_;
  }
}

Tokenizer Tokenizer::Train(const std::vector<std::string>& lines,
                           int num_merges) {
  BpeModel bpe;
  if (!ExtractLatinWords(lines).empty()) bpe = TrainBpe(lines, num_merges);
  std::vector<std::string> tokens = bpe.Symbols();
  std::set<char32_t> chars;
  for (const std::string& line : lines) {
    for (char32_t cp : DecodeUtf8(line)) {
      if (!IsWhitespace(cp) && !IsLatinLetter(cp)) chars.insert(cp);
    }
  }
  for (char32_t cp : chars) tokens.push_back(EncodeUtf8(cp));
  return Tokenizer(Vocabulary(tokens), std::move(bpe));
}

std::vector<int> Tokenizer::Encode(std::string_view text) const {
  std::vector<int> ids;
  std::u32string run;
  const auto flush = [&] {
    if (run.empty()) return;
    for (const std::string& piece : bpe_.Segment(run)) {
      ids.push_back(vocab_.id(piece));
    }
    run.clear();
  };
  for (char32_t cp : DecodeUtf8(text)) {
    if (IsLatinLetter(cp)) {
      run.push_back(cp);
      continue;
    }
    flush();
    if (!IsWhitespace(cp)) ids.push_back(vocab_.id(EncodeUtf8(cp)));
  }
  flush();
  return ids;
}

std::string Tokenizer::Decode(const std::vector<int>& ids) const {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    const int id = ids[i];
    if (id < 0 || id >= vocab_.size()) {
      throw std::out_of_range("token id " + std::to_string(id) +
                              " at index " + std::to_string(i) +
                              " outside vocabulary of size " +
                              std::to_string(vocab_.size()));
    }
    if (id == kEosId) break;
    if (id == kPadId || id == kSosId || id == kBlankId) continue;
    std::string piece = vocab_.token(id);
    if (piece.compare(0, kWordStart.size(), kWordStart) == 0) {
      piece.erase(0, kWordStart.size());
      if (EndsWithLatin(out)) out += ' ';
    }
    out += piece;
  }
  return out;
}

void Tokenizer::Save(const std::string& vocab_path,
                     const std::string& merges_path) const {
  WriteFile(vocab_path, vocab_.Serialize());
  WriteFile(merges_path, bpe_.SerializeMerges());
}

Tokenizer Tokenizer::FromStrings(const std::string& vocab_text,
                                 const std::string& merges_text) {
  Vocabulary vocab = Vocabulary::Parse(vocab_text);
  std::vector<SymbolPair> merges = BpeModel::ParseMerges(merges_text);
  // Base symbols are the single-letter entries (with or without the marker).
  std::vector<std::string> base;
  for (const std::string& t : vocab.tokens()) {
    std::string_view v = t;
    const bool marked = v.substr(0, kWordStart.size()) == kWordStart;
    if (marked) v.remove_prefix(kWordStart.size());
    const std::u32string cps = DecodeUtf8(v);
    if (cps.size() == 1 && IsLatinLetter(cps[0])) base.push_back(t);
  }
  return Tokenizer(std::move(vocab), BpeModel(std::move(base), std::move(merges)));
}

Tokenizer Tokenizer::Load(const std::string& vocab_path,
                          const std::string& merges_path) {
  return FromStrings(ReadFile(vocab_path), ReadFile(merges_path));
}

}  // namespace deskasr::tokenizer
