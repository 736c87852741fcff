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

#ifndef DESKASR_TOKENIZER_TOKENIZER_H_
#define DESKASR_TOKENIZER_TOKENIZER_H_

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tokenizer/bpe.h"

namespace deskasr::tokenizer {

inline constexpr int kPadId = 0;
inline constexpr int kSosId = 1;
inline constexpr int kEosId = 2;
inline constexpr int kUnkId = 3;
inline constexpr int kBlankId = 4;
inline constexpr int kNumSpecials = 5;

const std::vector<std::string>& SpecialTokens();

class Vocabulary {
 public:
  Vocabulary();
  // Specials first, then `tokens` in the given order (duplicates rejected).
  explicit Vocabulary(const std::vector<std::string>& tokens);

  int size() const { return static_cast<int>(id_to_token_.size()); }
  const std::string& token(int id) const;
  // kUnkId when absent.
  int id(const std::string& token) const;
  bool contains(const std::string& token) const {
    return token_to_id_.count(token) != 0;
  }
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  std::string Serialize() const;
  static Vocabulary Parse(const std::string& text);

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

// Characters become single tokens; Latin letter runs go through BPE.
class Tokenizer {
 public:
  Tokenizer() = default;
  Tokenizer(Vocabulary vocab, BpeModel bpe);

  // BPE over the Latin words of `lines` (skipped when there are none), plus
  // every other non-space character as an atomic token.
  static Tokenizer Train(const std::vector<std::string>& lines,
                         int num_merges);

  std::vector<int> Encode(std::string_view text) const;
  // Stops at eos; throws std::out_of_range naming the offending index.
  std::string Decode(const std::vector<int>& ids) const;

  const Vocabulary& vocab() const { return vocab_; }
  const BpeModel& bpe() const { return bpe_; }
  int size() const { return vocab_.size(); }
  int num_bpe_symbols() const { return num_bpe_; }
  int num_characters() const { return size() - num_bpe_ - kNumSpecials; }

  void Save(const std::string& vocab_path, const std::string& merges_path) const;
  static Tokenizer Load(const std::string& vocab_path,
                        const std::string& merges_path);
  static Tokenizer FromStrings(const std::string& vocab_text,
                               const std::string& merges_text);

 private:
  Vocabulary vocab_;
  BpeModel bpe_;
  int num_bpe_ = 0;
};

}  // namespace deskasr::tokenizer

#endif  // DESKASR_TOKENIZER_TOKENIZER_H_
