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

#ifndef DESKASR_TOKENIZER_UNICODE_H_
#define DESKASR_TOKENIZER_UNICODE_H_

#include <string>
#include <string_view>
#include <vector>

namespace deskasr::tokenizer {

// Throws std::invalid_argument on malformed UTF-8.
std::u32string DecodeUtf8(std::string_view text);
std::string EncodeUtf8(char32_t cp);
std::string EncodeUtf8(std::u32string_view cps);

bool IsWhitespace(char32_t cp);
// CJK unified ideographs (all extensions) and compatibility ideographs.
bool IsCjk(char32_t cp);
// ASCII letters plus Latin-1 Supplement / Latin Extended-A/B letters.
bool IsLatinLetter(char32_t cp);
bool IsAsciiDigit(char32_t cp);
// ASCII and CJK/full-width punctuation blocks and general punctuation.
bool IsPunctuation(char32_t cp);

}  // namespace deskasr::tokenizer

#endif  // DESKASR_TOKENIZER_UNICODE_H_
