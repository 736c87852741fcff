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

#include "eval/metrics.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "tokenizer/unicode.h"

namespace deskasr::eval {

namespace tk = deskasr::tokenizer;

Unit ParseUnit(std::string_view name) {
  if (name == "char") return Unit::kChar;
  if (name == "word") return Unit::kWord;
  throw std::invalid_argument("unknown unit '" + std::string(name) +
                              "' (expected char or word)");
}

const char* UnitName(Unit unit) { return unit == Unit::kChar ? "char" : "word"; }

std::vector<std::string> CharUnits(std::string_view text) {
  std::vector<std::string> units;
  for (char32_t cp : tk::DecodeUtf8(text)) {
    if (tk::IsWhitespace(cp) || tk::IsPunctuation(cp)) continue;
    units.push_back(tk::EncodeUtf8(cp));
  }
  return units;
}

std::vector<std::string> WordUnits(std::string_view text) {
  std::vector<std::string> units;
  std::u32string word;
  const auto flush = [&] {
    if (!word.empty()) units.push_back(tk::EncodeUtf8(word));
    word.clear();
  };
  for (char32_t cp : tk::DecodeUtf8(text)) {
    if (tk::IsWhitespace(cp)) {
      flush();
    } else {
      word.push_back(cp >= U'A' && cp <= U'Z' ? cp - U'A' + U'a' : cp);
    }
  }
  flush();
  return units;
}

std::vector<std::string> Units(std::string_view text, Unit unit) {
  return unit == Unit::kChar ? CharUnits(text) : WordUnits(text);
}

ScoredPair ScorePair(std::string reference, std::string hypothesis, Unit unit) {
  ScoredPair p;
  p.counts = EditDistance(Units(reference, unit), Units(hypothesis, unit));
  p.reference = std::move(reference);
  p.hypothesis = std::move(hypothesis);
  return p;
}

EditCounts Totals(std::span<const ScoredPair> pairs) {
  EditCounts t;
  for (const ScoredPair& p : pairs) t += p.counts;
  return t;
}

double ErrorRate(const EditCounts& totals) {
  if (totals.ref_len <= 0) {
    throw std::invalid_argument("empty reference corpus");
  }
  return 100.0 * static_cast<double>(totals.distance()) /
         static_cast<double>(totals.ref_len);
}

double ErrorRate(std::span<const ScoredPair> pairs) {
  return ErrorRate(Totals(pairs));
}

double AverageN(std::span<const double> rates) {
  if (rates.empty()) throw std::invalid_argument("average of an empty list");
  double sum = 0.0;
  for (double r : rates) sum += r;
  return sum / static_cast<double>(rates.size());
}

double Cerr(double baseline, double ours) {
  if (baseline == 0.0) throw std::invalid_argument("CERR baseline is zero");
  return 100.0 * (baseline - ours) / baseline;
}

double RoundHalfUp(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double snapped = std::round(value * scale * 1e6) / 1e6;
  return std::floor(snapped + 0.5) / scale;
}

std::string FormatFixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals,
                RoundHalfUp(value, decimals));
  return buf;
}

}  // namespace deskasr::eval
