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

#ifndef DESKASR_EVAL_METRICS_H_
#define DESKASR_EVAL_METRICS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eval/edit_distance.h"

namespace deskasr::eval {

enum class Unit { kChar, kWord };

Unit ParseUnit(std::string_view name);
const char* UnitName(Unit unit);

// Version tag of the text normalization below; reported with every score.
inline constexpr const char* kNormalizationVersion = "norm-v1";

// Character units: code points with whitespace and punctuation removed.
std::vector<std::string> CharUnits(std::string_view text);
// Word units: ASCII-lowercased, split on whitespace.
std::vector<std::string> WordUnits(std::string_view text);
std::vector<std::string> Units(std::string_view text, Unit unit);

struct ScoredPair {
  std::string reference;
  std::string hypothesis;
  EditCounts counts;
};

ScoredPair ScorePair(std::string reference, std::string hypothesis, Unit unit);

// 100 * total edits / total reference units. Throws std::invalid_argument
// when the reference corpus is empty.
double ErrorRate(std::span<const ScoredPair> pairs);
double ErrorRate(const EditCounts& totals);
EditCounts Totals(std::span<const ScoredPair> pairs);

// Arithmetic mean, full precision.
double AverageN(std::span<const double> rates);
// Relative reduction 100 * (baseline - ours) / baseline, full precision.
double Cerr(double baseline, double ours);

// Half-up rounding for display. The value is first snapped to 6 extra
// decimals so that binary representation error (3.045 stored as
// 3.04499999...) does not flip the rounding direction.
double RoundHalfUp(double value, int decimals);
std::string FormatFixed(double value, int decimals);

}  // namespace deskasr::eval

#endif  // DESKASR_EVAL_METRICS_H_
