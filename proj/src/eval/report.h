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

#ifndef DESKASR_EVAL_REPORT_H_
#define DESKASR_EVAL_REPORT_H_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eval/metrics.h"

namespace deskasr::eval {

// `utt_id<TAB>text` per line, UTF-8; text may be empty. Order preserved.
// Manifest lines `utt_id<TAB>wav<TAB>text` are read as `utt_id<TAB>text`.
using UttList = std::vector<std::pair<std::string, std::string>>;

UttList ParseUttList(const std::string& text, const std::string& origin = "");
UttList ReadUttList(const std::string& path);

struct CorpusScore {
  Unit unit = Unit::kChar;
  std::vector<std::string> ids;  // scored ids, reference order
  std::vector<ScoredPair> pairs;
  EditCounts totals;
  double rate = 0.0;
  std::vector<std::string> missing_in_hyp;  // in reference only
  std::vector<std::string> missing_in_ref;  // in hypothesis only
};

// Scores the intersection of the two id sets.
CorpusScore ScoreCorpus(const UttList& ref, const UttList& hyp, Unit unit);

struct ScoreReport {
  CorpusScore score;
  std::optional<CorpusScore> baseline;
  std::optional<double> cerr;  // relative reduction vs the baseline
};

std::string FormatHuman(const ScoreReport& r);
// One `key=value` pair per line.
std::string FormatMachine(const ScoreReport& r);

// Aggregate table: header `system<TAB>set1<TAB>...`, one row per system
// with per-set rates in percent.
struct BenchmarkRow {
  std::string system;
  std::vector<double> rates;
  double average = 0.0;
};

struct BenchmarkTable {
  std::vector<std::string> sets;
  std::vector<BenchmarkRow> rows;
  std::optional<std::string> baseline;
  // Per-row relative reduction of the average against the baseline row.
  std::map<std::string, double> cerr;
};

BenchmarkTable ParseTable(const std::string& text);
BenchmarkTable ReadTable(const std::string& path);
void ComputeTable(BenchmarkTable& table,
                  const std::optional<std::string>& baseline);
std::string FormatTableHuman(const BenchmarkTable& t);
std::string FormatTableMachine(const BenchmarkTable& t);

}  // namespace deskasr::eval

#endif  // DESKASR_EVAL_REPORT_H_
