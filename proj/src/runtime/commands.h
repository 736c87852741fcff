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

#ifndef DESKASR_RUNTIME_COMMANDS_H_
#define DESKASR_RUNTIME_COMMANDS_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eval/report.h"
#include "runtime/config.h"
#include "runtime/engine.h"

namespace deskasr::runtime {

struct WavListEntry {
  std::string utt_id;
  std::string wav_path;
};

// `utt_id<TAB>wav_path[<TAB>transcript]` or a bare path per line (the id is
// then the file stem). Relative paths resolve against the list's directory.
std::vector<WavListEntry> ParseWavList(const std::string& text,
                                       const std::string& base_dir);
std::vector<WavListEntry> ReadWavList(const std::string& path);

struct DecodeFailure {
  std::string utt_id;
  std::string message;
};

struct DecodeListResult {
  std::vector<std::pair<std::string, std::string>> hypotheses;  // input order
  std::vector<DecodeFailure> failures;

  std::string FormatHypotheses() const;  // utt_id<TAB>hypothesis lines
};

DecodeListResult DecodeList(const Engine& engine,
                            const std::vector<WavListEntry>& list,
                            const DecodeConfig& opts);

// Throws ConfigError when the reference corpus is empty. Warnings about
// mismatched ids are appended to `warnings`.
eval::ScoreReport ScoreFiles(const std::string& ref_path,
                             const std::string& hyp_path, eval::Unit unit,
                             const std::optional<std::string>& baseline_path,
                             std::string* warnings);

std::string InspectCheckpoint(const std::string& path);

// Analytic counts per component; desk presets are also enumerated.
std::string CountParamsReport(const RunConfig& cfg);

}  // namespace deskasr::runtime

#endif  // DESKASR_RUNTIME_COMMANDS_H_
