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

#ifndef DESKASR_RUNTIME_PARAM_COUNT_H_
#define DESKASR_RUNTIME_PARAM_COUNT_H_

#include <cstdint>
#include <string>

#include "nn/parameter.h"
#include "runtime/config.h"

namespace deskasr::runtime {

// Parameter totals per named component.
struct ParamCounts {
  int64_t encoder = 0;
  int64_t decoder = 0;
  int64_t adapter = 0;
  int64_t lm_base = 0;
  int64_t lora = 0;

  int64_t total() const { return encoder + decoder + adapter + lm_base + lora; }
  bool operator==(const ParamCounts&) const = default;
};

// Vocabulary sizes assumed when no tokenizer has been trained yet.
int64_t NominalVocab(const RunConfig& cfg);
int64_t NominalLmVocab(const RunConfig& cfg);

// Closed-form counts from layer shapes; nothing is allocated.
ParamCounts AnalyticCounts(const RunConfig& cfg, int64_t vocab);

// Builds the model and sums the allocated tensors by name prefix.
ParamCounts EnumeratedCounts(const RunConfig& cfg, int64_t vocab);

template <typename T>
ParamCounts Tally(const nn::ParameterList<T>& params);

std::string FormatCounts(const ParamCounts& c, ModelKind kind);

}  // namespace deskasr::runtime

#endif  // DESKASR_RUNTIME_PARAM_COUNT_H_
