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

#ifndef DESKASR_LLM_ASSEMBLY_H_
#define DESKASR_LLM_ASSEMBLY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "llm/stand_in_lm.h"

namespace deskasr::llm {

struct PromptSpec {
  std::string text;
  std::vector<int> ids;  // text tokenized with the LM vocabulary

  void Validate() const;
};

template <typename T>
struct AssembledSequence {
  Tensor<T> embeddings;  // (E_P, E_S, E_T) along time
  int64_t prompt_len = 0;
  int64_t speech_len = 0;
  int64_t transcript_len = 0;
  // Training only, one entry per position. Position p predicts targets[p];
  // the mask is set from the last speech position through the last
  // transcript position (transcript tokens, then eos).
  std::vector<uint8_t> loss_mask;
  std::vector<int> targets;

  int64_t total_length() const {
    return prompt_len + speech_len + transcript_len;
  }
};

// With a transcript: training layout and loss mask. Without: inference
// layout (E_P, E_S) and no mask.
template <typename T>
AssembledSequence<T> Assemble(const StandInLm<T>& lm, const PromptSpec& prompt,
                              const Tensor<T>& speech,
                              std::optional<std::span<const int>> transcript,
                              int eos);

extern template AssembledSequence<float> Assemble(
    const StandInLm<float>&, const PromptSpec&, const Tensor<float>&,
    std::optional<std::span<const int>>, int);
extern template AssembledSequence<double> Assemble(
    const StandInLm<double>&, const PromptSpec&, const Tensor<double>&,
    std::optional<std::span<const int>>, int);

}  // namespace deskasr::llm

#endif  // DESKASR_LLM_ASSEMBLY_H_
