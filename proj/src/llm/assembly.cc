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

#include "llm/assembly.h"

#include <stdexcept>

namespace deskasr::llm {

void PromptSpec::Validate() const {
  if (ids.empty()) throw std::invalid_argument("prompt must not be empty");
}

template <typename T>
AssembledSequence<T> Assemble(const StandInLm<T>& lm, const PromptSpec& prompt,
                              const Tensor<T>& speech,
                              std::optional<std::span<const int>> transcript,
                              int eos) {
  prompt.Validate();
  if (speech.rank() != 2 || speech.cols() != lm.config().d_model) {
    throw numerics::ShapeError("assemble: speech embeddings must be [n x " +
                               std::to_string(lm.config().d_model) + "]");
  }
  AssembledSequence<T> seq;
  seq.prompt_len = static_cast<int64_t>(prompt.ids.size());
  seq.speech_len = speech.rows();
  std::vector<Tensor<T>> parts = {lm.Embed(prompt.ids), speech};
  if (transcript.has_value()) {
    seq.transcript_len = static_cast<int64_t>(transcript->size());
    if (seq.transcript_len > 0) parts.push_back(lm.Embed(*transcript));
    const int64_t n = seq.total_length();
    seq.loss_mask.assign(static_cast<size_t>(n), 0);
    seq.targets.assign(static_cast<size_t>(n), 0);
    const int64_t first = seq.prompt_len + seq.speech_len - 1;
    for (int64_t i = 0; i <= seq.transcript_len; ++i) {
      const auto p = static_cast<size_t>(first + i);
      seq.loss_mask[p] = 1;
      seq.targets[p] =
          i < seq.transcript_len ? (*transcript)[static_cast<size_t>(i)] : eos;
    }
  }
  seq.embeddings = numerics::ConcatRows<T>(parts);
  return seq;
}

template AssembledSequence<float> Assemble(
    const StandInLm<float>&, const PromptSpec&, const Tensor<float>&,
    std::optional<std::span<const int>>, int);
template AssembledSequence<double> Assemble(
    const StandInLm<double>&, const PromptSpec&, const Tensor<double>&,
    std::optional<std::span<const int>>, int);

}  // namespace deskasr::llm
