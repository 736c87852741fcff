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

#ifndef DESKASR_LLM_LLM_ASR_H_
#define DESKASR_LLM_LLM_ASR_H_

#include <span>
#include <string>
#include <vector>

#include "aed/beam_search.h"
#include "encoder/encoder.h"
#include "encoder/utterance.h"
#include "llm/adapter.h"
#include "llm/assembly.h"
#include "llm/stand_in_lm.h"

namespace deskasr::llm {

using encoder::Utterance;

template <typename T>
struct LlmForwardResult {
  AssembledSequence<T> sequence;
  Tensor<T> logits;  // [total_length x vocab]
};

// Encoder -> frame-splicing adapter -> decoder-only LM with LoRA.
template <typename T>
class LlmAsrModel {
 public:
  LlmAsrModel() = default;
  LlmAsrModel(const encoder::EncoderConfig& enc, const AdapterConfig& adapter,
              const LmConfig& lm, PromptSpec prompt, Rng& rng, int sos = 1,
              int eos = 2);

  // E_S for one utterance.
  Tensor<T> SpeechEmbeddings(const Tensor<T>& features,
                             const ForwardContext& ctx) const;
  LlmForwardResult<T> Forward(const Utterance<T>& utt,
                              const ForwardContext& ctx) const;
  // Masked cross-entropy averaged over all transcript positions in the
  // batch (each transcript plus its eos).
  Tensor<T> Loss(std::span<const Utterance<T>> batch,
                 const ForwardContext& ctx) const;

  // Next-token prediction from (E_P, E_S); beam 1 is greedy.
  aed::BeamSearchResult Generate(const Tensor<T>& features,
                                 const aed::BeamSearchOptions& opts) const;

  // Encoder and adapter stay trainable, LM base weights are frozen, LoRA
  // adapters train.
  void ApplyTrainabilityPolicy() { lm_.FreezeBase(); }

  void Collect(ParameterList<T>& out) const;
  void CollectTrainable(ParameterList<T>& out) const;
  void CollectFrozen(ParameterList<T>& out) const;

  const encoder::Encoder<T>& encoder() const { return encoder_; }
  const Adapter<T>& adapter() const { return adapter_; }
  const StandInLm<T>& lm() const { return lm_; }
  StandInLm<T>& lm() { return lm_; }
  const PromptSpec& prompt() const { return prompt_; }
  void set_lora_enabled(bool v) { lora_enabled_ = v; }
  bool lora_enabled() const { return lora_enabled_; }
  int sos() const { return sos_; }
  int eos() const { return eos_; }

 private:
  encoder::Encoder<T> encoder_;
  Adapter<T> adapter_;
  StandInLm<T> lm_;
  PromptSpec prompt_;
  int sos_ = 1;
  int eos_ = 2;
  bool lora_enabled_ = true;
};

extern template class LlmAsrModel<float>;
extern template class LlmAsrModel<double>;

}  // namespace deskasr::llm

#endif  // DESKASR_LLM_LLM_ASR_H_
