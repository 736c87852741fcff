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

#include "llm/llm_asr.h"

#include <stdexcept>

namespace deskasr::llm {

template <typename T>
LlmAsrModel<T>::LlmAsrModel(const encoder::EncoderConfig& enc,
                            const AdapterConfig& adapter, const LmConfig& lm,
                            PromptSpec prompt, Rng& rng, int sos, int eos)
    : encoder_(enc, rng),
      adapter_(adapter, rng),
      lm_(lm, rng),
      prompt_(std::move(prompt)),
      sos_(sos),
      eos_(eos) {
  if (adapter.encoder_dim != enc.d_model) {
    throw std::invalid_argument("adapter input width differs from encoder");
  }
  if (adapter.out_dim != lm.d_model) {
    throw std::invalid_argument("adapter output width differs from the LM");
  }
  prompt_.Validate();
  for (int id : prompt_.ids) {
    if (id < 0 || id >= lm.vocab_size) {
      throw std::invalid_argument("prompt token outside the LM vocabulary");
    }
  }
}

template <typename T>
Tensor<T> LlmAsrModel<T>::SpeechEmbeddings(const Tensor<T>& features,
                                           const ForwardContext& ctx) const {
  const auto enc = encoder_.Forward(features, ctx);
  return adapter_.Forward(enc.states, enc.valid_length);
}

template <typename T>
LlmForwardResult<T> LlmAsrModel<T>::Forward(const Utterance<T>& utt,
                                            const ForwardContext& ctx) const {
  if (utt.targets.empty()) {
    throw std::invalid_argument("utterance with empty target sequence");
  }
  LlmForwardResult<T> r;
  r.sequence = Assemble(lm_, prompt_, SpeechEmbeddings(utt.features, ctx),
                        std::span<const int>(utt.targets), eos_);
  r.logits = lm_.Forward(r.sequence.embeddings, ctx, lora_enabled_);
  return r;
}

template <typename T>
Tensor<T> LlmAsrModel<T>::Loss(std::span<const Utterance<T>> batch,
                               const ForwardContext& ctx) const {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::vector<Tensor<T>> logits;
  std::vector<int> targets;
  std::vector<uint8_t> mask;
  for (const Utterance<T>& u : batch) {
    LlmForwardResult<T> r = Forward(u, ctx);
    logits.push_back(r.logits);
    targets.insert(targets.end(), r.sequence.targets.begin(),
                   r.sequence.targets.end());
    mask.insert(mask.end(), r.sequence.loss_mask.begin(),
                r.sequence.loss_mask.end());
  }
  const Tensor<T> all =
      logits.size() == 1 ? logits[0] : numerics::ConcatRows<T>(logits);
  return numerics::CrossEntropy(all, targets, mask);
}

template <typename T>
aed::BeamSearchResult LlmAsrModel<T>::Generate(
    const Tensor<T>& features, const aed::BeamSearchOptions& opts) const {
  numerics::NoGradGuard no_grad;
  const ForwardContext ctx;
  const AssembledSequence<T> prefix =
      Assemble(lm_, prompt_, SpeechEmbeddings(features, ctx), std::nullopt,
               eos_);
  aed::BeamSearchOptions o = opts;
  o.sos = sos_;
  o.eos = eos_;
  // The leading sos only marks the start of generation and is not fed to
  // the LM; generation continues directly after E_S.
  const aed::StepFunction step = [&](std::span<const int> tokens) {
    Tensor<T> x = prefix.embeddings;
    if (tokens.size() > 1) {
      const std::vector<Tensor<T>> parts = {x, lm_.Embed(tokens.subspan(1))};
      x = numerics::ConcatRows<T>(parts);
    }
    const Tensor<T> logits = lm_.Forward(x, ctx, lora_enabled_);
    const Tensor<T> lp = numerics::LogSoftmax(
        numerics::SliceRows(logits, logits.rows() - 1, 1), -1);
    return std::vector<double>(lp.data().begin(), lp.data().end());
  };
  if (o.beam == 1) {
    aed::BeamSearchResult r;
    r.hypotheses.push_back(aed::GreedySearch(step, o));
    r.truncated = !r.hypotheses[0].finished;
    return r;
  }
  return aed::BeamSearch(step, o);
}

template <typename T>
void LlmAsrModel<T>::Collect(ParameterList<T>& out) const {
  encoder_.Collect("encoder", out);
  adapter_.Collect("adapter", out);
  lm_.Collect("lm", out);
}

template <typename T>
void LlmAsrModel<T>::CollectTrainable(ParameterList<T>& out) const {
  encoder_.Collect("encoder", out);
  adapter_.Collect("adapter", out);
  lm_.CollectLora("lm", out);
}

template <typename T>
void LlmAsrModel<T>::CollectFrozen(ParameterList<T>& out) const {
  lm_.CollectBase("lm", out);
}

template class LlmAsrModel<float>;
template class LlmAsrModel<double>;

}  // namespace deskasr::llm
