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

#ifndef DESKASR_AED_AED_MODEL_H_
#define DESKASR_AED_AED_MODEL_H_

#include <span>
#include <string>
#include <vector>

#include "aed/beam_search.h"
#include "aed/decoder.h"
#include "encoder/encoder.h"
#include "encoder/utterance.h"

namespace deskasr::aed {

using encoder::Utterance;

// Conformer encoder + Transformer decoder.
template <typename T>
class AedModel {
 public:
  AedModel() = default;
  AedModel(const encoder::EncoderConfig& enc, const DecoderConfig& dec,
           Rng& rng, int sos = 1, int eos = 2);

  // Teacher-forced cross-entropy averaged over every target position of
  // the batch (transcript tokens plus the closing eos).
  Tensor<T> Loss(std::span<const Utterance<T>> batch,
                 const ForwardContext& ctx) const;

  EncoderOutput<T> Encode(const Tensor<T>& features,
                          const ForwardContext& ctx = {}) const {
    return encoder_.Forward(features, ctx);
  }
  BeamSearchResult Decode(const Tensor<T>& features,
                          const BeamSearchOptions& opts) const;

  void Collect(ParameterList<T>& out) const;

  const encoder::Encoder<T>& encoder() const { return encoder_; }
  const TransformerDecoder<T>& decoder() const { return decoder_; }
  TransformerDecoder<T>& decoder() { return decoder_; }
  int sos() const { return sos_; }
  int eos() const { return eos_; }

 private:
  encoder::Encoder<T> encoder_;
  TransformerDecoder<T> decoder_;
  int sos_ = 1;
  int eos_ = 2;
};

extern template class AedModel<float>;
extern template class AedModel<double>;

}  // namespace deskasr::aed

#endif  // DESKASR_AED_AED_MODEL_H_
