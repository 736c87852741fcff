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

#include "aed/aed_model.h"

#include <stdexcept>

namespace deskasr::aed {

template <typename T>
AedModel<T>::AedModel(const encoder::EncoderConfig& enc,
                      const DecoderConfig& dec, Rng& rng, int sos, int eos)
    : encoder_(enc, rng), decoder_(dec, rng), sos_(sos), eos_(eos) {
  if (enc.d_model != dec.d_model) {
    throw std::invalid_argument("encoder and decoder widths differ");
  }
}

template <typename T>
Tensor<T> AedModel<T>::Loss(std::span<const Utterance<T>> batch,
                            const ForwardContext& ctx) const {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::vector<Tensor<T>> logits;
  std::vector<int> targets;
  for (const Utterance<T>& u : batch) {
    if (u.targets.empty()) {
      throw std::invalid_argument("utterance with empty target sequence");
    }
    const EncoderOutput<T> enc = encoder_.Forward(u.features, ctx);
    std::vector<int> input{sos_};
    input.insert(input.end(), u.targets.begin(), u.targets.end());
    logits.push_back(decoder_.Forward(input, enc, ctx));
    targets.insert(targets.end(), u.targets.begin(), u.targets.end());
    targets.push_back(eos_);
  }
  const Tensor<T> all =
      logits.size() == 1 ? logits[0] : numerics::ConcatRows<T>(logits);
  const std::vector<uint8_t> mask(targets.size(), 1);
  return numerics::CrossEntropy(all, targets, mask);
}

template <typename T>
BeamSearchResult AedModel<T>::Decode(const Tensor<T>& features,
                                     const BeamSearchOptions& opts) const {
  numerics::NoGradGuard no_grad;
  const EncoderOutput<T> enc = encoder_.Forward(features, ForwardContext{});
  BeamSearchOptions o = opts;
  o.sos = sos_;
  o.eos = eos_;
  const StepFunction step = [&](std::span<const int> prefix) {
    return decoder_.NextLogProbs(prefix, enc);
  };
  if (o.beam == 1) {
    BeamSearchResult r;
    r.hypotheses.push_back(GreedySearch(step, o));
    r.truncated = !r.hypotheses[0].finished;
    return r;
  }
  return BeamSearch(step, o);
}

template <typename T>
void AedModel<T>::Collect(ParameterList<T>& out) const {
  encoder_.Collect("encoder", out);
  decoder_.Collect("decoder", out);
}

template class AedModel<float>;
template class AedModel<double>;

}  // namespace deskasr::aed
