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

#include "runtime/engine.h"

#include <cmath>
#include <map>

#include "numerics/ops.h"
#include "training/lr_schedule.h"
#include "training/numerical_error.h"
#include "training/optimizer.h"

namespace deskasr::runtime {

std::vector<int> StripMarkers(const std::vector<int>& tokens) {
  std::vector<int> out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i == 0 && tokens[i] == tokenizer::kSosId) continue;
    if (tokens[i] == tokenizer::kEosId) break;
    out.push_back(tokens[i]);
  }
  return out;
}

std::string Engine::Transcribe(const frontend::Waveform& wave,
                               const DecodeConfig& opts) const {
  const frontend::FeatureMatrix f =
      frontend::ApplyCmvn(frontend::ComputeFbank(wave), cmvn_);
  return tokenizer_.Decode(DecodeIds(f, opts));
}

Checkpoint Engine::ToCheckpoint(
    const std::optional<training::TrainerState>& trainer) const {
  Checkpoint c;
  c.config_yaml = SerializeConfig(cfg_);
  c.vocab = tokenizer_.vocab().Serialize();
  c.merges = tokenizer_.bpe().SerializeMerges();
  c.cmvn = frontend::SerializeCmvn(cmvn_);
  c.trainer = trainer;
  c.tensors = ExportTensors();
  return c;
}

std::unique_ptr<Engine> Engine::Create(const RunConfig& cfg,
                                       tokenizer::Tokenizer tok,
                                       frontend::CmvnStats cmvn) {
  if (cfg.use_double()) {
    return std::make_unique<TypedEngine<double>>(cfg, std::move(tok),
                                                 std::move(cmvn));
  }
  return std::make_unique<TypedEngine<float>>(cfg, std::move(tok),
                                              std::move(cmvn));
}

std::unique_ptr<Engine> Engine::FromCheckpoint(const Checkpoint& ckpt) {
  RunConfig cfg = ParseConfig(ckpt.config_yaml, "<checkpoint config>");
  auto engine =
      Create(cfg, tokenizer::Tokenizer::FromStrings(ckpt.vocab, ckpt.merges),
             frontend::ParseCmvn(ckpt.cmvn));
  engine->ImportTensors(ckpt.tensors);
  return engine;
}

std::unique_ptr<Engine> Engine::Load(const std::string& path) {
  return FromCheckpoint(LoadCheckpoint(path));
}

template <typename T>
TypedEngine<T>::TypedEngine(const RunConfig& cfg, tokenizer::Tokenizer tok,
                            frontend::CmvnStats cmvn)
    : Engine(cfg, std::move(tok), std::move(cmvn)) {
  cfg_.SyncDerived();
  numerics::Rng rng(numerics::Rng::DeriveSeed(cfg_.seed, kInitTag));
  const int64_t vocab = tokenizer_.size();
  if (cfg_.kind() == ModelKind::kAed) {
    aed::DecoderConfig dec = cfg_.decoder;
    dec.vocab_size = vocab;
    aed_ = std::make_unique<aed::AedModel<T>>(cfg_.encoder, dec, rng,
                                              tokenizer::kSosId,
                                              tokenizer::kEosId);
  } else {
    llm::LmConfig lm = cfg_.lm;
    lm.vocab_size = vocab;
    llm::PromptSpec prompt{cfg_.tokenizer.prompt,
                           tokenizer_.Encode(cfg_.tokenizer.prompt)};
    llm_ = std::make_unique<llm::LlmAsrModel<T>>(
        cfg_.encoder, cfg_.adapter, lm, std::move(prompt), rng,
        tokenizer::kSosId, tokenizer::kEosId);
    llm_->ApplyTrainabilityPolicy();
  }
}

template <typename T>
std::vector<int> TypedEngine<T>::DecodeIds(
    const frontend::FeatureMatrix& features, const DecodeConfig& opts) const {
  numerics::NoGradGuard no_grad;
  aed::BeamSearchOptions o;
  o.beam = opts.beam;
  o.max_len = ResolveMaxLen(opts.max_len, features.num_frames);
  o.length_penalty = opts.length_penalty;
  o.sos = tokenizer::kSosId;
  o.eos = tokenizer::kEosId;
  const numerics::Tensor<T> x = training::FeaturesToTensor<T>(features);
  const aed::BeamSearchResult r =
      aed_ ? aed_->Decode(x, o) : llm_->Generate(x, o);
  if (r.hypotheses.empty()) return {};
  return StripMarkers(r.hypotheses.front().tokens);
}

template <typename T>
std::vector<double> TypedEngine<T>::Probe(
    const frontend::FeatureMatrix& features) const {
  numerics::NoGradGuard no_grad;
  const int vocab = tokenizer_.size();
  std::vector<int> targets;
  for (int i = 0; i < 3 && vocab > tokenizer::kNumSpecials; ++i) {
    targets.push_back(tokenizer::kNumSpecials +
                      i % (vocab - tokenizer::kNumSpecials));
  }
  const numerics::Tensor<T> x = training::FeaturesToTensor<T>(features);
  numerics::Tensor<T> logits;
  if (aed_) {
    std::vector<int> prefix = {tokenizer::kSosId};
    prefix.insert(prefix.end(), targets.begin(), targets.end());
    logits = aed_->decoder().Forward(prefix, aed_->Encode(x), {});
  } else {
    logits = llm_->Forward({x, targets}, {}).logits;
  }
  return std::vector<double>(logits.data().begin(), logits.data().end());
}

template <typename T>
nn::ParameterList<T> TypedEngine<T>::Parameters() const {
  nn::ParameterList<T> params;
  if (aed_) {
    aed_->Collect(params);
  } else {
    llm_->Collect(params);
  }
  return params;
}

template <typename T>
uint64_t TypedEngine<T>::FrozenChecksum() const {
  uint64_t h = 1469598103934665603ull;  // FNV-1a over the raw value bytes
  if (!llm_) return h;
  nn::ParameterList<T> frozen;
  llm_->CollectFrozen(frozen);
  for (const auto& p : frozen) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p.tensor.data().data());
    for (size_t i = 0; i < p.tensor.data().size() * sizeof(T); ++i) {
      h = (h ^ bytes[i]) * 1099511628211ull;
    }
  }
  return h;
}

template <typename T>
ParamCounts TypedEngine<T>::Counts() const {
  return Tally(Parameters());
}

template <typename T>
std::vector<TensorBlob> TypedEngine<T>::ExportTensors() const {
  std::vector<TensorBlob> out;
  for (const auto& p : Parameters()) {
    out.push_back(TensorBlob::From<T>(p.name, p.tensor.shape(), p.tensor.data()));
  }
  return out;
}

template <typename T>
void TypedEngine<T>::ImportTensors(const std::vector<TensorBlob>& blobs,
                                   const std::string& prefix) {
  std::map<std::string, const TensorBlob*> by_name;
  for (const TensorBlob& b : blobs) by_name[b.name] = &b;
  size_t used = 0;
  for (auto& p : Parameters()) {
    if (!prefix.empty() && p.name.rfind(prefix, 0) != 0) continue;
    auto it = by_name.find(p.name);
    if (it == by_name.end()) {
      throw CheckpointError("missing parameter " + p.name);
    }
    const TensorBlob& b = *it->second;
    if (b.shape != p.tensor.shape()) {
      throw CheckpointError("shape mismatch for parameter " + p.name);
    }
    const std::vector<T> values = b.As<T>();
    std::copy(values.begin(), values.end(), p.tensor.mutable_data().begin());
    ++used;
  }
  if (prefix.empty() && used != blobs.size()) {
    throw CheckpointError("checkpoint holds parameters this model lacks");
  }
  if (used == 0) throw CheckpointError("no parameters under '" + prefix + "'");
}

template <typename T>
training::ModelHooks<T> TypedEngine<T>::Hooks() const {
  training::ModelHooks<T> h;
  const DecodeConfig greedy{1, cfg_.decode.max_len, cfg_.decode.length_penalty};
  if (aed_) {
    h.loss = [m = aed_.get()](std::span<const encoder::Utterance<T>> batch,
                              const nn::ForwardContext& ctx) {
      return m->Loss(batch, ctx);
    };
  } else {
    h.loss = [m = llm_.get()](std::span<const encoder::Utterance<T>> batch,
                              const nn::ForwardContext& ctx) {
      return m->Loss(batch, ctx);
    };
  }
  h.decode = [this, greedy](const numerics::Tensor<T>& x) {
    numerics::NoGradGuard no_grad;
    aed::BeamSearchOptions o;
    o.beam = greedy.beam;
    o.max_len = ResolveMaxLen(greedy.max_len, x.rows());
    o.length_penalty = greedy.length_penalty;
    o.sos = tokenizer::kSosId;
    o.eos = tokenizer::kEosId;
    const aed::BeamSearchResult r = aed_ ? aed_->Decode(x, o) : llm_->Generate(x, o);
    return r.hypotheses.empty() ? std::vector<int>{}
                                : StripMarkers(r.hypotheses.front().tokens);
  };
  h.detokenize = [this](const std::vector<int>& ids) {
    return tokenizer_.Decode(ids);
  };
  h.parameters = [this](nn::ParameterList<T>& out) {
    if (aed_) {
      aed_->Collect(out);
    } else {
      llm_->Collect(out);
    }
  };
  return h;
}

template <typename T>
std::vector<double> TypedEngine<T>::PretrainLm(
    const std::vector<std::vector<int>>& texts, int64_t steps) {
  if (!llm_) throw std::logic_error("LM pretraining needs an LLM model");
  std::vector<double> losses;
  if (steps <= 0 || texts.empty()) return losses;
  llm::StandInLm<T>& lm = llm_->lm();
  nn::ParameterList<T> base;
  lm.CollectBase("lm", base);
  for (auto& p : base) p.tensor.set_requires_grad(true);
  training::AdamConfig ac{cfg_.training.beta1, cfg_.training.beta2,
                          cfg_.training.eps, cfg_.training.clip_norm};
  training::Adam<T> adam(base, ac);
  training::LrSchedule sched{cfg_.training.base_lr, cfg_.training.warmup_steps,
                             cfg_.training.ref_d_model, cfg_.lm.d_model};
  for (int64_t s = 0; s < steps; ++s) {
    const std::vector<int>& text = texts[static_cast<size_t>(s) % texts.size()];
    std::vector<int> seq = {tokenizer::kSosId};
    seq.insert(seq.end(), text.begin(), text.end());
    seq.push_back(tokenizer::kEosId);
    const std::vector<int> inputs(seq.begin(), seq.end() - 1);
    const std::vector<int> targets(seq.begin() + 1, seq.end());
    const std::vector<uint8_t> mask(targets.size(), 1);
    const numerics::Tensor<T> logits = lm.Forward(lm.Embed(inputs), {}, false);
    const numerics::Tensor<T> loss =
        numerics::CrossEntropy<T>(logits, targets, mask);
    const double value = static_cast<double>(loss.item());
    if (!std::isfinite(value)) {
      throw training::NumericalError("non-finite LM pretraining loss",
                                     "pretrain_step=" + std::to_string(s));
    }
    adam.ZeroGrad();
    loss.Backward();
    adam.Step(sched.Rate(s + 1));
    losses.push_back(value);
  }
  adam.ZeroGrad();
  llm_->ApplyTrainabilityPolicy();
  return losses;
}

template class TypedEngine<float>;
template class TypedEngine<double>;

}  // namespace deskasr::runtime
