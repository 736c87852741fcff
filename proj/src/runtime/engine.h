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

#ifndef DESKASR_RUNTIME_ENGINE_H_
#define DESKASR_RUNTIME_ENGINE_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aed/aed_model.h"
#include "frontend/cmvn.h"
#include "frontend/fbank.h"
#include "frontend/wav.h"
#include "llm/llm_asr.h"
#include "runtime/checkpoint.h"
#include "runtime/config.h"
#include "runtime/param_count.h"
#include "tokenizer/tokenizer.h"
#include "training/trainer.h"

namespace deskasr::runtime {

// Seed tags for streams derived from the run seed.
inline constexpr uint64_t kInitTag = 0x494e4954ULL;
inline constexpr uint64_t kPretrainTag = 0x50524554ULL;

// A model together with the artifacts needed to run it on raw audio.
// Precision and architecture are chosen at runtime from the config.
class Engine {
 public:
  virtual ~Engine() = default;

  const RunConfig& config() const { return cfg_; }
  const tokenizer::Tokenizer& tokenizer() const { return tokenizer_; }
  const frontend::CmvnStats& cmvn() const { return cmvn_; }

  // Token ids (no sos/eos) for CMVN-normalized features.
  virtual std::vector<int> DecodeIds(const frontend::FeatureMatrix& features,
                                     const DecodeConfig& opts) const = 0;
  std::string Transcribe(const frontend::Waveform& wave,
                         const DecodeConfig& opts) const;

  // Teacher-forced logits for a fixed token prefix; used to compare models
  // bit for bit.
  virtual std::vector<double> Probe(
      const frontend::FeatureMatrix& features) const = 0;

  virtual ParamCounts Counts() const = 0;
  virtual std::vector<TensorBlob> ExportTensors() const = 0;
  // Overwrites parameter values; every parameter must be present with the
  // same shape. With `prefix`, only names under it are copied and others in
  // the source are ignored.
  virtual void ImportTensors(const std::vector<TensorBlob>& blobs,
                             const std::string& prefix = "") = 0;

  Checkpoint ToCheckpoint(
      const std::optional<training::TrainerState>& trainer = std::nullopt) const;

  // Fresh initialization from the run seed.
  static std::unique_ptr<Engine> Create(const RunConfig& cfg,
                                        tokenizer::Tokenizer tok,
                                        frontend::CmvnStats cmvn);
  static std::unique_ptr<Engine> FromCheckpoint(const Checkpoint& ckpt);
  static std::unique_ptr<Engine> Load(const std::string& path);

 protected:
  Engine(RunConfig cfg, tokenizer::Tokenizer tok, frontend::CmvnStats cmvn)
      : cfg_(std::move(cfg)), tokenizer_(std::move(tok)), cmvn_(std::move(cmvn)) {}

  RunConfig cfg_;
  tokenizer::Tokenizer tokenizer_;
  frontend::CmvnStats cmvn_;
};

template <typename T>
class TypedEngine : public Engine {
 public:
  TypedEngine(const RunConfig& cfg, tokenizer::Tokenizer tok,
              frontend::CmvnStats cmvn);

  std::vector<int> DecodeIds(const frontend::FeatureMatrix& features,
                             const DecodeConfig& opts) const override;
  std::vector<double> Probe(
      const frontend::FeatureMatrix& features) const override;
  ParamCounts Counts() const override;
  std::vector<TensorBlob> ExportTensors() const override;
  void ImportTensors(const std::vector<TensorBlob>& blobs,
                     const std::string& prefix = "") override;

  training::ModelHooks<T> Hooks() const;
  nn::ParameterList<T> Parameters() const;
  // Hash of the parameters the trainability policy freezes (LLM mode).
  uint64_t FrozenChecksum() const;

  // Text-only next-token training of the LM base weights (LLM mode only),
  // run before the trainability policy freezes them.
  std::vector<double> PretrainLm(const std::vector<std::vector<int>>& texts,
                                 int64_t steps);

  bool is_llm() const { return llm_ != nullptr; }
  aed::AedModel<T>* aed() { return aed_.get(); }
  llm::LlmAsrModel<T>* llm() { return llm_.get(); }

 private:
  std::unique_ptr<aed::AedModel<T>> aed_;
  std::unique_ptr<llm::LlmAsrModel<T>> llm_;
};

extern template class TypedEngine<float>;
extern template class TypedEngine<double>;

// Strips a leading sos and everything from the first eos on.
std::vector<int> StripMarkers(const std::vector<int>& tokens);

}  // namespace deskasr::runtime

#endif  // DESKASR_RUNTIME_ENGINE_H_
