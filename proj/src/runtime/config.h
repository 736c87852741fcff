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

#ifndef DESKASR_RUNTIME_CONFIG_H_
#define DESKASR_RUNTIME_CONFIG_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "aed/decoder.h"
#include "encoder/encoder_config.h"
#include "llm/adapter.h"
#include "llm/stand_in_lm.h"

namespace deskasr::runtime {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { kAed, kLlm };

struct DataConfig {
  std::string train_manifest;
  std::string valid_manifest;  // optional; training set is evaluated if empty
  std::string output_dir = "run";
};

struct TokenizerConfig {
  int bpe_merges = 100;
  std::string prompt = "请转写音频";
};

struct TrainingConfig {
  int64_t max_steps = 2000;
  int64_t frame_budget = 400;
  double base_lr = 1e-3;
  int64_t warmup_steps = 100;
  int64_t ref_d_model = 64;
  double clip_norm = 5.0;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
  int patience = 2;
  int64_t eval_every = 50;
  bool stop_at_zero_cer = false;
  int64_t checkpoint_every = 0;  // 0: final checkpoint only
  int64_t lm_pretrain_steps = 0;  // LLM mode: text-only LM steps before freezing
  std::string init_encoder_from;  // LLM mode: AED checkpoint
  std::string resume_from;
};

struct DecodeConfig {
  int beam = 4;
  int max_len = 0;  // 0: 2 + T'/2 where T' is the encoder output length
  double length_penalty = 0.6;
};

// Token budget for one utterance of `frames` feature frames.
int ResolveMaxLen(int max_len, int64_t frames);

struct RunConfig {
  std::string model = "aed";  // aed | llm
  std::string preset = "tiny";
  uint64_t seed = 1;
  std::string precision = "float";  // float | double
  DataConfig data;
  TokenizerConfig tokenizer;
  encoder::EncoderConfig encoder;
  aed::DecoderConfig decoder;  // d_model follows the encoder
  llm::AdapterConfig adapter;  // widths follow encoder and LM
  llm::LmConfig lm;
  TrainingConfig training;
  DecodeConfig decode;

  ModelKind kind() const {
    return model == "llm" ? ModelKind::kLlm : ModelKind::kAed;
  }
  bool use_double() const { return precision == "double"; }
  // Copies the derived widths (decoder and adapter) from their sources.
  void SyncDerived();
  // Throws ConfigError naming the offending field.
  void Validate() const;
};

// Named architecture presets. Desk presets train on a laptop CPU; full
// presets reproduce published widths for parameter accounting only.
struct Preset {
  std::string name;
  bool full_width = false;
  int64_t nominal_vocab = 32;  // vocabulary used when no tokenizer exists
  int64_t lm_vocab = 0;        // 0: same as nominal_vocab
  encoder::EncoderConfig encoder;
  aed::DecoderConfig decoder;
  llm::AdapterConfig adapter;
  llm::LmConfig lm;
};

const std::vector<Preset>& Presets();
const Preset& FindPreset(const std::string& name);
void ApplyPreset(const Preset& p, RunConfig& cfg);

// YAML. Unknown keys and type errors raise ConfigError with line numbers.
RunConfig ParseConfig(const std::string& yaml_text,
                      const std::string& origin = "<config>");
RunConfig LoadConfig(const std::string& path);
// Emits every field, so parse(serialize(c)) == c.
std::string SerializeConfig(const RunConfig& cfg);
bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace deskasr::runtime

#endif  // DESKASR_RUNTIME_CONFIG_H_
