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

#ifndef DESKASR_RUNTIME_TRAIN_H_
#define DESKASR_RUNTIME_TRAIN_H_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "frontend/fbank.h"
#include "frontend/manifest.h"
#include "runtime/config.h"
#include "training/trainer.h"

namespace deskasr::runtime {

struct CorpusItem {
  frontend::ManifestEntry entry;
  frontend::FeatureMatrix features;  // raw log-mel, before CMVN
};

// Reads a manifest and extracts filterbank features for every entry.
// `field` names the config key in error messages.
std::vector<CorpusItem> LoadCorpus(const std::string& manifest_path,
                                   const std::string& field);

struct TrainOptions {
  std::optional<uint64_t> seed;
  std::optional<int64_t> max_steps;
  std::optional<std::string> output_dir;
  std::optional<std::string> resume_from;
  std::ostream* progress = nullptr;
};

struct TrainSummary {
  std::string final_checkpoint;
  training::TrainResult result;
  std::vector<double> pretrain_losses;
  training::TrainerState final_state;
  // LLM mode: frozen-parameter hashes when fine-tuning starts and ends.
  uint64_t frozen_checksum_start = 0;
  uint64_t frozen_checksum_end = 0;
};

RunConfig WithOverrides(RunConfig cfg, const TrainOptions& opts);

// Full training run: data preparation, tokenizer and CMVN fitting (or the
// artifacts of a resumed checkpoint), the training loop, logs under
// `output_dir` and checkpoints. Writes `final.dasr` on completion.
TrainSummary RunTraining(const RunConfig& cfg, std::ostream* progress = nullptr);

}  // namespace deskasr::runtime

#endif  // DESKASR_RUNTIME_TRAIN_H_
