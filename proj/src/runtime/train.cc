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

#include "runtime/train.h"

#include <filesystem>
#include <fstream>

#include "frontend/cmvn.h"
#include "frontend/wav.h"
#include "runtime/checkpoint.h"
#include "runtime/engine.h"
#include "training/numerical_error.h"

namespace deskasr::runtime {

namespace fs = std::filesystem;

namespace {

void RequireFile(const std::string& path, const std::string& field) {
  if (path.empty()) throw ConfigError(field + ": required but not set");
  if (!fs::is_regular_file(path)) {
    throw ConfigError(field + ": file not found: " + path);
  }
}

// Model-defining part of a config, for comparing a resumed run with its
// checkpoint.
std::string ModelSignature(RunConfig cfg) {
  const RunConfig defaults;
  cfg.data = defaults.data;
  cfg.training = defaults.training;
  cfg.decode = defaults.decode;
  cfg.seed = defaults.seed;
  return SerializeConfig(cfg);
}

std::vector<training::Example> MakeExamples(
    const std::vector<CorpusItem>& corpus, const Engine& engine) {
  std::vector<training::Example> out;
  out.reserve(corpus.size());
  for (const CorpusItem& c : corpus) {
    training::Example e;
    e.utt_id = c.entry.utt_id;
    e.features = frontend::ApplyCmvn(c.features, engine.cmvn());
    e.targets = engine.tokenizer().Encode(c.entry.transcript);
    e.transcript = c.entry.transcript;
    if (e.targets.empty()) {
      throw std::runtime_error(c.entry.utt_id + ": transcript has no tokens");
    }
    out.push_back(std::move(e));
  }
  return out;
}

template <typename T>
TrainSummary TrainTyped(const RunConfig& cfg, TypedEngine<T>& engine,
                        const std::vector<CorpusItem>& train_corpus,
                        const std::vector<CorpusItem>& valid_corpus,
                        const std::optional<training::TrainerState>& resume,
                        std::ostream* progress) {
  TrainSummary summary;
  const fs::path out_dir(cfg.data.output_dir);
  if (!resume && engine.is_llm() && cfg.training.lm_pretrain_steps > 0) {
    std::vector<std::vector<int>> texts;
    for (const CorpusItem& c : train_corpus) {
      texts.push_back(engine.tokenizer().Encode(c.entry.transcript));
    }
    summary.pretrain_losses =
        engine.PretrainLm(texts, cfg.training.lm_pretrain_steps);
    if (progress != nullptr && !summary.pretrain_losses.empty()) {
      *progress << "lm pretraining: " << summary.pretrain_losses.size()
                << " steps, final loss " << summary.pretrain_losses.back()
                << "\n";
    }
  }

  summary.frozen_checksum_start = engine.FrozenChecksum();

  training::TrainerConfig tc;
  tc.max_steps = cfg.training.max_steps;
  tc.frame_budget = cfg.training.frame_budget;
  tc.lr = training::LrSchedule{cfg.training.base_lr, cfg.training.warmup_steps,
                               cfg.training.ref_d_model, cfg.encoder.d_model};
  tc.adam = training::AdamConfig{cfg.training.beta1, cfg.training.beta2,
                                 cfg.training.eps, cfg.training.clip_norm};
  tc.patience = cfg.training.patience;
  tc.eval_every = cfg.training.eval_every;
  tc.stop_at_zero_cer = cfg.training.stop_at_zero_cer;
  tc.seed = cfg.seed;

  training::Trainer<T> trainer(tc, engine.Hooks(),
                               MakeExamples(train_corpus, engine),
                               MakeExamples(valid_corpus, engine));
  if (resume) trainer.set_state(*resume);

  const auto mode = resume ? std::ios::app : std::ios::trunc;
  std::ofstream step_log(out_dir / "train_log.tsv", mode);
  std::ofstream eval_log(out_dir / "valid_log.tsv", mode);
  if (!resume) {
    step_log << "step\tstage\tlr\tloss\n";
    eval_log << "eval\tvalid_loss\tcer\n";
  }

  const auto on_step = [&](const training::Trainer<T>& t) {
    const int64_t step = t.state().step;
    if (cfg.training.checkpoint_every > 0 &&
        step % cfg.training.checkpoint_every == 0) {
      SaveCheckpoint((out_dir / ("step_" + std::to_string(step) + ".dasr")).string(),
                     engine.ToCheckpoint(t.state()));
    }
    if (progress != nullptr && step % 100 == 0) {
      *progress << "step " << step << "\n" << std::flush;
    }
  };

  try {
    summary.result = trainer.Run(&step_log, &eval_log, on_step);
  } catch (const training::NumericalError& e) {
    std::ofstream dump(out_dir / "numerical_dump.txt");
    dump << e.what() << "\n" << e.dump() << "\n";
    throw;
  }
  summary.final_state = trainer.state();
  summary.frozen_checksum_end = engine.FrozenChecksum();
  summary.final_checkpoint = (out_dir / "final.dasr").string();
  SaveCheckpoint(summary.final_checkpoint,
                 engine.ToCheckpoint(summary.final_state));
  return summary;
}

}  // namespace

std::vector<CorpusItem> LoadCorpus(const std::string& manifest_path,
                                   const std::string& field) {
  RequireFile(manifest_path, field);
  std::vector<frontend::ManifestEntry> entries;
  try {
    entries = frontend::ReadManifest(manifest_path);
  } catch (const std::exception& e) {
    throw ConfigError(field + ": " + e.what());
  }
  if (entries.empty()) throw ConfigError(field + ": manifest is empty");
  std::vector<CorpusItem> out;
  out.reserve(entries.size());
  for (auto& e : entries) {
    CorpusItem item;
    item.features = frontend::ComputeFbank(frontend::ReadWav(e.wav_path));
    item.entry = std::move(e);
    out.push_back(std::move(item));
  }
  return out;
}

RunConfig WithOverrides(RunConfig cfg, const TrainOptions& opts) {
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.max_steps) cfg.training.max_steps = *opts.max_steps;
  if (opts.output_dir) cfg.data.output_dir = *opts.output_dir;
  if (opts.resume_from) cfg.training.resume_from = *opts.resume_from;
  cfg.Validate();
  return cfg;
}

TrainSummary RunTraining(const RunConfig& cfg, std::ostream* progress) {
  cfg.Validate();
  const std::vector<CorpusItem> train_corpus =
      LoadCorpus(cfg.data.train_manifest, "data.train_manifest");
  std::vector<CorpusItem> valid_corpus;
  if (!cfg.data.valid_manifest.empty()) {
    valid_corpus = LoadCorpus(cfg.data.valid_manifest, "data.valid_manifest");
  }
  fs::create_directories(cfg.data.output_dir);

  std::unique_ptr<Engine> engine;
  std::optional<training::TrainerState> resume;
  if (!cfg.training.resume_from.empty()) {
    RequireFile(cfg.training.resume_from, "training.resume_from");
    Checkpoint ckpt = LoadCheckpoint(cfg.training.resume_from);
    if (!ckpt.trainer) {
      throw ConfigError("training.resume_from: checkpoint has no trainer state");
    }
    engine = Engine::FromCheckpoint(ckpt);
    if (ModelSignature(engine->config()) != ModelSignature(cfg)) {
      throw ConfigError(
          "training.resume_from: checkpoint model differs from this config");
    }
    resume = ckpt.trainer;
  } else {
    std::vector<std::string> lines;
    std::vector<frontend::FeatureMatrix> feats;
    for (const CorpusItem& c : train_corpus) {
      lines.push_back(c.entry.transcript);
      feats.push_back(c.features);
    }
    if (cfg.kind() == ModelKind::kLlm) lines.push_back(cfg.tokenizer.prompt);
    tokenizer::Tokenizer tok =
        tokenizer::Tokenizer::Train(lines, cfg.tokenizer.bpe_merges);
    frontend::CmvnStats cmvn = frontend::FitCmvn(feats);
    engine = Engine::Create(cfg, std::move(tok), std::move(cmvn));
    if (cfg.kind() == ModelKind::kLlm && !cfg.training.init_encoder_from.empty()) {
      RequireFile(cfg.training.init_encoder_from, "training.init_encoder_from");
      const Checkpoint src = LoadCheckpoint(cfg.training.init_encoder_from);
      engine->ImportTensors(src.tensors, "encoder.");
    }
  }

  {
    std::ofstream(fs::path(cfg.data.output_dir) / "config.yaml")
        << SerializeConfig(cfg);
    std::ofstream(fs::path(cfg.data.output_dir) / "vocab.txt")
        << engine->tokenizer().vocab().Serialize();
    std::ofstream(fs::path(cfg.data.output_dir) / "merges.txt")
        << engine->tokenizer().bpe().SerializeMerges();
    std::ofstream(fs::path(cfg.data.output_dir) / "cmvn.txt")
        << frontend::SerializeCmvn(engine->cmvn());
  }

  if (auto* e = dynamic_cast<TypedEngine<double>*>(engine.get())) {
    return TrainTyped(cfg, *e, train_corpus, valid_corpus, resume, progress);
  }
  auto* e = dynamic_cast<TypedEngine<float>*>(engine.get());
  return TrainTyped(cfg, *e, train_corpus, valid_corpus, resume, progress);
}

}  // namespace deskasr::runtime
