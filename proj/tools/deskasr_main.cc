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

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "deskasr/deskasr.h"

namespace {

// 0 success, 2 usage or configuration, 3 numerical failure, 1 otherwise.
int ExitCode(dasr_status s) {
  switch (s) {
    case DASR_OK: return 0;
    case DASR_ERR_CONFIG:
    case DASR_ERR_INVALID_ARGUMENT: return 2;
    case DASR_ERR_NUMERICAL: return 3;
    default: return 1;
  }
}

int Report(dasr_status s, const char* command) {
  if (s != DASR_OK) {
    std::cerr << "deskasr " << command << ": " << dasr_status_name(s) << ": "
              << dasr_last_error() << "\n";
  }
  return ExitCode(s);
}

// Takes ownership of a library string.
std::string Take(char* s) {
  std::string out = s == nullptr ? "" : s;
  dasr_string_free(s);
  return out;
}

struct DecodeFlags {
  int beam = 0;
  int max_len = 0;
  double length_penalty = -1.0;

  dasr_decode_options options() const {
    dasr_decode_options o;
    dasr_decode_options_init(&o);
    o.beam = beam;
    o.max_len = max_len;
    o.length_penalty = length_penalty;
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deskasr: desk-scale speech recognition toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dasr_version()));

  std::optional<uint64_t> seed;
  std::string config_path;

  auto* train = app.add_subcommand("train", "train a model from a YAML config");
  std::optional<int64_t> max_steps;
  std::string output_dir, resume;
  bool verbose = false;
  train->add_option("--config", config_path, "run config (YAML)")->required();
  train->add_option("--seed", seed, "override the config seed");
  train->add_option("--max-steps", max_steps, "override training.max_steps");
  train->add_option("--output-dir", output_dir, "override data.output_dir");
  train->add_option("--resume", resume, "continue from a checkpoint");
  train->add_flag("-v,--verbose", verbose, "progress on stderr");

  auto* decode = app.add_subcommand("decode", "transcribe a list of wav files");
  std::string checkpoint, list_path, output_path;
  DecodeFlags df;
  decode->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  decode->add_option("--list", list_path,
                     "utt_id<TAB>wav_path per line (manifests work too)")
      ->required();
  decode->add_option("--output", output_path, "hypothesis file")->required();
  decode->add_option("--beam", df.beam, "beam width (default: checkpoint)");
  decode->add_option("--max-len", df.max_len, "maximum output tokens");
  decode->add_option("--length-penalty", df.length_penalty,
                     "length normalization exponent");
  decode->add_option("--seed", seed, "accepted for uniformity; decoding is "
                                     "deterministic");

  auto* score = app.add_subcommand("score", "CER/WER of hypotheses");
  std::string ref_path, hyp_path, unit = "char", baseline, table_path;
  bool machine = false;
  auto* ref_opt = score->add_option("--ref", ref_path, "reference utt_id<TAB>text");
  auto* hyp_opt = score->add_option("--hyp", hyp_path, "hypothesis utt_id<TAB>text");
  score->add_option("--unit", unit, "char or word")
      ->check(CLI::IsMember({"char", "word"}));
  score->add_option("--baseline", baseline,
                    "baseline hypotheses (or, with --table, a system name) "
                    "for the relative reduction");
  auto* table_opt = score->add_option(
      "--table", table_path, "aggregate mode: system<TAB>set... rate table");
  score->add_flag("--machine", machine, "key=value output");
  score->add_option("--seed", seed, "accepted for uniformity");
  ref_opt->excludes(table_opt);
  hyp_opt->excludes(table_opt);

  auto* inspect = app.add_subcommand("inspect", "summarize a checkpoint");
  inspect->add_option("checkpoint", checkpoint, "checkpoint path")->required();

  auto* count = app.add_subcommand("count-params",
                                   "parameter totals per component");
  count->add_option("--config", config_path, "run config (YAML)")->required();
  count->add_option("--seed", seed, "override the config seed");

  auto* check = app.add_subcommand("check-config",
                                   "validate a config and print it in full");
  check->add_option("--config", config_path, "run config (YAML)")->required();

  auto* synth = app.add_subcommand("synth", "write a synthetic tone corpus");
  std::string synth_dir;
  int64_t synth_count = 20;
  double noise = 0.0;
  synth->add_option("--out", synth_dir, "output directory")->required();
  synth->add_option("--count", synth_count, "number of utterances")
      ->check(CLI::PositiveNumber);
  synth->add_option("--noise", noise, "additive Gaussian noise stddev");
  synth->add_option("--seed", seed, "corpus seed (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (train->parsed()) {
    dasr_train_options o;
    dasr_train_options_init(&o);
    if (seed) {
      o.has_seed = 1;
      o.seed = *seed;
    }
    if (max_steps) o.max_steps = *max_steps;
    if (!output_dir.empty()) o.output_dir = output_dir.c_str();
    if (!resume.empty()) o.resume_from = resume.c_str();
    o.verbose = verbose ? 1 : 0;
    char* final_ckpt = nullptr;
    const dasr_status s = dasr_train(config_path.c_str(), &o, &final_ckpt);
    if (s == DASR_OK) std::cout << "final checkpoint: " << Take(final_ckpt) << "\n";
    return Report(s, "train");
  }
  if (decode->parsed()) {
    dasr_model* model = nullptr;
    dasr_status s = dasr_model_load(checkpoint.c_str(), &model);
    if (s != DASR_OK) return Report(s, "decode");
    const dasr_decode_options o = df.options();
    char* failures = nullptr;
    s = dasr_decode_list(model, list_path.c_str(), output_path.c_str(), &o,
                         &failures);
    dasr_model_free(model);
    const std::string failed = Take(failures);
    if (!failed.empty()) std::cerr << failed;
    return Report(s, "decode");
  }
  if (score->parsed()) {
    char* report = nullptr;
    dasr_status s;
    if (!table_path.empty()) {
      s = dasr_score_table(table_path.c_str(),
                           baseline.empty() ? nullptr : baseline.c_str(),
                           machine ? 1 : 0, &report);
    } else {
      if (ref_path.empty() || hyp_path.empty()) {
        std::cerr << "deskasr score: --ref and --hyp are required "
                     "(or use --table)\n";
        return 2;
      }
      char* warnings = nullptr;
      s = dasr_score(ref_path.c_str(), hyp_path.c_str(), unit.c_str(),
                     baseline.empty() ? nullptr : baseline.c_str(),
                     machine ? 1 : 0, &report, &warnings);
      std::cerr << Take(warnings);
    }
    if (s == DASR_OK) std::cout << Take(report);
    return Report(s, "score");
  }
  if (inspect->parsed()) {
    char* report = nullptr;
    const dasr_status s = dasr_inspect(checkpoint.c_str(), &report);
    if (s == DASR_OK) std::cout << Take(report);
    return Report(s, "inspect");
  }
  if (count->parsed()) {
    char* report = nullptr;
    const dasr_status s = dasr_count_params(config_path.c_str(), &report);
    if (s == DASR_OK) std::cout << Take(report);
    return Report(s, "count-params");
  }
  if (check->parsed()) {
    char* yaml = nullptr;
    const dasr_status s = dasr_config_normalize(config_path.c_str(), &yaml);
    if (s == DASR_OK) std::cout << Take(yaml);
    return Report(s, "check-config");
  }
  if (synth->parsed()) {
    const dasr_status s =
        dasr_synth(synth_dir.c_str(), synth_count, seed.value_or(1), noise);
    if (s == DASR_OK) {
      std::cout << "wrote " << synth_count << " utterances to " << synth_dir
                << "\n";
    }
    return Report(s, "synth");
  }
  return 2;
}
