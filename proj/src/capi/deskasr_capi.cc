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

#include "deskasr/deskasr.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "eval/report.h"
#include "frontend/wav.h"
#include "numerics/rng.h"
#include "runtime/checkpoint.h"
#include "runtime/commands.h"
#include "runtime/config.h"
#include "runtime/engine.h"
#include "runtime/train.h"
#include "synth/synth.h"
#include "training/numerical_error.h"

struct dasr_model {
  std::unique_ptr<deskasr::runtime::Engine> engine;
};

namespace {

namespace rt = deskasr::runtime;

thread_local std::string g_last_error;

dasr_status Fail(dasr_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <typename F>
dasr_status Guard(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const rt::ConfigError& e) {
    return Fail(DASR_ERR_CONFIG, e.what());
  } catch (const deskasr::training::NumericalError& e) {
    return Fail(DASR_ERR_NUMERICAL, std::string(e.what()) + " (" + e.dump() + ")");
  } catch (const rt::CheckpointError& e) {
    return Fail(DASR_ERR_CHECKPOINT, e.what());
  } catch (const deskasr::frontend::AudioError& e) {
    return Fail(DASR_ERR_AUDIO, e.what());
  } catch (const std::invalid_argument& e) {
    return Fail(DASR_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return Fail(DASR_ERR_GENERIC, e.what());
  } catch (...) {
    return Fail(DASR_ERR_GENERIC, "unknown error");
  }
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void Require(const void* p, const char* what) {
  if (p == nullptr) {
    throw std::invalid_argument(std::string(what) + " must not be NULL");
  }
}

rt::DecodeConfig Resolve(const dasr_model* m, const dasr_decode_options* o) {
  rt::DecodeConfig d = m->engine->config().decode;
  if (o != nullptr) {
    if (o->beam > 0) d.beam = o->beam;
    if (o->max_len > 0) d.max_len = o->max_len;
    if (o->length_penalty >= 0) d.length_penalty = o->length_penalty;
  }
  return d;
}

}  // namespace

extern "C" {

const char* dasr_last_error(void) { return g_last_error.c_str(); }

const char* dasr_version(void) { return "0.1.0"; }

const char* dasr_status_name(dasr_status status) {
  switch (status) {
    case DASR_OK: return "ok";
    case DASR_ERR_GENERIC: return "error";
    case DASR_ERR_CONFIG: return "config error";
    case DASR_ERR_NUMERICAL: return "numerical failure";
    case DASR_ERR_IO: return "i/o error";
    case DASR_ERR_CHECKPOINT: return "checkpoint error";
    case DASR_ERR_AUDIO: return "audio error";
    case DASR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DASR_ERR_PARTIAL: return "partial failure";
  }
  return "unknown status";
}

void dasr_string_free(char* s) { std::free(s); }
void dasr_buffer_free(double* p) { std::free(p); }

void dasr_train_options_init(dasr_train_options* opts) {
  if (opts == nullptr) return;
  *opts = dasr_train_options{};
  opts->max_steps = -1;
}

dasr_status dasr_train(const char* config_path, const dasr_train_options* opts,
                       char** final_checkpoint) {
  return Guard([&] {
    Require(config_path, "config_path");
    rt::TrainOptions to;
    if (opts != nullptr) {
      if (opts->has_seed) to.seed = opts->seed;
      if (opts->max_steps >= 0) to.max_steps = opts->max_steps;
      if (opts->output_dir != nullptr) to.output_dir = opts->output_dir;
      if (opts->resume_from != nullptr) to.resume_from = opts->resume_from;
    }
    const rt::RunConfig cfg = rt::WithOverrides(rt::LoadConfig(config_path), to);
    const bool verbose = opts != nullptr && opts->verbose;
    const rt::TrainSummary s =
        rt::RunTraining(cfg, verbose ? &std::cerr : nullptr);
    if (final_checkpoint != nullptr) *final_checkpoint = Dup(s.final_checkpoint);
    return DASR_OK;
  });
}

dasr_status dasr_config_normalize(const char* config_path, char** normalized) {
  return Guard([&] {
    Require(config_path, "config_path");
    Require(normalized, "normalized");
    *normalized = Dup(rt::SerializeConfig(rt::LoadConfig(config_path)));
    return DASR_OK;
  });
}

dasr_status dasr_count_params(const char* config_path, char** report) {
  return Guard([&] {
    Require(config_path, "config_path");
    Require(report, "report");
    *report = Dup(rt::CountParamsReport(rt::LoadConfig(config_path)));
    return DASR_OK;
  });
}

dasr_status dasr_model_load(const char* checkpoint_path, dasr_model** out) {
  return Guard([&] {
    Require(checkpoint_path, "checkpoint_path");
    Require(out, "out");
    *out = nullptr;
    auto m = std::make_unique<dasr_model>();
    m->engine = rt::Engine::Load(checkpoint_path);
    *out = m.release();
    return DASR_OK;
  });
}

void dasr_model_free(dasr_model* model) { delete model; }

dasr_status dasr_model_save(const dasr_model* model, const char* path) {
  return Guard([&] {
    Require(model, "model");
    Require(path, "path");
    rt::SaveCheckpoint(path, model->engine->ToCheckpoint());
    return DASR_OK;
  });
}

void dasr_decode_options_init(dasr_decode_options* opts) {
  if (opts == nullptr) return;
  opts->beam = 0;
  opts->max_len = 0;
  opts->length_penalty = -1.0;
}

dasr_status dasr_model_transcribe_file(const dasr_model* model,
                                       const char* wav_path,
                                       const dasr_decode_options* opts,
                                       char** text) {
  return Guard([&] {
    Require(model, "model");
    Require(wav_path, "wav_path");
    Require(text, "text");
    *text = Dup(model->engine->Transcribe(deskasr::frontend::ReadWav(wav_path),
                                          Resolve(model, opts)));
    return DASR_OK;
  });
}

dasr_status dasr_model_transcribe_pcm(const dasr_model* model,
                                      const float* samples, size_t num_samples,
                                      int sample_rate,
                                      const dasr_decode_options* opts,
                                      char** text) {
  return Guard([&] {
    Require(model, "model");
    Require(text, "text");
    if (num_samples > 0) Require(samples, "samples");
    if (sample_rate != 16000) {
      throw deskasr::frontend::AudioError("sample rate must be 16000 Hz");
    }
    deskasr::frontend::Waveform w;
    w.sample_rate = sample_rate;
    w.samples.assign(samples, samples + num_samples);
    *text = Dup(model->engine->Transcribe(w, Resolve(model, opts)));
    return DASR_OK;
  });
}

dasr_status dasr_model_probe(const dasr_model* model, uint64_t seed,
                             int64_t frames, double** values, size_t* count) {
  return Guard([&] {
    Require(model, "model");
    Require(values, "values");
    Require(count, "count");
    if (frames < 7) throw std::invalid_argument("probe needs at least 7 frames");
    deskasr::numerics::Rng rng(seed);
    deskasr::frontend::FeatureMatrix f;
    f.num_frames = frames;
    f.values.resize(static_cast<size_t>(frames) * deskasr::frontend::kNumMelBins);
    for (double& v : f.values) v = rng.Normal(0.0, 1.0);
    const std::vector<double> out = model->engine->Probe(f);
    auto* buf = static_cast<double*>(std::malloc(sizeof(double) * (out.size() + 1)));
    if (buf == nullptr) throw std::bad_alloc();
    std::copy(out.begin(), out.end(), buf);
    *values = buf;
    *count = out.size();
    return DASR_OK;
  });
}

dasr_status dasr_decode_list(const dasr_model* model, const char* list_path,
                             const char* output_path,
                             const dasr_decode_options* opts, char** failures) {
  return Guard([&] {
    Require(model, "model");
    Require(list_path, "list_path");
    Require(output_path, "output_path");
    const auto list = rt::ReadWavList(list_path);
    const rt::DecodeListResult r =
        rt::DecodeList(*model->engine, list, Resolve(model, opts));
    {
      std::ofstream out(output_path, std::ios::binary | std::ios::trunc);
      if (!out) {
        return Fail(DASR_ERR_IO, std::string(output_path) + ": cannot write");
      }
      out << r.FormatHypotheses();
    }
    std::string failed;
    for (const auto& f : r.failures) failed += f.utt_id + "\t" + f.message + "\n";
    if (failures != nullptr) *failures = Dup(failed);
    if (!r.failures.empty()) {
      return Fail(DASR_ERR_PARTIAL, std::to_string(r.failures.size()) +
                                        " utterance(s) failed to decode");
    }
    return DASR_OK;
  });
}

dasr_status dasr_inspect(const char* checkpoint_path, char** report) {
  return Guard([&] {
    Require(checkpoint_path, "checkpoint_path");
    Require(report, "report");
    *report = Dup(rt::InspectCheckpoint(checkpoint_path));
    return DASR_OK;
  });
}

dasr_status dasr_score(const char* ref_path, const char* hyp_path,
                       const char* unit, const char* baseline_path,
                       int machine_readable, char** report, char** warnings) {
  return Guard([&] {
    Require(ref_path, "ref_path");
    Require(hyp_path, "hyp_path");
    Require(report, "report");
    deskasr::eval::Unit u = deskasr::eval::Unit::kChar;
    try {
      u = deskasr::eval::ParseUnit(unit == nullptr ? "char" : unit);
    } catch (const std::exception& e) {
      throw rt::ConfigError(e.what());
    }
    std::optional<std::string> baseline;
    if (baseline_path != nullptr) baseline = baseline_path;
    std::string warn;
    const deskasr::eval::ScoreReport r =
        rt::ScoreFiles(ref_path, hyp_path, u, baseline, &warn);
    *report = Dup(machine_readable ? deskasr::eval::FormatMachine(r)
                                   : deskasr::eval::FormatHuman(r));
    if (warnings != nullptr) *warnings = Dup(warn);
    return DASR_OK;
  });
}

dasr_status dasr_score_table(const char* table_path, const char* baseline_system,
                             int machine_readable, char** report) {
  return Guard([&] {
    Require(table_path, "table_path");
    Require(report, "report");
    deskasr::eval::BenchmarkTable t = deskasr::eval::ReadTable(table_path);
    std::optional<std::string> baseline;
    if (baseline_system != nullptr) baseline = baseline_system;
    try {
      deskasr::eval::ComputeTable(t, baseline);
    } catch (const std::invalid_argument& e) {
      throw rt::ConfigError(e.what());
    }
    *report = Dup(machine_readable ? deskasr::eval::FormatTableMachine(t)
                                   : deskasr::eval::FormatTableHuman(t));
    return DASR_OK;
  });
}

dasr_status dasr_synth(const char* out_dir, int64_t count, uint64_t seed,
                       double noise_stddev) {
  return Guard([&] {
    Require(out_dir, "out_dir");
    if (count < 1) throw rt::ConfigError("count: must be >= 1");
    deskasr::synth::SynthSpec spec;
    spec.seed = seed;
    spec.noise_stddev = noise_stddev;
    deskasr::synth::WriteCorpus(spec, count, out_dir);
    return DASR_OK;
  });
}

}  // extern "C"
