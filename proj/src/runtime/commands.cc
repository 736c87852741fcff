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

#include "runtime/commands.h"

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "frontend/wav.h"

namespace deskasr::runtime {

namespace fs = std::filesystem;

std::vector<WavListEntry> ParseWavList(const std::string& text,
                                       const std::string& base_dir) {
  std::vector<WavListEntry> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    WavListEntry e;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      e.wav_path = line;
      e.utt_id = fs::path(line).stem().string();
    } else {
      e.utt_id = line.substr(0, tab);
      const size_t tab2 = line.find('\t', tab + 1);
      e.wav_path = line.substr(tab + 1, tab2 == std::string::npos
                                            ? std::string::npos
                                            : tab2 - tab - 1);
    }
    if (fs::path(e.wav_path).is_relative() && !base_dir.empty()) {
      e.wav_path = (fs::path(base_dir) / e.wav_path).string();
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<WavListEntry> ReadWavList(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open wav list");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseWavList(ss.str(), fs::path(path).parent_path().string());
}

std::string DecodeListResult::FormatHypotheses() const {
  std::string out;
  for (const auto& [id, text] : hypotheses) out += id + "\t" + text + "\n";
  return out;
}

DecodeListResult DecodeList(const Engine& engine,
                            const std::vector<WavListEntry>& list,
                            const DecodeConfig& opts) {
  DecodeListResult r;
  for (const WavListEntry& e : list) {
    try {
      const frontend::Waveform wave = frontend::ReadWav(e.wav_path);
      r.hypotheses.emplace_back(e.utt_id, engine.Transcribe(wave, opts));
    } catch (const frontend::AudioError& err) {
      r.failures.push_back({e.utt_id, err.what()});
    }
  }
  return r;
}

namespace {

std::string JoinIds(const std::vector<std::string>& ids) {
  std::string s;
  for (const auto& id : ids) s += (s.empty() ? "" : " ") + id;
  return s;
}

}  // namespace

eval::ScoreReport ScoreFiles(const std::string& ref_path,
                             const std::string& hyp_path, eval::Unit unit,
                             const std::optional<std::string>& baseline_path,
                             std::string* warnings) {
  const eval::UttList ref = eval::ReadUttList(ref_path);
  if (ref.empty()) throw ConfigError(ref_path + ": reference corpus is empty");
  eval::ScoreReport report;
  report.score = eval::ScoreCorpus(ref, eval::ReadUttList(hyp_path), unit);
  if (report.score.totals.ref_len == 0) {
    throw ConfigError(ref_path + ": reference corpus has zero length");
  }
  const auto warn = [warnings](const std::string& file,
                               const eval::CorpusScore& s) {
    if (warnings == nullptr) return;
    if (!s.missing_in_hyp.empty()) {
      *warnings += "warning: " + file + ": missing " +
                   std::to_string(s.missing_in_hyp.size()) +
                   " reference ids: " + JoinIds(s.missing_in_hyp) + "\n";
    }
    if (!s.missing_in_ref.empty()) {
      *warnings += "warning: " + file + ": " +
                   std::to_string(s.missing_in_ref.size()) +
                   " ids not in the reference: " + JoinIds(s.missing_in_ref) +
                   "\n";
    }
  };
  warn(hyp_path, report.score);
  if (baseline_path) {
    report.baseline =
        eval::ScoreCorpus(ref, eval::ReadUttList(*baseline_path), unit);
    warn(*baseline_path, *report.baseline);
    if (report.baseline->rate > 0.0) {
      report.cerr = eval::Cerr(report.baseline->rate, report.score.rate);
    }
  }
  return report;
}

std::string InspectCheckpoint(const std::string& path) {
  const auto header = nlohmann::json::parse(CheckpointHeader(path));
  const Checkpoint ckpt = LoadCheckpoint(path);
  const RunConfig cfg = ParseConfig(ckpt.config_yaml, "<checkpoint config>");
  const auto tok = tokenizer::Tokenizer::FromStrings(ckpt.vocab, ckpt.merges);
  ParamCounts counts;
  for (const TensorBlob& t : ckpt.tensors) {
    nn::ParameterList<float> one;
    one.push_back({t.name, numerics::Tensor<float>::Zeros(t.shape)});
    const ParamCounts c = Tally(one);
    counts.encoder += c.encoder;
    counts.decoder += c.decoder;
    counts.adapter += c.adapter;
    counts.lm_base += c.lm_base;
    counts.lora += c.lora;
  }
  std::ostringstream out;
  out << "format: " << header.value("format", "") << " v"
      << header.value("version", 0) << "\n";
  out << "model: " << cfg.model << "  preset: " << cfg.preset
      << "  precision: " << cfg.precision << "  seed: " << cfg.seed << "\n";
  out << "vocabulary: " << tok.size() << " tokens (" << tok.num_bpe_symbols()
      << " bpe symbols, " << tok.num_characters() << " characters)\n";
  out << "tensors: " << ckpt.tensors.size() << " (checksums verified)\n";
  if (ckpt.trainer) {
    out << "trainer: step " << ckpt.trainer->step << ", epoch "
        << ckpt.trainer->epoch << ", regularization stage "
        << ckpt.trainer->reg.current_stage << "\n";
  }
  out << "parameters:\n" << FormatCounts(counts, cfg.kind());
  return out.str();
}

std::string CountParamsReport(const RunConfig& cfg) {
  const Preset& preset = FindPreset(cfg.preset);
  const int64_t vocab = cfg.kind() == ModelKind::kAed ? NominalVocab(cfg)
                                                      : NominalLmVocab(cfg);
  const ParamCounts analytic = AnalyticCounts(cfg, vocab);
  std::ostringstream out;
  out << "model: " << cfg.model << "  preset: " << cfg.preset
      << "  vocabulary: " << vocab << "\n";
  out << FormatCounts(analytic, cfg.kind());
  if (!preset.full_width) {
    const ParamCounts enumerated = EnumeratedCounts(cfg, vocab);
    out << "enumerated total: " << enumerated.total()
        << (enumerated == analytic ? " (matches)" : " (MISMATCH)") << "\n";
  }
  return out.str();
}

}  // namespace deskasr::runtime
