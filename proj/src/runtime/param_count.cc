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

#include "runtime/param_count.h"

#include <cstdio>

#include "aed/aed_model.h"
#include "llm/llm_asr.h"

namespace deskasr::runtime {

namespace {

int64_t LinearParams(int64_t in, int64_t out, bool bias = true) {
  return in * out + (bias ? out : 0);
}

int64_t NormParams(int64_t d) { return 2 * d; }

int64_t FeedForwardParams(int64_t d, int64_t hidden) {
  return LinearParams(d, hidden) + LinearParams(hidden, d);
}

int64_t MhaParams(int64_t d) { return 4 * LinearParams(d, d); }

int64_t EncoderParams(const encoder::EncoderConfig& e) {
  const int64_t d = e.d_model;
  const int64_t c1 = e.channels1();
  const int64_t c2 = e.channels2();
  const int64_t freq = encoder::SubsampledLength(e.input_dim);
  int64_t n = c1 * 9 + c1 + c2 * c1 * 9 + c2 + LinearParams(c2 * freq, d);
  const int64_t attn = MhaParams(d) + LinearParams(d, d, false) + 2 * d;
  const int64_t conv = LinearParams(d, 2 * d) + d * e.conv_kernel + d +
                       NormParams(d) + LinearParams(d, d);
  const int64_t block =
      5 * NormParams(d) + 2 * FeedForwardParams(d, e.ffn_dim()) + attn + conv;
  n += block * e.num_layers;
  return n;
}

int64_t DecoderParams(const aed::DecoderConfig& c, int64_t vocab) {
  const int64_t d = c.d_model;
  const int64_t layer =
      3 * NormParams(d) + 2 * MhaParams(d) + FeedForwardParams(d, c.ffn_dim());
  return vocab * d + layer * c.num_layers + NormParams(d);
}

int64_t AdapterParams(const llm::AdapterConfig& a) {
  return LinearParams(a.in_dim(), a.hidden()) +
         LinearParams(a.hidden(), a.out_dim);
}

int64_t LmBaseParams(const llm::LmConfig& c, int64_t vocab) {
  const int64_t d = c.d_model;
  const int64_t layer =
      2 * NormParams(d) + MhaParams(d) + FeedForwardParams(d, c.ffn_dim());
  return vocab * d + layer * c.num_layers + NormParams(d);
}

int64_t LoraParams(const llm::LmConfig& c) {
  const int64_t d = c.d_model;
  const int64_t r = c.lora.rank;
  return c.num_layers * 2 * (r * d + d * r);
}

bool StartsWith(const std::string& s, const char* prefix) {
  return s.rfind(prefix, 0) == 0;
}

}  // namespace

int64_t NominalVocab(const RunConfig& cfg) {
  return FindPreset(cfg.preset).nominal_vocab;
}

int64_t NominalLmVocab(const RunConfig& cfg) {
  const Preset& p = FindPreset(cfg.preset);
  return p.lm_vocab > 0 ? p.lm_vocab : p.nominal_vocab;
}

ParamCounts AnalyticCounts(const RunConfig& cfg, int64_t vocab) {
  ParamCounts c;
  c.encoder = EncoderParams(cfg.encoder);
  if (cfg.kind() == ModelKind::kAed) {
    c.decoder = DecoderParams(cfg.decoder, vocab);
  } else {
    c.adapter = AdapterParams(cfg.adapter);
    c.lm_base = LmBaseParams(cfg.lm, vocab);
    c.lora = LoraParams(cfg.lm);
  }
  return c;
}

template <typename T>
ParamCounts Tally(const nn::ParameterList<T>& params) {
  ParamCounts c;
  for (const auto& p : params) {
    const int64_t n = p.tensor.numel();
    if (StartsWith(p.name, "encoder.")) {
      c.encoder += n;
    } else if (StartsWith(p.name, "decoder.")) {
      c.decoder += n;
    } else if (StartsWith(p.name, "adapter.")) {
      c.adapter += n;
    } else if (StartsWith(p.name, "lm.")) {
      if (p.name.find(".lora_") != std::string::npos) {
        c.lora += n;
      } else {
        c.lm_base += n;
      }
    } else {
      throw std::logic_error("unattributed parameter " + p.name);
    }
  }
  return c;
}

template ParamCounts Tally(const nn::ParameterList<float>&);
template ParamCounts Tally(const nn::ParameterList<double>&);

ParamCounts EnumeratedCounts(const RunConfig& cfg, int64_t vocab) {
  numerics::Rng rng(cfg.seed);
  nn::ParameterList<float> params;
  if (cfg.kind() == ModelKind::kAed) {
    aed::DecoderConfig dec = cfg.decoder;
    dec.vocab_size = vocab;
    aed::AedModel<float> model(cfg.encoder, dec, rng);
    model.Collect(params);
  } else {
    llm::LmConfig lm = cfg.lm;
    lm.vocab_size = vocab;
    llm::PromptSpec prompt{"p", {5}};
    llm::LlmAsrModel<float> model(cfg.encoder, cfg.adapter, lm, prompt, rng);
    model.Collect(params);
  }
  return Tally(params);
}

std::string FormatCounts(const ParamCounts& c, ModelKind kind) {
  std::string out;
  auto line = [&out](const char* name, int64_t n) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-8s %14lld  %10.3fM\n", name,
                  static_cast<long long>(n), static_cast<double>(n) / 1e6);
    out += buf;
  };
  line("encoder", c.encoder);
  if (kind == ModelKind::kAed) {
    line("decoder", c.decoder);
  } else {
    line("adapter", c.adapter);
    line("lm", c.lm_base);
    line("lora", c.lora);
  }
  line("total", c.total());
  return out;
}

}  // namespace deskasr::runtime
