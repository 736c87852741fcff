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

#include "runtime/config.h"

#include "encoder/encoder_config.h"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>

namespace deskasr::runtime {

namespace {

using FieldRef = std::variant<int*, int64_t*, uint64_t*, double*, bool*,
                              std::string*>;

struct Field {
  std::string section;  // empty for top-level keys
  std::string key;
  std::function<FieldRef(RunConfig&)> ref;

  std::string path() const {
    return section.empty() ? key : section + "." + key;
  }
};

#define DASR_FIELD(section, key, expr) \
  Field { section, key, [](RunConfig& c) -> FieldRef { return &(expr); } }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      DASR_FIELD("", "model", c.model),
      DASR_FIELD("", "preset", c.preset),
      DASR_FIELD("", "seed", c.seed),
      DASR_FIELD("", "precision", c.precision),
      DASR_FIELD("data", "train_manifest", c.data.train_manifest),
      DASR_FIELD("data", "valid_manifest", c.data.valid_manifest),
      DASR_FIELD("data", "output_dir", c.data.output_dir),
      DASR_FIELD("tokenizer", "bpe_merges", c.tokenizer.bpe_merges),
      DASR_FIELD("tokenizer", "prompt", c.tokenizer.prompt),
      DASR_FIELD("encoder", "d_model", c.encoder.d_model),
      DASR_FIELD("encoder", "num_layers", c.encoder.num_layers),
      DASR_FIELD("encoder", "num_heads", c.encoder.num_heads),
      DASR_FIELD("encoder", "ffn_expansion", c.encoder.ffn_expansion),
      DASR_FIELD("encoder", "conv_kernel", c.encoder.conv_kernel),
      DASR_FIELD("encoder", "max_relative_distance",
                 c.encoder.max_relative_distance),
      DASR_FIELD("encoder", "subsample_channels1",
                 c.encoder.subsample_channels1),
      DASR_FIELD("encoder", "subsample_channels2",
                 c.encoder.subsample_channels2),
      DASR_FIELD("encoder", "zero_init_residual", c.encoder.zero_init_residual),
      DASR_FIELD("decoder", "num_layers", c.decoder.num_layers),
      DASR_FIELD("decoder", "num_heads", c.decoder.num_heads),
      DASR_FIELD("decoder", "ffn_expansion", c.decoder.ffn_expansion),
      DASR_FIELD("adapter", "splice_factor", c.adapter.splice_factor),
      DASR_FIELD("adapter", "hidden_dim", c.adapter.hidden_dim),
      DASR_FIELD("lm", "d_model", c.lm.d_model),
      DASR_FIELD("lm", "num_layers", c.lm.num_layers),
      DASR_FIELD("lm", "num_heads", c.lm.num_heads),
      DASR_FIELD("lm", "ffn_expansion", c.lm.ffn_expansion),
      DASR_FIELD("lm", "lora_rank", c.lm.lora.rank),
      DASR_FIELD("lm", "lora_alpha", c.lm.lora.alpha),
      DASR_FIELD("training", "max_steps", c.training.max_steps),
      DASR_FIELD("training", "frame_budget", c.training.frame_budget),
      DASR_FIELD("training", "base_lr", c.training.base_lr),
      DASR_FIELD("training", "warmup_steps", c.training.warmup_steps),
      DASR_FIELD("training", "ref_d_model", c.training.ref_d_model),
      DASR_FIELD("training", "clip_norm", c.training.clip_norm),
      DASR_FIELD("training", "beta1", c.training.beta1),
      DASR_FIELD("training", "beta2", c.training.beta2),
      DASR_FIELD("training", "eps", c.training.eps),
      DASR_FIELD("training", "patience", c.training.patience),
      DASR_FIELD("training", "eval_every", c.training.eval_every),
      DASR_FIELD("training", "stop_at_zero_cer", c.training.stop_at_zero_cer),
      DASR_FIELD("training", "checkpoint_every", c.training.checkpoint_every),
      DASR_FIELD("training", "lm_pretrain_steps",
                 c.training.lm_pretrain_steps),
      DASR_FIELD("training", "init_encoder_from",
                 c.training.init_encoder_from),
      DASR_FIELD("training", "resume_from", c.training.resume_from),
      DASR_FIELD("decode", "beam", c.decode.beam),
      DASR_FIELD("decode", "max_len", c.decode.max_len),
      DASR_FIELD("decode", "length_penalty", c.decode.length_penalty),
  };
  return fields;
}

#undef DASR_FIELD

const Field* FindField(const std::string& section, const std::string& key) {
  for (const Field& f : Fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

bool IsSection(const std::string& name) {
  for (const Field& f : Fields()) {
    if (f.section == name) return true;
  }
  return false;
}

std::string Where(const std::string& origin, const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  return origin + ":" + std::to_string(m.line + 1) + ": ";
}

void Assign(const Field& field, RunConfig& cfg, const YAML::Node& value,
            const std::string& origin) {
  if (!value.IsScalar()) {
    throw ConfigError(Where(origin, value) + field.path() +
                      ": expected a scalar value");
  }
  try {
    std::visit(
        [&](auto* target) {
          using V = std::remove_pointer_t<decltype(target)>;
          *target = value.as<V>();
        },
        field.ref(cfg));
  } catch (const YAML::BadConversion&) {
    throw ConfigError(Where(origin, value) + field.path() +
                      ": invalid value '" + value.Scalar() + "'");
  }
}

void Check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

Preset DeskPreset(const std::string& name, int64_t d, int enc_layers,
                  int dec_layers, int heads, int64_t lm_d, int lm_layers,
                  int lm_heads) {
  Preset p;
  p.name = name;
  p.encoder.d_model = d;
  p.encoder.num_layers = enc_layers;
  p.encoder.num_heads = heads;
  p.decoder.d_model = d;
  p.decoder.num_layers = dec_layers;
  p.decoder.num_heads = heads;
  p.adapter.encoder_dim = d;
  p.adapter.out_dim = lm_d;
  p.lm.d_model = lm_d;
  p.lm.num_layers = lm_layers;
  p.lm.num_heads = lm_heads;
  return p;
}

Preset FullPreset(const std::string& name, int64_t d, int layers) {
  // Published widths: d / 64 heads, 4x feed-forward, 7,832-token vocabulary.
  // The LLM backbone is sized like a 7B decoder with a 3,584-wide embedding,
  // and the adapter hidden layer matches that width.
  Preset p;
  p.name = name;
  p.full_width = true;
  p.nominal_vocab = 7832;
  p.lm_vocab = 152064;
  p.encoder.d_model = d;
  p.encoder.num_layers = layers;
  p.encoder.num_heads = static_cast<int>(d / 64);
  p.decoder.d_model = d;
  p.decoder.num_layers = layers;
  p.decoder.num_heads = static_cast<int>(d / 64);
  p.lm.d_model = 3584;
  p.lm.num_layers = 28;
  p.lm.num_heads = 28;
  p.lm.ffn_expansion = 18944.0 / 3584.0;
  p.adapter.encoder_dim = d;
  p.adapter.hidden_dim = 3584;
  p.adapter.out_dim = 3584;
  return p;
}

}  // namespace

void RunConfig::SyncDerived() {
  decoder.d_model = encoder.d_model;
  adapter.encoder_dim = encoder.d_model;
  adapter.out_dim = lm.d_model;
}

void RunConfig::Validate() const {
  Check(model == "aed" || model == "llm", "model", "must be aed or llm");
  Check(precision == "float" || precision == "double", "precision",
        "must be float or double");
  try {
    FindPreset(preset);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("preset: ") + e.what());
  }
  Check(!data.output_dir.empty(), "data.output_dir", "must not be empty");
  Check(tokenizer.bpe_merges >= 0, "tokenizer.bpe_merges", "must be >= 0");
  Check(!tokenizer.prompt.empty(), "tokenizer.prompt", "must not be empty");
  Check(encoder.d_model > 0, "encoder.d_model", "must be > 0");
  Check(encoder.num_layers >= 0, "encoder.num_layers", "must be >= 0");
  Check(encoder.num_heads >= 0, "encoder.num_heads", "must be >= 0");
  Check(encoder.d_model % encoder.heads() == 0, "encoder.num_heads",
        "must divide encoder.d_model");
  Check(encoder.ffn_expansion > 0, "encoder.ffn_expansion", "must be > 0");
  Check(encoder.conv_kernel > 0 && encoder.conv_kernel % 2 == 1,
        "encoder.conv_kernel", "must be a positive odd number");
  Check(encoder.max_relative_distance >= 1, "encoder.max_relative_distance",
        "must be >= 1");
  Check(encoder.subsample_channels1 >= 0, "encoder.subsample_channels1",
        "must be >= 0");
  Check(encoder.subsample_channels2 >= 0, "encoder.subsample_channels2",
        "must be >= 0");
  Check(decoder.num_layers >= 0, "decoder.num_layers", "must be >= 0");
  Check(decoder.num_heads >= 0, "decoder.num_heads", "must be >= 0");
  Check(encoder.d_model % decoder.heads() == 0, "decoder.num_heads",
        "must divide encoder.d_model");
  Check(decoder.ffn_expansion > 0, "decoder.ffn_expansion", "must be > 0");
  Check(adapter.splice_factor >= 1, "adapter.splice_factor", "must be >= 1");
  Check(adapter.hidden_dim >= 0, "adapter.hidden_dim", "must be >= 0");
  Check(lm.d_model > 0, "lm.d_model", "must be > 0");
  Check(lm.num_layers >= 0, "lm.num_layers", "must be >= 0");
  Check(lm.num_heads >= 0, "lm.num_heads", "must be >= 0");
  Check(lm.d_model % lm.heads() == 0, "lm.num_heads", "must divide lm.d_model");
  Check(lm.ffn_expansion > 0, "lm.ffn_expansion", "must be > 0");
  Check(lm.lora.rank >= 0, "lm.lora_rank", "must be >= 0");
  Check(lm.lora.rank == 0 || lm.lora.alpha > 0, "lm.lora_alpha", "must be > 0");
  Check(training.max_steps >= 0, "training.max_steps", "must be >= 0");
  Check(training.frame_budget >= 1, "training.frame_budget", "must be >= 1");
  Check(training.base_lr > 0, "training.base_lr", "must be > 0");
  Check(training.warmup_steps >= 1, "training.warmup_steps", "must be >= 1");
  Check(training.ref_d_model >= 1, "training.ref_d_model", "must be >= 1");
  Check(training.clip_norm >= 0, "training.clip_norm", "must be >= 0");
  Check(training.beta1 > 0 && training.beta1 < 1, "training.beta1",
        "must lie in (0, 1)");
  Check(training.beta2 > 0 && training.beta2 < 1, "training.beta2",
        "must lie in (0, 1)");
  Check(training.eps > 0, "training.eps", "must be > 0");
  Check(training.patience >= 1, "training.patience", "must be >= 1");
  Check(training.eval_every >= 0, "training.eval_every", "must be >= 0");
  Check(training.checkpoint_every >= 0, "training.checkpoint_every",
        "must be >= 0");
  Check(training.lm_pretrain_steps >= 0, "training.lm_pretrain_steps",
        "must be >= 0");
  Check(decode.beam >= 1, "decode.beam", "must be >= 1");
  Check(decode.max_len >= 0, "decode.max_len", "must be >= 0");
  Check(decode.length_penalty >= 0, "decode.length_penalty", "must be >= 0");
}

const std::vector<Preset>& Presets() {
  static const std::vector<Preset> presets = {
      DeskPreset("tiny", 64, 2, 2, 2, 64, 2, 2),
      DeskPreset("xs", 64, 3, 3, 2, 128, 2, 4),
      DeskPreset("s", 96, 3, 3, 3, 128, 2, 4),
      DeskPreset("m", 128, 4, 4, 4, 128, 2, 4),
      DeskPreset("l", 160, 4, 4, 5, 128, 2, 4),
      FullPreset("full-xs", 512, 12),
      FullPreset("full-s", 768, 16),
      FullPreset("full-m", 1024, 16),
      FullPreset("full-l", 1280, 16),
  };
  return presets;
}

const Preset& FindPreset(const std::string& name) {
  for (const Preset& p : Presets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const Preset& p : Presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

void ApplyPreset(const Preset& p, RunConfig& cfg) {
  cfg.preset = p.name;
  cfg.encoder = p.encoder;
  cfg.decoder = p.decoder;
  cfg.adapter = p.adapter;
  cfg.lm = p.lm;
  cfg.SyncDerived();
}

RunConfig ParseConfig(const std::string& yaml_text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) +
                      ": YAML syntax error: " + e.msg);
  }
  RunConfig cfg;
  ApplyPreset(FindPreset(cfg.preset), cfg);
  if (root.IsNull()) return cfg;
  if (!root.IsMap()) {
    throw ConfigError(Where(origin, root) + "top level must be a mapping");
  }
  if (const YAML::Node p = root["preset"]) {
    try {
      ApplyPreset(FindPreset(p.as<std::string>()), cfg);
    } catch (const ConfigError& e) {
      throw ConfigError(Where(origin, p) + "preset: " + e.what());
    }
  }
  for (const auto& item : root) {
    const std::string key = item.first.as<std::string>();
    if (key == "preset") continue;
    if (IsSection(key)) {
      if (!item.second.IsMap()) {
        throw ConfigError(Where(origin, item.first) + key +
                          ": expected a mapping");
      }
      for (const auto& sub : item.second) {
        const std::string sub_key = sub.first.as<std::string>();
        const Field* f = FindField(key, sub_key);
        if (f == nullptr) {
          throw ConfigError(Where(origin, sub.first) + "unknown key '" + key +
                            "." + sub_key + "'");
        }
        Assign(*f, cfg, sub.second, origin);
      }
      continue;
    }
    const Field* f = FindField("", key);
    if (f == nullptr) {
      throw ConfigError(Where(origin, item.first) + "unknown key '" + key +
                        "'");
    }
    Assign(*f, cfg, item.second, origin);
  }
  cfg.SyncDerived();
  cfg.Validate();
  return cfg;
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = ParseConfig(ss.str(), path);
  // Relative paths inside a config file are relative to that file.
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  for (std::string* p :
       {&cfg.data.train_manifest, &cfg.data.valid_manifest,
        &cfg.data.output_dir, &cfg.training.init_encoder_from,
        &cfg.training.resume_from}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) {
      *p = (base / *p).lexically_normal().string();
    }
  }
  return cfg;
}

std::string SerializeConfig(const RunConfig& cfg) {
  RunConfig copy = cfg;
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  std::string open_section;
  for (const Field& f : Fields()) {
    if (f.section != open_section) {
      if (!open_section.empty()) out << YAML::EndMap;
      open_section = f.section;
      if (!open_section.empty()) {
        out << YAML::Key << open_section << YAML::Value << YAML::BeginMap;
      }
    }
    out << YAML::Key << f.key << YAML::Value;
    std::visit(
        [&](auto* v) {
          using V = std::remove_pointer_t<decltype(v)>;
          if constexpr (std::is_same_v<V, std::string>) {
            out << YAML::DoubleQuoted << *v;
          } else {
            out << *v;
          }
        },
        f.ref(copy));
  }
  if (!open_section.empty()) out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return SerializeConfig(a) == SerializeConfig(b);
}

int ResolveMaxLen(int max_len, int64_t frames) {
  if (max_len > 0) return max_len;
  return static_cast<int>(2 + encoder::SubsampledLength(frames) / 2);
}

}  // namespace deskasr::runtime
