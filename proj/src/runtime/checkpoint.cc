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

#include "runtime/checkpoint.h"

#include <zlib.h>

#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace deskasr::runtime {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are written in native little-endian order");

uint32_t Crc32(const uint8_t* data, size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  while (n > 0) {
    const uInt chunk = static_cast<uInt>(std::min<size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<uint32_t>(crc);
}

// Hex float text keeps doubles (including inf) exact through JSON.
std::string ExactDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double ParseExactDouble(const std::string& s) {
  return std::strtod(s.c_str(), nullptr);
}

DType ParseDType(const std::string& s) {
  if (s == "f32") return DType::kF32;
  if (s == "f64") return DType::kF64;
  throw CheckpointError("unknown dtype '" + s + "'");
}

size_t DTypeSize(DType t) { return t == DType::kF32 ? 4 : 8; }

json TrainerToJson(const training::TrainerState& s) {
  return json{{"step", s.step},
              {"epoch", s.epoch},
              {"batch_in_epoch", s.batch_in_epoch},
              {"evaluations", s.evaluations},
              {"rng_state", s.rng_state},
              {"reg_stage", s.reg.current_stage},
              {"reg_best_loss", ExactDouble(s.reg.best_validation_loss)},
              {"reg_evals_since_improvement", s.reg.evals_since_improvement},
              {"reg_patience", s.reg.patience},
              {"adam_steps", s.adam.steps},
              {"adam_slots", s.adam.m.size()}};
}

training::TrainerState TrainerFromJson(const json& j) {
  training::TrainerState s;
  s.step = j.at("step").get<int64_t>();
  s.epoch = j.at("epoch").get<int64_t>();
  s.batch_in_epoch = j.at("batch_in_epoch").get<int64_t>();
  s.evaluations = j.at("evaluations").get<int64_t>();
  s.rng_state = j.at("rng_state").get<std::string>();
  s.reg.current_stage = j.at("reg_stage").get<int>();
  s.reg.best_validation_loss =
      ParseExactDouble(j.at("reg_best_loss").get<std::string>());
  s.reg.evals_since_improvement = j.at("reg_evals_since_improvement").get<int>();
  s.reg.patience = j.at("reg_patience").get<int>();
  s.adam.steps = j.at("adam_steps").get<int64_t>();
  return s;
}

std::string SlotName(const char* moment, size_t i) {
  return std::string("optimizer.") + moment + "." + std::to_string(i);
}

}  // namespace

const char* DTypeName(DType t) { return t == DType::kF32 ? "f32" : "f64"; }

int64_t TensorBlob::numel() const { return numerics::NumElements(shape); }

template <typename T>
TensorBlob TensorBlob::From(const std::string& name,
                            const numerics::Shape& shape,
                            std::span<const T> values) {
  TensorBlob b;
  b.name = name;
  b.shape = shape;
  b.dtype = std::is_same_v<T, float> ? DType::kF32 : DType::kF64;
  b.bytes.resize(values.size() * sizeof(T));
  std::memcpy(b.bytes.data(), values.data(), b.bytes.size());
  return b;
}

template <typename T>
std::vector<T> TensorBlob::As() const {
  const size_t n = bytes.size() / DTypeSize(dtype);
  std::vector<T> out(n);
  if (dtype == DType::kF32) {
    const float* src = reinterpret_cast<const float*>(bytes.data());
    for (size_t i = 0; i < n; ++i) out[i] = static_cast<T>(src[i]);
  } else {
    const double* src = reinterpret_cast<const double*>(bytes.data());
    for (size_t i = 0; i < n; ++i) out[i] = static_cast<T>(src[i]);
  }
  return out;
}

template TensorBlob TensorBlob::From(const std::string&, const numerics::Shape&,
                                     std::span<const float>);
template TensorBlob TensorBlob::From(const std::string&, const numerics::Shape&,
                                     std::span<const double>);
template std::vector<float> TensorBlob::As() const;
template std::vector<double> TensorBlob::As() const;

const TensorBlob* Checkpoint::Find(const std::string& name) const {
  for (const TensorBlob& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  std::vector<TensorBlob> all = ckpt.tensors;
  if (ckpt.trainer) {
    const auto& adam = ckpt.trainer->adam;
    for (size_t i = 0; i < adam.m.size(); ++i) {
      const int64_t n = static_cast<int64_t>(adam.m[i].size());
      all.push_back(TensorBlob::From<double>(SlotName("m", i), {n}, adam.m[i]));
      all.push_back(TensorBlob::From<double>(SlotName("v", i), {n}, adam.v[i]));
    }
  }
  json table = json::array();
  uint64_t offset = 0;
  for (const TensorBlob& t : all) {
    if (t.bytes.size() != static_cast<size_t>(t.numel()) * DTypeSize(t.dtype)) {
      throw CheckpointError("tensor " + t.name + ": payload size mismatch");
    }
    table.push_back({{"name", t.name},
                     {"shape", t.shape},
                     {"dtype", DTypeName(t.dtype)},
                     {"offset", offset},
                     {"bytes", t.bytes.size()},
                     {"crc32", Crc32(t.bytes.data(), t.bytes.size())}});
    offset += t.bytes.size();
  }
  json header{{"format", kCheckpointMagic},
              {"version", ckpt.version},
              {"config", ckpt.config_yaml},
              {"tokenizer_vocab", ckpt.vocab},
              {"tokenizer_merges", ckpt.merges},
              {"cmvn", ckpt.cmvn},
              {"tensors", table}};
  if (ckpt.trainer) header["trainer"] = TrainerToJson(*ckpt.trainer);
  const std::string text = header.dump(1) + "\n";
  const uint32_t hcrc =
      Crc32(reinterpret_cast<const uint8_t*>(text.data()), text.size());
  std::string out = std::string(kCheckpointMagic) + " " +
                    std::to_string(ckpt.version) + " " +
                    std::to_string(text.size()) + " " + std::to_string(hcrc) +
                    "\n";
  out.reserve(out.size() + text.size() + offset);
  out += text;
  for (const TensorBlob& t : all) {
    out.append(reinterpret_cast<const char*>(t.bytes.data()), t.bytes.size());
  }
  return out;
}

namespace {

struct Framing {
  int version = 0;
  size_t header_begin = 0;
  size_t header_size = 0;
};

Framing ReadFraming(const std::string& bytes, const std::string& origin) {
  const size_t eol = bytes.find('\n');
  if (eol == std::string::npos || bytes.compare(0, 9, "DASRCKPT ") != 0) {
    throw CheckpointError(origin + ": not a checkpoint (bad magic)");
  }
  std::istringstream line(bytes.substr(9, eol - 9));
  Framing f;
  uint64_t size = 0;
  uint64_t crc = 0;
  if (!(line >> f.version >> size >> crc)) {
    throw CheckpointError(origin + ": malformed checkpoint preamble");
  }
  if (f.version != kCheckpointVersion) {
    throw CheckpointError(origin + ": unsupported checkpoint version " +
                          std::to_string(f.version));
  }
  f.header_begin = eol + 1;
  f.header_size = size;
  if (bytes.size() < f.header_begin + f.header_size) {
    throw CheckpointError(origin + ": truncated header");
  }
  const uint32_t actual = Crc32(
      reinterpret_cast<const uint8_t*>(bytes.data() + f.header_begin), size);
  if (actual != crc) {
    throw CheckpointError(origin + ": header checksum mismatch");
  }
  return f;
}

}  // namespace

Checkpoint ParseCheckpoint(const std::string& bytes, const std::string& origin) {
  const Framing f = ReadFraming(bytes, origin);
  json header;
  try {
    header = json::parse(bytes.substr(f.header_begin, f.header_size));
  } catch (const json::exception& e) {
    throw CheckpointError(origin + ": unreadable header: " + e.what());
  }
  Checkpoint ckpt;
  size_t slots = 0;
  try {
    ckpt.version = header.at("version").get<int>();
    ckpt.config_yaml = header.at("config").get<std::string>();
    ckpt.vocab = header.at("tokenizer_vocab").get<std::string>();
    ckpt.merges = header.at("tokenizer_merges").get<std::string>();
    ckpt.cmvn = header.at("cmvn").get<std::string>();
    if (header.contains("trainer")) {
      ckpt.trainer = TrainerFromJson(header["trainer"]);
      slots = header["trainer"].at("adam_slots").get<size_t>();
    }
    const size_t payload = f.header_begin + f.header_size;
    for (const json& e : header.at("tensors")) {
      TensorBlob t;
      t.name = e.at("name").get<std::string>();
      t.shape = e.at("shape").get<numerics::Shape>();
      t.dtype = ParseDType(e.at("dtype").get<std::string>());
      const uint64_t off = e.at("offset").get<uint64_t>();
      const uint64_t n = e.at("bytes").get<uint64_t>();
      if (n != static_cast<uint64_t>(t.numel()) * DTypeSize(t.dtype) ||
          payload + off + n > bytes.size()) {
        throw CheckpointError(origin + ": tensor " + t.name +
                              " exceeds the payload");
      }
      const auto* src =
          reinterpret_cast<const uint8_t*>(bytes.data() + payload + off);
      if (Crc32(src, n) != e.at("crc32").get<uint32_t>()) {
        throw CheckpointError(origin + ": checksum mismatch in tensor " +
                              t.name);
      }
      t.bytes.assign(src, src + n);
      ckpt.tensors.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw CheckpointError(origin + ": malformed header: " + e.what());
  }
  if (ckpt.trainer) {
    auto& adam = ckpt.trainer->adam;
    for (size_t i = 0; i < slots; ++i) {
      const TensorBlob* m = ckpt.Find(SlotName("m", i));
      const TensorBlob* v = ckpt.Find(SlotName("v", i));
      if (m == nullptr || v == nullptr) {
        throw CheckpointError(origin + ": missing optimizer slot " +
                              std::to_string(i));
      }
      adam.m.push_back(m->As<double>());
      adam.v.push_back(v->As<double>());
    }
    std::erase_if(ckpt.tensors, [](const TensorBlob& t) {
      return t.name.rfind("optimizer.", 0) == 0;
    });
  }
  return ckpt;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string bytes = SerializeCheckpoint(ckpt);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError(path + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError(path + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(path + ": cannot open checkpoint");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Checkpoint LoadCheckpoint(const std::string& path) {
  return ParseCheckpoint(Slurp(path), path);
}

std::string CheckpointHeader(const std::string& path) {
  const std::string bytes = Slurp(path);
  const Framing f = ReadFraming(bytes, path);
  return bytes.substr(f.header_begin, f.header_size);
}

}  // namespace deskasr::runtime
