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

#ifndef DESKASR_RUNTIME_CHECKPOINT_H_
#define DESKASR_RUNTIME_CHECKPOINT_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "numerics/tensor.h"
#include "training/trainer.h"

namespace deskasr::runtime {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCheckpointMagic = "DASRCKPT";
inline constexpr int kCheckpointVersion = 1;

enum class DType { kF32, kF64 };
const char* DTypeName(DType t);

// One named array; `bytes` holds little-endian IEEE-754 values.
struct TensorBlob {
  std::string name;
  numerics::Shape shape;
  DType dtype = DType::kF32;
  std::vector<uint8_t> bytes;

  int64_t numel() const;
  template <typename T>
  static TensorBlob From(const std::string& name, const numerics::Shape& shape,
                         std::span<const T> values);
  template <typename T>
  std::vector<T> As() const;  // converts from the stored dtype
};

struct Checkpoint {
  int version = kCheckpointVersion;
  std::string config_yaml;
  std::string vocab;
  std::string merges;
  std::string cmvn;
  std::optional<training::TrainerState> trainer;  // moments live in tensors
  std::vector<TensorBlob> tensors;

  const TensorBlob* Find(const std::string& name) const;
};

// Layout: "DASRCKPT <version> <header bytes> <header crc32>\n", a JSON
// header (config, artifacts, trainer state, tensor table with offsets and
// crc32 per tensor), then the concatenated tensor payloads.
std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint ParseCheckpoint(const std::string& bytes,
                           const std::string& origin = "<checkpoint>");
void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::string& path);

// Just the header, for inspection.
std::string CheckpointHeader(const std::string& path);

}  // namespace deskasr::runtime

#endif  // DESKASR_RUNTIME_CHECKPOINT_H_
