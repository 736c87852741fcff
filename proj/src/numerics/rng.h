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

#ifndef DESKASR_NUMERICS_RNG_H_
#define DESKASR_NUMERICS_RNG_H_

#include <cstdint>
#include <random>
#include <string>

namespace deskasr::numerics {

// Seeded generator with distributions written out explicitly, so a given
// seed yields the same stream on every standard library.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64";

  explicit Rng(uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }
  const char* algorithm() const { return kAlgorithm; }

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [lo, hi], unbiased by rejection.
  int64_t UniformInt(int64_t lo, int64_t hi);
  double Normal(double mean = 0.0, double stddev = 1.0);
  bool Bernoulli(double p) { return Uniform() < p; }

  // Textual engine state, for checkpoints.
  std::string SaveState() const;
  void LoadState(const std::string& state);

  // Independent stream derived from this generator's seed and a tag.
  static uint64_t DeriveSeed(uint64_t seed, uint64_t tag);

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace deskasr::numerics

#endif  // DESKASR_NUMERICS_RNG_H_
