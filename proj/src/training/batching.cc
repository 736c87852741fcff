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

#include "training/batching.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace deskasr::training {

std::vector<Batch> MakeBatches(std::span<const Example> examples,
                               int64_t frame_budget, numerics::Rng* rng) {
  if (frame_budget < 1) throw std::invalid_argument("frame budget must be >= 1");
  for (const Example& e : examples) {
    if (e.targets.empty()) {
      throw std::invalid_argument("utterance '" + e.utt_id +
                                  "' has an empty target sequence");
    }
    if (e.features.num_frames < 1) {
      throw std::invalid_argument("utterance '" + e.utt_id + "' has no frames");
    }
  }
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return examples[a].features.num_frames < examples[b].features.num_frames;
  });
  std::vector<Batch> batches;
  Batch current;
  int64_t frames = 0;
  for (size_t i : order) {
    const int64_t n = examples[i].features.num_frames;
    if (!current.empty() && frames + n > frame_budget) {
      batches.push_back(std::move(current));
      current.clear();
      frames = 0;
    }
    current.push_back(i);
    frames += n;
  }
  if (!current.empty()) batches.push_back(std::move(current));
  if (rng != nullptr) {
    for (size_t i = batches.size(); i > 1; --i) {
      const auto j = static_cast<size_t>(
          rng->UniformInt(0, static_cast<int64_t>(i) - 1));
      std::swap(batches[i - 1], batches[j]);
    }
  }
  return batches;
}

}  // namespace deskasr::training
