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

#include "support/oracles.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "numerics/rng.h"

namespace deskasr::testsupport {

aed::StepFunction RandomTableModel(uint64_t seed, int vocab) {
  return [seed, vocab](std::span<const int> prefix) {
    uint64_t h = 1469598103934665603ull;
    for (int t : prefix) h = (h ^ static_cast<uint64_t>(t + 1)) * 1099511628211ull;
    numerics::Rng rng(numerics::Rng::DeriveSeed(seed, h));
    std::vector<double> logits(static_cast<size_t>(vocab));
    double mx = -1e300;
    for (double& l : logits) {
      l = rng.Normal(0.0, 2.0);
      mx = std::max(mx, l);
    }
    double z = 0.0;
    for (double l : logits) z += std::exp(l - mx);
    for (double& l : logits) l -= mx + std::log(z);
    return logits;
  };
}

ExhaustiveBest EnumerateBest(const aed::StepFunction& step, int vocab, int eos,
                             int max_len, std::vector<int> prefix,
                             double length_penalty) {
  ExhaustiveBest best{{}, -std::numeric_limits<double>::infinity()};
  const size_t start = prefix.size();
  std::function<void(double)> go = [&](double score) {
    if (static_cast<int>(prefix.size() - start) >= max_len) return;
    const std::vector<double> lp = step(prefix);
    for (int v = 0; v < vocab; ++v) {
      prefix.push_back(v);
      const double s = score + lp[static_cast<size_t>(v)];
      if (v == eos) {
        const aed::Hypothesis h{prefix, s, true};
        const double norm = aed::NormalizedScore(h, length_penalty);
        if (norm > best.score || (norm == best.score && prefix < best.tokens)) {
          best = {prefix, norm};
        }
      } else {
        go(s);
      }
      prefix.pop_back();
    }
  };
  go(0.0);
  return best;
}

int64_t MemoDistance(const std::string& a, const std::string& b) {
  std::map<std::pair<size_t, size_t>, int64_t> memo;
  std::function<int64_t(size_t, size_t)> go = [&](size_t i, size_t j) -> int64_t {
    if (i == a.size()) return static_cast<int64_t>(b.size() - j);
    if (j == b.size()) return static_cast<int64_t>(a.size() - i);
    const auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int64_t best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, go(i + 1, j) + 1);
    best = std::min(best, go(i, j + 1) + 1);
    return memo[key] = best;
  };
  return go(0, 0);
}

}  // namespace deskasr::testsupport
