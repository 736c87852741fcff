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

#include "aed/beam_search.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace deskasr::aed {

double NormalizedScore(const Hypothesis& h, double length_penalty) {
  if (length_penalty == 0.0) return h.score;
  const double len = static_cast<double>(std::max<size_t>(1, h.length()));
  return h.score / std::pow(len, length_penalty);
}

bool RanksBefore(const Hypothesis& a, const Hypothesis& b,
                 double length_penalty) {
  const double sa = NormalizedScore(a, length_penalty);
  const double sb = NormalizedScore(b, length_penalty);
  if (sa != sb) return sa > sb;
  return a.tokens < b.tokens;
}

namespace {

void CheckOptions(const BeamSearchOptions& opts) {
  if (opts.beam < 1) throw std::invalid_argument("beam must be >= 1");
  if (opts.max_len < 1) throw std::invalid_argument("max_len must be >= 1");
}

std::vector<double> Step(const StepFunction& step, const std::vector<int>& prefix) {
  std::vector<double> lp = step(prefix);
  if (lp.empty()) throw std::runtime_error("step function returned no scores");
  return lp;
}

}  // namespace

BeamSearchResult BeamSearch(const StepFunction& step,
                            const BeamSearchOptions& opts) {
  CheckOptions(opts);
  std::vector<Hypothesis> live{{{opts.sos}, 0.0, false}};
  std::vector<Hypothesis> finished;
  for (int t = 0; t < opts.max_len && !live.empty(); ++t) {
    std::vector<Hypothesis> candidates;
    for (const Hypothesis& h : live) {
      const std::vector<double> lp = Step(step, h.tokens);
      for (size_t v = 0; v < lp.size(); ++v) {
        Hypothesis c{h.tokens, h.score + lp[v], false};
        c.tokens.push_back(static_cast<int>(v));
        c.finished = static_cast<int>(v) == opts.eos;
        candidates.push_back(std::move(c));
      }
    }
    const size_t keep = std::min(candidates.size(), static_cast<size_t>(opts.beam));
    std::partial_sort(candidates.begin(), candidates.begin() + keep,
                      candidates.end(), [](const Hypothesis& a, const Hypothesis& b) {
                        return RanksBefore(a, b, 0.0);
                      });
    live.clear();
    for (size_t i = 0; i < keep; ++i) {
      if (candidates[i].finished) {
        finished.push_back(std::move(candidates[i]));
      } else {
        live.push_back(std::move(candidates[i]));
      }
    }
  }
  BeamSearchResult result;
  if (finished.empty()) {
    result.truncated = true;
    result.hypotheses = std::move(live);
  } else {
    result.hypotheses = std::move(finished);
  }
  std::sort(result.hypotheses.begin(), result.hypotheses.end(),
            [&](const Hypothesis& a, const Hypothesis& b) {
              return RanksBefore(a, b, opts.length_penalty);
            });
  return result;
}

Hypothesis GreedySearch(const StepFunction& step, const BeamSearchOptions& opts) {
  CheckOptions(opts);
  Hypothesis h{{opts.sos}, 0.0, false};
  for (int t = 0; t < opts.max_len; ++t) {
    const std::vector<double> lp = Step(step, h.tokens);
    const auto best = std::max_element(lp.begin(), lp.end());
    const int token = static_cast<int>(best - lp.begin());
    h.tokens.push_back(token);
    h.score += *best;
    if (token == opts.eos) {
      h.finished = true;
      break;
    }
  }
  return h;
}

}  // namespace deskasr::aed
