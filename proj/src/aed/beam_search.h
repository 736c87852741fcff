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

#ifndef DESKASR_AED_BEAM_SEARCH_H_
#define DESKASR_AED_BEAM_SEARCH_H_

#include <functional>
#include <span>
#include <vector>

namespace deskasr::aed {

// A partial or complete token sequence. `tokens` starts with sos; `score`
// is the sum of per-step log-probabilities; finished iff the last token is
// eos.
struct Hypothesis {
  std::vector<int> tokens;
  double score = 0.0;
  bool finished = false;

  // Generated tokens, i.e. excluding the leading sos.
  size_t length() const { return tokens.empty() ? 0 : tokens.size() - 1; }
};

struct BeamSearchOptions {
  int beam = 4;
  int max_len = 16;  // generated tokens, eos included
  double length_penalty = 0.6;
  int sos = 1;
  int eos = 2;
};

struct BeamSearchResult {
  std::vector<Hypothesis> hypotheses;  // best first
  // No hypothesis finished within max_len; the list holds unfinished ones.
  bool truncated = false;
};

// log p(next | prefix) for the whole vocabulary; prefix starts with sos.
using StepFunction = std::function<std::vector<double>(std::span<const int>)>;

// score / length^alpha; alpha = 0 ranks by raw score.
double NormalizedScore(const Hypothesis& h, double length_penalty);

// Orders by normalized score (higher first), ties broken by the token
// sequence in lexicographic order.
bool RanksBefore(const Hypothesis& a, const Hypothesis& b,
                 double length_penalty);

// Label-synchronous beam search: every live hypothesis is expanded over the
// full vocabulary, the `beam` best candidates by raw score survive, and
// those ending in eos are retired to the finished list.
BeamSearchResult BeamSearch(const StepFunction& step,
                            const BeamSearchOptions& opts);

// Argmax decoding until eos or max_len (lowest id wins ties).
Hypothesis GreedySearch(const StepFunction& step, const BeamSearchOptions& opts);

}  // namespace deskasr::aed

#endif  // DESKASR_AED_BEAM_SEARCH_H_
