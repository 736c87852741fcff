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

#ifndef DESKASR_EVAL_EDIT_DISTANCE_H_
#define DESKASR_EVAL_EDIT_DISTANCE_H_

#include <cstdint>
#include <span>
#include <vector>

namespace deskasr::eval {

struct EditCounts {
  int64_t sub = 0;
  int64_t del = 0;
  int64_t ins = 0;
  int64_t ref_len = 0;

  int64_t distance() const { return sub + del + ins; }
  EditCounts& operator+=(const EditCounts& o) {
    sub += o.sub;
    del += o.del;
    ins += o.ins;
    ref_len += o.ref_len;
    return *this;
  }
};

// Unit-cost Levenshtein alignment. When several alignments are minimal the
// backtrace prefers substitution (or match), then deletion, then insertion.
template <typename U>
EditCounts EditDistance(std::span<const U> ref, std::span<const U> hyp) {
  const size_t n = ref.size();
  const size_t m = hyp.size();
  std::vector<int64_t> d((n + 1) * (m + 1));
  const auto at = [&](size_t i, size_t j) -> int64_t& {
    return d[i * (m + 1) + j];
  };
  for (size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int64_t>(i);
  for (size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const int64_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int64_t up = at(i - 1, j) + 1;
      const int64_t left = at(i, j - 1) + 1;
      at(i, j) = std::min(diag, std::min(up, left));
    }
  }
  EditCounts c;
  c.ref_len = static_cast<int64_t>(n);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++c.sub;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++c.del;
      --i;
    } else {
      ++c.ins;
      --j;
    }
  }
  return c;
}

template <typename U>
EditCounts EditDistance(const std::vector<U>& ref, const std::vector<U>& hyp) {
  return EditDistance(std::span<const U>(ref), std::span<const U>(hyp));
}

}  // namespace deskasr::eval

#endif  // DESKASR_EVAL_EDIT_DISTANCE_H_
