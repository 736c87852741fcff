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

#ifndef DESKASR_FRONTEND_CMVN_H_
#define DESKASR_FRONTEND_CMVN_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "frontend/fbank.h"

namespace deskasr::frontend {

inline constexpr double kVarianceFloor = 1e-10;

// Corpus-global statistics.
struct CmvnStats {
  std::vector<double> mean;
  std::vector<double> variance;
  int64_t frame_count = 0;

  static CmvnStats Identity();
  bool fitted() const { return frame_count > 0; }
};

CmvnStats FitCmvn(std::span<const FeatureMatrix> corpus);
FeatureMatrix ApplyCmvn(const FeatureMatrix& f, const CmvnStats& s);
FeatureMatrix InvertCmvn(const FeatureMatrix& f, const CmvnStats& s);

std::string SerializeCmvn(const CmvnStats& s);
CmvnStats ParseCmvn(const std::string& text);
void SaveCmvn(const std::string& path, const CmvnStats& s);
CmvnStats LoadCmvn(const std::string& path);

}  // namespace deskasr::frontend

#endif  // DESKASR_FRONTEND_CMVN_H_
