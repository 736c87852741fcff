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

#include "frontend/cmvn.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace deskasr::frontend {

namespace {

void CheckStats(const CmvnStats& s) {
  if (s.mean.size() != kNumMelBins || s.variance.size() != kNumMelBins) {
    throw std::invalid_argument("CMVN statistics must have 80 dimensions");
  }
}

std::string Format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

CmvnStats CmvnStats::Identity() {
  CmvnStats s;
  s.mean.assign(kNumMelBins, 0.0);
  s.variance.assign(kNumMelBins, 1.0);
  s.frame_count = 1;
  return s;
}

CmvnStats FitCmvn(std::span<const FeatureMatrix> corpus) {
  CmvnStats s;
  s.mean.assign(kNumMelBins, 0.0);
  s.variance.assign(kNumMelBins, 0.0);
  for (const FeatureMatrix& f : corpus) {
    for (int64_t t = 0; t < f.num_frames; ++t) {
      const auto row = f.row(t);
      for (int d = 0; d < kNumMelBins; ++d) s.mean[d] += row[d];
    }
    s.frame_count += f.num_frames;
  }
  if (s.frame_count == 0) throw std::invalid_argument("empty CMVN corpus");
  const double n = static_cast<double>(s.frame_count);
  for (double& m : s.mean) m /= n;
  for (const FeatureMatrix& f : corpus) {
    for (int64_t t = 0; t < f.num_frames; ++t) {
      const auto row = f.row(t);
      for (int d = 0; d < kNumMelBins; ++d) {
        const double c = row[d] - s.mean[d];
        s.variance[d] += c * c;
      }
    }
  }
  for (double& v : s.variance) v = std::max(v / n, kVarianceFloor);
  return s;
}

FeatureMatrix ApplyCmvn(const FeatureMatrix& f, const CmvnStats& s) {
  CheckStats(s);
  FeatureMatrix out = f;
  for (int64_t t = 0; t < f.num_frames; ++t) {
    auto row = out.row(t);
    for (int d = 0; d < kNumMelBins; ++d) {
      row[d] = (row[d] - s.mean[d]) / std::sqrt(s.variance[d]);
    }
  }
  return out;
}

FeatureMatrix InvertCmvn(const FeatureMatrix& f, const CmvnStats& s) {
  CheckStats(s);
  FeatureMatrix out = f;
  for (int64_t t = 0; t < f.num_frames; ++t) {
    auto row = out.row(t);
    for (int d = 0; d < kNumMelBins; ++d) {
      row[d] = row[d] * std::sqrt(s.variance[d]) + s.mean[d];
    }
  }
  return out;
}

std::string SerializeCmvn(const CmvnStats& s) {
  CheckStats(s);
  std::string out;
  for (double m : s.mean) out += Format(m) + "\n";
  for (double v : s.variance) out += Format(v) + "\n";
  out += std::to_string(s.frame_count) + "\n";
  return out;
}

CmvnStats ParseCmvn(const std::string& text) {
  std::istringstream in(text);
  CmvnStats s;
  s.mean.resize(kNumMelBins);
  s.variance.resize(kNumMelBins);
  for (double& m : s.mean) {
    if (!(in >> m)) throw std::runtime_error("CMVN file: missing mean value");
  }
  for (double& v : s.variance) {
    if (!(in >> v)) throw std::runtime_error("CMVN file: missing variance");
    if (!(v > 0.0)) throw std::runtime_error("CMVN file: variance must be > 0");
  }
  if (!(in >> s.frame_count) || s.frame_count <= 0) {
    throw std::runtime_error("CMVN file: missing or invalid frame count");
  }
  return s;
}

void SaveCmvn(const std::string& path, const CmvnStats& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << SerializeCmvn(s);
}

CmvnStats LoadCmvn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseCmvn(ss.str());
}

}  // namespace deskasr::frontend
