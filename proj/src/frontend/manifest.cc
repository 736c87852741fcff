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

#include "frontend/manifest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace deskasr::frontend {

std::vector<ManifestEntry> ParseManifest(const std::string& text,
                                         const std::string& base_dir,
                                         const std::string& origin) {
  std::vector<ManifestEntry> entries;
  std::set<std::string> ids;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    const size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": expected utt_id<TAB>wav_path<TAB>transcript");
    }
    ManifestEntry e;
    e.utt_id = line.substr(0, t1);
    e.wav_path = line.substr(t1 + 1, t2 - t1 - 1);
    e.transcript = line.substr(t2 + 1);
    if (e.utt_id.empty() || e.wav_path.empty()) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": empty utterance id or wav path");
    }
    if (!ids.insert(e.utt_id).second) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": duplicate utterance id '" + e.utt_id + "'");
    }
    const std::filesystem::path p(e.wav_path);
    if (p.is_relative() && !base_dir.empty()) {
      e.wav_path = (std::filesystem::path(base_dir) / p).string();
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ManifestEntry> ReadManifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open manifest");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseManifest(ss.str(),
                       std::filesystem::path(path).parent_path().string(),
                       path);
}

std::string FormatManifest(const std::vector<ManifestEntry>& entries) {
  std::string out;
  for (const ManifestEntry& e : entries) {
    out += e.utt_id + "\t" + e.wav_path + "\t" + e.transcript + "\n";
  }
  return out;
}

void WriteManifest(const std::string& path,
                   const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << FormatManifest(entries);
}

}  // namespace deskasr::frontend
