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

#ifndef DESKASR_FRONTEND_MANIFEST_H_
#define DESKASR_FRONTEND_MANIFEST_H_

#include <string>
#include <vector>

namespace deskasr::frontend {

// `utt_id<TAB>wav_path<TAB>transcript` per line.
struct ManifestEntry {
  std::string utt_id;
  std::string wav_path;
  std::string transcript;
};

// Relative wav paths are resolved against the manifest's directory.
std::vector<ManifestEntry> ReadManifest(const std::string& path);
std::vector<ManifestEntry> ParseManifest(const std::string& text,
                                         const std::string& base_dir,
                                         const std::string& origin = "");
std::string FormatManifest(const std::vector<ManifestEntry>& entries);
void WriteManifest(const std::string& path,
                   const std::vector<ManifestEntry>& entries);

}  // namespace deskasr::frontend

#endif  // DESKASR_FRONTEND_MANIFEST_H_
