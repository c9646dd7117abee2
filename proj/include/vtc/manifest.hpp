// Copyright (c) 2026 The voicetype authors
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

#ifndef VTC_MANIFEST_HPP_
#define VTC_MANIFEST_HPP_

#include <string>
#include <vector>

namespace vtc {

// One recording: JSON object per line in the manifest file.
// {"uri": ..., "audio": ..., "rttm": ..., "split": ..., "child_id": ...}
struct ManifestEntry {
  std::string uri;
  std::string audio;
  std::string rttm;
  std::string split;      // "train" | "dev" | "test" | "" (unassigned)
  std::string child_id;
  std::string pin_split;  // optional: forces the split helper's assignment
};

std::vector<ManifestEntry> load_manifest(const std::string& path);
void save_manifest(const std::string& path,
                   const std::vector<ManifestEntry>& entries);

// Entries belonging to one split ("" selects everything).
std::vector<ManifestEntry> filter_split(
    const std::vector<ManifestEntry>& entries, const std::string& split);

}  // namespace vtc

#endif  // VTC_MANIFEST_HPP_
