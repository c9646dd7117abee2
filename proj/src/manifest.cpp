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

#include "vtc/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace vtc {

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path);
  std::vector<ManifestEntry> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
    ManifestEntry e;
    e.uri = j.at("uri").get<std::string>();
    e.audio = j.at("audio").get<std::string>();
    e.rttm = j.value("rttm", "");
    e.split = j.value("split", "");
    e.child_id = j.value("child_id", "");
    e.pin_split = j.value("pin_split", "");
    entries.push_back(std::move(e));
  }
  return entries;
}

void save_manifest(const std::string& path,
                   const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest " + path);
  for (const auto& e : entries) {
    nlohmann::json j{{"uri", e.uri}, {"audio", e.audio}};
    if (!e.rttm.empty()) j["rttm"] = e.rttm;
    if (!e.split.empty()) j["split"] = e.split;
    if (!e.child_id.empty()) j["child_id"] = e.child_id;
    if (!e.pin_split.empty()) j["pin_split"] = e.pin_split;
    out << j.dump() << '\n';
  }
}

std::vector<ManifestEntry> filter_split(
    const std::vector<ManifestEntry>& entries, const std::string& split) {
  if (split.empty()) return entries;
  std::vector<ManifestEntry> out;
  for (const auto& e : entries) {
    if (e.split == split) out.push_back(e);
  }
  return out;
}

}  // namespace vtc
