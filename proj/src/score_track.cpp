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

#include "vtc/score_track.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace vtc {

namespace {
constexpr char kMagic[8] = {'V', 'T', 'C', 'S', 'C', 'R', '0', '1'};
}

void write_score_track(const std::string& path, const ScoreTrack& track) {
  if (track.values.rows() != track.grid.count ||
      track.values.cols() != static_cast<int64_t>(track.classes.size())) {
    throw std::invalid_argument("score track shape does not match its grid");
  }
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write score file " + path);
    out.write(kMagic, sizeof(kMagic));
    const uint64_t rows = static_cast<uint64_t>(track.values.rows());
    const uint64_t cols = static_cast<uint64_t>(track.values.cols());
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    // Column-major: one contiguous block per class.
    out.write(reinterpret_cast<const char*>(track.values.data()),
              static_cast<std::streamsize>(rows * cols * sizeof(double)));
    if (!out) throw std::runtime_error("short write to " + path);
  }
  nlohmann::json sidecar;
  sidecar["start"] = track.grid.start;
  sidecar["step"] = track.grid.step;
  sidecar["count"] = track.grid.count;
  nlohmann::json names = nlohmann::json::array();
  for (const VoiceClass c : track.classes) {
    names.push_back(to_string(c));
  }
  sidecar["classes"] = names;
  std::ofstream side(path + ".json", std::ios::trunc);
  if (!side) throw std::runtime_error("cannot write sidecar for " + path);
  side << sidecar.dump(2) << "\n";
}

ScoreTrack read_score_track(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw std::runtime_error("missing score sidecar " + path + ".json");
  nlohmann::json sidecar;
  try {
    side >> sidecar;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ".json: " + e.what());
  }

  ScoreTrack track;
  track.grid.start = sidecar.at("start").get<double>();
  track.grid.step = sidecar.at("step").get<double>();
  track.grid.count = sidecar.at("count").get<int64_t>();
  for (const auto& name : sidecar.at("classes")) {
    track.classes.push_back(voice_class_from_string(name.get<std::string>()));
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open score file " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path + ": not a score file");
  }
  uint64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (rows != static_cast<uint64_t>(track.grid.count) ||
      cols != track.classes.size()) {
    throw std::runtime_error(path + ": shape disagrees with sidecar");
  }
  track.values.resize(static_cast<int64_t>(rows), static_cast<int64_t>(cols));
  in.read(reinterpret_cast<char*>(track.values.data()),
          static_cast<std::streamsize>(rows * cols * sizeof(double)));
  if (!in) throw std::runtime_error(path + ": truncated score data");
  return track;
}

}  // namespace vtc
