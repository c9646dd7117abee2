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

#ifndef VTC_SYNTH_HPP_
#define VTC_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "vtc/manifest.hpp"

namespace vtc {

// Self-contained toy corpus: each voice class is a band-limited tone burst
// (KCHI high, FEM mid, MAL low, UNK in a band of its own) over a soft noise
// floor, so a model can separate the classes by spectrum alone. Boundaries
// are quantized to 1 ms. Everything is deterministic in the seed.
struct SynthConfig {
  int recordings = 12;
  double recording_seconds = 50.0;
  int sample_rate = 16000;
  int children = 6;
  uint64_t seed = 7;
  double overlap_prob = 0.2;  // chance of a second, overlapping class
  double unk_prob = 0.05;     // chance a burst is UNK instead
  int noise_files = 2;
  double noise_seconds = 20.0;
  std::string split;  // stamped on every entry; "" leaves them unassigned
};

struct SynthCorpus {
  std::string manifest_path;
  std::string noise_dir;
  std::vector<ManifestEntry> entries;
};

// Writes wav/, rttm/, noise/ and manifest.jsonl under out_dir. Manifest
// paths are absolute so the corpus can be used from anywhere.
SynthCorpus generate_synthetic_corpus(const std::string& out_dir,
                                      const SynthConfig& config);

}  // namespace vtc

#endif  // VTC_SYNTH_HPP_
