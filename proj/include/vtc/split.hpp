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

#ifndef VTC_SPLIT_HPP_
#define VTC_SPLIT_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vtc/manifest.hpp"

namespace vtc {

struct SplitFractions {
  double train = 0.6;
  double dev = 0.2;
  double test = 0.2;
};

// Assigns every entry a split so that no child appears in two splits.
// Children (entries grouped by child_id, falling back to uri) are placed
// greedily, largest total duration first, into the split with the smallest
// fill ratio (assigned / target duration); ties go to train, then dev. Equal
// durations are ordered by a seeded shuffle. pin_split entries are honored
// before anything else. Throws when fewer than three children exist or when
// a split would end up empty.
std::vector<ManifestEntry> assign_splits(
    const std::vector<ManifestEntry>& entries,
    const std::map<std::string, double>& durations_by_uri,
    const SplitFractions& fractions, uint64_t seed);

}  // namespace vtc

#endif  // VTC_SPLIT_HPP_
