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

#include "vtc/split.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "vtc/rng.hpp"

namespace vtc {

namespace {

constexpr std::array<const char*, 3> kSplitNames = {"train", "dev", "test"};

struct Child {
  std::string id;
  double duration = 0.0;
  int pin = -1;  // index into kSplitNames, -1 when unpinned
};

int split_index(const std::string& name) {
  for (size_t i = 0; i < kSplitNames.size(); ++i) {
    if (name == kSplitNames[i]) return static_cast<int>(i);
  }
  throw std::invalid_argument("split: unknown split name '" + name + "'");
}

}  // namespace

std::vector<ManifestEntry> assign_splits(
    const std::vector<ManifestEntry>& entries,
    const std::map<std::string, double>& durations_by_uri,
    const SplitFractions& fractions, uint64_t seed) {
  if (!(fractions.train > 0.0) || !(fractions.dev > 0.0) ||
      !(fractions.test > 0.0)) {
    throw std::invalid_argument("split: every fraction must be positive");
  }

  // Group entries into children; an entry without child_id is its own child.
  std::map<std::string, Child> children;
  for (const ManifestEntry& e : entries) {
    const std::string id = e.child_id.empty() ? e.uri : e.child_id;
    const auto it = durations_by_uri.find(e.uri);
    if (it == durations_by_uri.end()) {
      throw std::invalid_argument("split: no duration for uri " + e.uri);
    }
    Child& child = children[id];
    child.id = id;
    child.duration += it->second;
    if (!e.pin_split.empty()) {
      const int pin = split_index(e.pin_split);
      if (child.pin >= 0 && child.pin != pin) {
        throw std::invalid_argument("split: child " + id +
                                    " pinned to two different splits");
      }
      child.pin = pin;
    }
  }
  if (children.size() < 3) {
    throw std::invalid_argument(
        "split: need at least three children to keep splits child-disjoint "
        "(got " +
        std::to_string(children.size()) + ")");
  }

  double total = 0.0;
  for (const auto& [id, child] : children) {
    total += child.duration;
  }
  const std::array<double, 3> weights = {fractions.train, fractions.dev,
                                         fractions.test};
  const double weight_sum = weights[0] + weights[1] + weights[2];
  std::array<double, 3> target{};
  for (size_t i = 0; i < 3; ++i) {
    target[i] = total * weights[i] / weight_sum;
  }

  std::array<double, 3> assigned{};
  std::map<std::string, int> placement;
  std::vector<Child> pending;
  for (const auto& [id, child] : children) {
    if (child.pin >= 0) {
      placement[id] = child.pin;
      assigned[child.pin] += child.duration;
    } else {
      pending.push_back(child);
    }
  }

  // Seeded shuffle breaks duration ties; the stable sort then orders by
  // size so the large children land while the targets are still far away.
  Rng rng(seed);
  for (size_t i = pending.size(); i > 1; --i) {
    std::swap(pending[i - 1], pending[rng.uniform_int(i)]);
  }
  std::stable_sort(pending.begin(), pending.end(),
                   [](const Child& a, const Child& b) {
                     return a.duration > b.duration;
                   });

  for (const Child& child : pending) {
    int best = 0;
    double best_ratio = assigned[0] / target[0];
    for (int i = 1; i < 3; ++i) {
      const double ratio = assigned[i] / target[i];
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best = i;
      }
    }
    placement[child.id] = best;
    assigned[best] += child.duration;
  }

  for (size_t i = 0; i < 3; ++i) {
    const bool empty = std::none_of(
        placement.begin(), placement.end(),
        [&](const auto& kv) { return kv.second == static_cast<int>(i); });
    if (empty) {
      throw std::runtime_error(std::string("split: no child landed in '") +
                               kSplitNames[i] +
                               "' (check pin_split assignments)");
    }
  }

  std::vector<ManifestEntry> out = entries;
  for (ManifestEntry& e : out) {
    const std::string id = e.child_id.empty() ? e.uri : e.child_id;
    e.split = kSplitNames[static_cast<size_t>(placement.at(id))];
  }
  return out;
}

}  // namespace vtc
