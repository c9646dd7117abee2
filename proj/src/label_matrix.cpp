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

#include "vtc/label_matrix.hpp"

#include <stdexcept>

namespace vtc {

LabelMatrix encode_frames(const Annotation& a, const FrameGrid& grid,
                          const std::vector<VoiceClass>& classes) {
  if (grid.step <= 0.0) throw std::invalid_argument("frame step must be > 0");
  LabelMatrix m;
  m.grid = grid;
  m.classes = classes;
  m.values.assign(static_cast<size_t>(grid.count) * classes.size(), 0);
  for (size_t c = 0; c < classes.size(); ++c) {
    const auto segments = a.support(classes[c]);
    size_t s = 0;
    for (int64_t i = 0; i < grid.count; ++i) {
      const double mid = grid.midpoint(i);
      while (s < segments.size() && segments[s].offset - kTimeEpsilon <= mid)
        ++s;
      if (s < segments.size() && segments[s].contains(mid)) m.at(i, c) = 1;
    }
  }
  return m;
}

Annotation decode_frames(const LabelMatrix& m, const std::string& uri) {
  Annotation a;
  a.uri = uri;
  for (size_t c = 0; c < m.classes.size(); ++c) {
    int64_t run_start = -1;
    for (int64_t i = 0; i <= m.grid.count; ++i) {
      const bool active = i < m.grid.count && m.at(i, c) != 0;
      if (active && run_start < 0) {
        run_start = i;
      } else if (!active && run_start >= 0) {
        a.entries.push_back({{m.grid.frame(run_start).onset,
                              m.grid.frame(i - 1).offset},
                             m.classes[c]});
        run_start = -1;
      }
    }
  }
  return a.normalized();
}

}  // namespace vtc
