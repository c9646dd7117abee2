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

#ifndef VTC_LABEL_MATRIX_HPP_
#define VTC_LABEL_MATRIX_HPP_

#include <cstdint>
#include <vector>

#include "vtc/annotation.hpp"

namespace vtc {

// Uniform frame grid: frame i covers [start + i*step, start + (i+1)*step).
struct FrameGrid {
  double start = 0.0;
  double step = 0.0;
  int64_t count = 0;

  double midpoint(int64_t i) const { return start + (i + 0.5) * step; }
  Segment frame(int64_t i) const {
    return {start + i * step, start + (i + 1) * step};
  }
  double end() const { return start + count * step; }
};

// Binary frame activations, frames x classes, row-major.
struct LabelMatrix {
  FrameGrid grid;
  std::vector<VoiceClass> classes;
  std::vector<uint8_t> values;  // grid.count * classes.size()

  uint8_t at(int64_t frame, size_t cls) const {
    return values[frame * classes.size() + cls];
  }
  uint8_t& at(int64_t frame, size_t cls) {
    return values[frame * classes.size() + cls];
  }
};

// Rasterizes an annotation on a frame grid. A frame is active for a class
// iff its midpoint lies inside one of that class's entries. The midpoint
// rule keeps boundary frames stable: a segment exactly one step long and
// aligned to the grid activates exactly one frame.
LabelMatrix encode_frames(const Annotation& a, const FrameGrid& grid,
                          const std::vector<VoiceClass>& classes);

// Inverse rasterization: maximal runs of active frames become segments
// spanning [first frame start, last frame end). On grid-aligned
// annotations decode_frames(encode_frames(a)) reproduces a.
Annotation decode_frames(const LabelMatrix& m, const std::string& uri = "");

}  // namespace vtc

#endif  // VTC_LABEL_MATRIX_HPP_
