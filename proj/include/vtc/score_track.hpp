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

#ifndef VTC_SCORE_TRACK_HPP_
#define VTC_SCORE_TRACK_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vtc/annotation.hpp"
#include "vtc/label_matrix.hpp"

namespace vtc {

// Per-frame class scores for one recording on a uniform frame grid.
struct ScoreTrack {
  FrameGrid grid;
  std::vector<VoiceClass> classes;
  Eigen::MatrixXd values;  // grid.count rows, one column per class
};

// Raw double dump plus a `<path>.json` sidecar recording the grid and the
// class column order.
void write_score_track(const std::string& path, const ScoreTrack& track);
ScoreTrack read_score_track(const std::string& path);

}  // namespace vtc

#endif  // VTC_SCORE_TRACK_HPP_
