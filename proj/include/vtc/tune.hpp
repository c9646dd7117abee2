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

#ifndef VTC_TUNE_HPP_
#define VTC_TUNE_HPP_

#include <map>
#include <string>
#include <vector>

#include "vtc/metrics.hpp"
#include "vtc/score_track.hpp"
#include "vtc/sliding.hpp"

namespace vtc {

// Scores of one checkpoint over a whole evaluation set.
struct EpochScores {
  int epoch = 0;
  std::string checkpoint_path;
  std::map<std::string, ScoreTrack> scores;  // by uri
};

// 0.05, 0.10, ..., 0.95.
std::vector<double> default_threshold_grid();

struct TuneResult {
  int best_epoch = 0;
  std::string checkpoint_path;
  Thresholds thresholds;
  double best_average_f = 0.0;
  std::vector<double> grid;
  // F per grid value at the chosen epoch, one curve per class.
  std::map<VoiceClass, std::vector<double>> f_by_sigma;
  std::vector<std::pair<int, double>> average_f_by_epoch;
};

// Exhaustive sweep: for each epoch, each class picks the grid threshold
// maximizing its F on the references (ties keep the lower threshold); the
// epoch maximizing the resulting class-average F wins (ties keep the
// earlier epoch). Thresholding here is the same strict comparison apply
// uses, so applying the tuned configuration reproduces these F values.
TuneResult tune_thresholds(
    const std::vector<EpochScores>& epochs,
    const std::map<std::string, Annotation>& refs,
    const std::vector<double>& grid = default_threshold_grid(),
    const std::map<std::string, std::vector<Segment>>& uem = {});

// Per-class F(sigma) curves at the chosen epoch as CSV (sigma plus one
// column per class) and as a standalone SVG chart.
void write_threshold_curves_csv(const std::string& path, const TuneResult& r);
void write_threshold_curves_svg(const std::string& path, const TuneResult& r);

}  // namespace vtc

#endif  // VTC_TUNE_HPP_
