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

#ifndef VTC_SLIDING_HPP_
#define VTC_SLIDING_HPP_

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "vtc/audio.hpp"
#include "vtc/manifest.hpp"
#include "vtc/model.hpp"
#include "vtc/score_track.hpp"

namespace vtc {

// Anything that turns a fixed-length window of samples into per-frame class
// scores. Kept abstract so inference logic can be exercised with stubs.
class FrameScorer {
 public:
  virtual ~FrameScorer() = default;
  virtual int sample_rate() const = 0;
  virtual int64_t window_samples() const = 0;
  virtual int frame_step_samples() const = 0;
  virtual int frames_per_window() const = 0;
  virtual std::vector<VoiceClass> classes() const = 0;
  // scores (frames_per_window x classes) for exactly window_samples samples
  virtual Eigen::MatrixXd score_window(const Eigen::VectorXd& samples) = 0;
};

// FrameScorer view over a trained classifier.
class ModelScorer : public FrameScorer {
 public:
  explicit ModelScorer(const FrameClassifier& model) : model_(model) {}
  int sample_rate() const override { return model_.config().sample_rate; }
  int64_t window_samples() const override {
    return model_.config().chunk_samples();
  }
  int frame_step_samples() const override {
    return model_.config().frame_step_samples();
  }
  int frames_per_window() const override {
    return model_.config().frames_per_chunk();
  }
  std::vector<VoiceClass> classes() const override {
    return model_.config().classes;
  }
  Eigen::MatrixXd score_window(const Eigen::VectorXd& samples) override {
    return model_.score(samples);
  }

 private:
  const FrameClassifier& model_;
};

struct SlidingSpec {
  double window = 2.0;  // seconds, must equal the scorer's window
  double step = 0.5;    // seconds, in (0, window]

  void validate() const;
};

// Scores a whole recording with overlapping windows. Frames from different
// windows that land on the same global grid bin (window onset is rounded to
// the nearest bin) are averaged. The last window is anchored at
// duration - window so the tail is always covered; recordings shorter than
// one window are zero-padded and the padding frames cropped from the
// output.
ScoreTrack slide_scores(FrameScorer& scorer, const Waveform& audio,
                        const SlidingSpec& spec);

// Per-class decision thresholds.
struct Thresholds {
  std::map<VoiceClass, double> sigma;

  // Uniform threshold for every output class.
  static Thresholds uniform(double sigma,
                            const std::vector<VoiceClass>& classes);
};

void save_thresholds(const std::string& path, const Thresholds& t,
                     int epoch = 0, const std::string& checkpoint = "");
Thresholds load_thresholds(const std::string& path);

// Frames scoring strictly above sigma[class] become active; maximal runs
// become segments. Throws when a track class has no threshold.
Annotation binarize(const ScoreTrack& track, const Thresholds& thresholds,
                    const std::string& uri);

// Scores every entry, keyed by uri. Unlike apply_files, any failure is
// fatal: tuning on partial data would silently bias thresholds.
std::map<std::string, ScoreTrack> score_files(
    FrameScorer& scorer, const std::vector<ManifestEntry>& entries,
    const SlidingSpec& spec, const std::string& cache_dir = "");

struct ApplyOptions {
  SlidingSpec sliding;
  std::string out_dir;        // RTTM output, one file per uri
  std::string score_dir;      // when non-empty, raw score dumps too
  std::string cache_dir;
};

struct ApplyResult {
  std::vector<std::string> rttm_paths;
  std::vector<std::string> failed_uris;
};

// Runs the scorer over every manifest entry. A failure on one recording is
// reported and skipped, not fatal; callers turn failed_uris into a nonzero
// exit code.
ApplyResult apply_files(FrameScorer& scorer, const Thresholds& thresholds,
                        const std::vector<ManifestEntry>& entries,
                        const ApplyOptions& options);

}  // namespace vtc

#endif  // VTC_SLIDING_HPP_
