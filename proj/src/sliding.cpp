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

#include "vtc/sliding.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "json.hpp"
#include "vtc/label_matrix.hpp"
#include "vtc/rttm.hpp"

namespace vtc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void SlidingSpec::validate() const {
  if (!(window > 0.0)) {
    throw std::invalid_argument("sliding: window must be positive");
  }
  if (!(step > 0.0) || step > window + kTimeEpsilon) {
    throw std::invalid_argument("sliding: need 0 < step <= window");
  }
}

ScoreTrack slide_scores(FrameScorer& scorer, const Waveform& audio,
                        const SlidingSpec& spec) {
  spec.validate();
  const int rate = scorer.sample_rate();
  if (audio.sample_rate != rate) {
    throw std::invalid_argument(
        "slide_scores: audio rate " + std::to_string(audio.sample_rate) +
        " differs from the model's " + std::to_string(rate));
  }
  const int64_t window = scorer.window_samples();
  const double scorer_window_s = static_cast<double>(window) / rate;
  if (std::fabs(spec.window - scorer_window_s) > kTimeEpsilon) {
    throw std::invalid_argument("slide_scores: window " +
                                std::to_string(spec.window) +
                                "s does not match the model's " +
                                std::to_string(scorer_window_s) + "s");
  }
  const auto step =
      static_cast<int64_t>(std::llround(spec.step * rate));
  if (step < 1) {
    throw std::invalid_argument("slide_scores: step under one sample");
  }
  const auto n = static_cast<int64_t>(audio.samples.size());
  if (n == 0) {
    throw std::invalid_argument("slide_scores: empty audio");
  }

  // Window onsets in samples: a regular grid, plus an end-anchored window
  // whenever the grid does not already land on the tail.
  std::vector<int64_t> onsets;
  for (int64_t t = 0; t + window <= n; t += step) {
    onsets.push_back(t);
  }
  if (onsets.empty()) {
    onsets.push_back(0);  // short recording: single zero-padded window
  } else if (onsets.back() + window < n) {
    onsets.push_back(n - window);
  }

  const int frame_step = scorer.frame_step_samples();
  const int frames_per_window = scorer.frames_per_window();
  const std::vector<VoiceClass> classes = scorer.classes();
  const auto k = static_cast<int64_t>(classes.size());

  const int64_t last_bin0 = static_cast<int64_t>(
      std::llround(static_cast<double>(onsets.back()) / frame_step));
  int64_t total_bins = last_bin0 + frames_per_window;
  // Zero-padded frames beyond the recording are dropped.
  const int64_t real_bins = (n + frame_step - 1) / frame_step;
  total_bins = std::min(total_bins, real_bins);

  MatrixXd sums = MatrixXd::Zero(total_bins, k);
  VectorXd counts = VectorXd::Zero(total_bins);
  // Summing k copies of v and dividing by k can land one ulp off v, so bins
  // whose contributions are all identical short-circuit to that value.
  MatrixXd first(total_bins, k);
  std::vector<uint8_t> all_equal(static_cast<size_t>(total_bins * k), 1);

  VectorXd window_buf(window);
  for (const int64_t onset : onsets) {
    window_buf.setZero();
    const int64_t available = std::min(window, n - onset);
    for (int64_t i = 0; i < available; ++i) {
      window_buf(i) = audio.samples[onset + i];
    }
    const MatrixXd scores = scorer.score_window(window_buf);
    if (scores.rows() != frames_per_window || scores.cols() != k) {
      throw std::logic_error("slide_scores: scorer shape mismatch");
    }
    const int64_t bin0 = static_cast<int64_t>(
        std::llround(static_cast<double>(onset) / frame_step));
    for (int64_t i = 0; i < frames_per_window; ++i) {
      const int64_t bin = bin0 + i;
      if (bin >= total_bins) break;
      if (counts(bin) == 0.0) {
        first.row(bin) = scores.row(i);
      } else {
        for (int64_t c = 0; c < k; ++c) {
          if (scores(i, c) != first(bin, c)) {
            all_equal[static_cast<size_t>(bin * k + c)] = 0;
          }
        }
      }
      sums.row(bin) += scores.row(i);
      counts(bin) += 1.0;
    }
  }

  ScoreTrack track;
  track.grid.start = 0.0;
  track.grid.step = static_cast<double>(frame_step) / rate;
  track.grid.count = total_bins;
  track.classes = classes;
  track.values.resize(total_bins, k);
  for (int64_t bin = 0; bin < total_bins; ++bin) {
    if (counts(bin) <= 0.0) {
      throw std::logic_error("slide_scores: uncovered frame bin");
    }
    for (int64_t c = 0; c < k; ++c) {
      track.values(bin, c) = all_equal[static_cast<size_t>(bin * k + c)]
                                 ? first(bin, c)
                                 : sums(bin, c) / counts(bin);
    }
  }
  return track;
}

Thresholds Thresholds::uniform(double sigma,
                               const std::vector<VoiceClass>& classes) {
  Thresholds t;
  for (const VoiceClass c : classes) {
    t.sigma[c] = sigma;
  }
  return t;
}

void save_thresholds(const std::string& path, const Thresholds& t, int epoch,
                     const std::string& checkpoint) {
  nlohmann::json sigma;
  for (const auto& [cls, value] : t.sigma) {
    sigma[std::string(to_string(cls))] = value;
  }
  nlohmann::json doc{{"thresholds", sigma}};
  if (epoch > 0) doc["epoch"] = epoch;
  if (!checkpoint.empty()) doc["checkpoint"] = checkpoint;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

Thresholds load_thresholds(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open thresholds file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  Thresholds t;
  for (const auto& [name, value] : doc.at("thresholds").items()) {
    t.sigma[voice_class_from_string(name)] = value.get<double>();
  }
  return t;
}

Annotation binarize(const ScoreTrack& track, const Thresholds& thresholds,
                    const std::string& uri) {
  LabelMatrix labels;
  labels.grid = track.grid;
  labels.classes = track.classes;
  labels.values.assign(
      static_cast<size_t>(track.grid.count) * track.classes.size(), 0);
  for (size_t c = 0; c < track.classes.size(); ++c) {
    const auto it = thresholds.sigma.find(track.classes[c]);
    if (it == thresholds.sigma.end()) {
      throw std::invalid_argument(
          "binarize: no threshold for class " +
          std::string(to_string(track.classes[c])));
    }
    const double sigma = it->second;
    for (int64_t f = 0; f < track.grid.count; ++f) {
      labels.at(f, c) =
          track.values(f, static_cast<int64_t>(c)) > sigma ? 1 : 0;
    }
  }
  return decode_frames(labels, uri);
}

std::map<std::string, ScoreTrack> score_files(
    FrameScorer& scorer, const std::vector<ManifestEntry>& entries,
    const SlidingSpec& spec, const std::string& cache_dir) {
  std::map<std::string, ScoreTrack> tracks;
  for (const ManifestEntry& entry : entries) {
    const Waveform audio =
        load_audio(entry.audio, scorer.sample_rate(), cache_dir);
    tracks[entry.uri] = slide_scores(scorer, audio, spec);
  }
  return tracks;
}

ApplyResult apply_files(FrameScorer& scorer, const Thresholds& thresholds,
                        const std::vector<ManifestEntry>& entries,
                        const ApplyOptions& options) {
  namespace fs = std::filesystem;
  options.sliding.validate();
  if (options.out_dir.empty()) {
    throw std::invalid_argument("apply: out_dir is required");
  }
  fs::create_directories(options.out_dir);
  if (!options.score_dir.empty()) {
    fs::create_directories(options.score_dir);
  }

  ApplyResult result;
  for (const ManifestEntry& entry : entries) {
    try {
      const Waveform audio = load_audio(entry.audio, scorer.sample_rate(),
                                        options.cache_dir);
      const ScoreTrack track = slide_scores(scorer, audio, options.sliding);
      if (!options.score_dir.empty()) {
        write_score_track(
            (fs::path(options.score_dir) / (entry.uri + ".scores")).string(),
            track);
      }
      const Annotation hyp = binarize(track, thresholds, entry.uri);
      const std::string rttm_path =
          (fs::path(options.out_dir) / (entry.uri + ".rttm")).string();
      write_rttm_file(rttm_path, hyp);
      result.rttm_paths.push_back(rttm_path);
    } catch (const std::exception& e) {
      std::cerr << "[apply] " << entry.uri << " failed: " << e.what() << "\n";
      result.failed_uris.push_back(entry.uri);
    }
  }
  return result;
}

}  // namespace vtc
