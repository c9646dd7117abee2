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

#ifndef VTC_CHUNK_HPP_
#define VTC_CHUNK_HPP_

#include <string>
#include <vector>

#include "vtc/audio.hpp"
#include "vtc/label_matrix.hpp"
#include "vtc/rng.hpp"

namespace vtc {

// Geometry of a training chunk and of the label grid it is rasterized on.
// frame_step_samples and frames_per_chunk come from the model's front-end
// arithmetic so that targets line up with its output frames.
struct ChunkSpec {
  double duration = 2.0;
  int sample_rate = 16000;
  int frame_step_samples = 270;
  int frames_per_chunk = 115;
  std::vector<VoiceClass> classes;

  int64_t chunk_samples() const {
    return static_cast<int64_t>(duration * sample_rate + 0.5);
  }
};

// A recording held in memory for sampling: resampled audio plus its
// SPEECH-derived reference.
struct LoadedRecording {
  std::string uri;
  Waveform audio;
  Annotation reference;
};

struct Chunk {
  Waveform waveform;
  LabelMatrix labels;
  std::string source_uri;
  double source_onset = 0.0;
};

// Draws a chunk with uniformly random onset (integer sample positions) and
// rasterizes the reference on the model's output grid for that window.
// Throws std::invalid_argument when the recording is shorter than a chunk;
// callers that sample from a corpus should exclude such recordings instead.
Chunk sample_chunk(const LoadedRecording& rec, Rng& rng,
                   const ChunkSpec& spec);

// Scales `noise` so the mix hits the target SNR exactly:
//   out = signal + alpha * noise,
//   alpha = sqrt(P_signal / (P_noise * 10^(snr_db/10)))
// with P the mean squared amplitude over the chunk. Both inputs must have
// the same length. A silent signal or silent noise returns the signal
// unchanged (no finite alpha exists).
std::vector<double> mix_at_snr(const std::vector<double>& signal,
                               const std::vector<double>& noise,
                               double snr_db);

// Crops (or cyclically tiles, when shorter) `noise` at a random offset to
// chunk length and mixes it at snr_db. Labels are untouched.
Chunk augment_additive(const Chunk& chunk, const Waveform& noise,
                       double snr_db, Rng& rng);

// Background recordings used for additive augmentation.
struct NoiseCorpus {
  std::vector<Waveform> noises;
};

// Loads every .wav under `dir` (sorted by filename), resampled to
// target_rate.
NoiseCorpus load_noise_corpus(const std::string& dir, int target_rate = 16000,
                              const std::string& cache_dir = "");

}  // namespace vtc

#endif  // VTC_CHUNK_HPP_
