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

#include "vtc/chunk.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

namespace vtc {

Chunk sample_chunk(const LoadedRecording& rec, Rng& rng,
                   const ChunkSpec& spec) {
  const int64_t chunk_samples = spec.chunk_samples();
  const auto total = static_cast<int64_t>(rec.audio.samples.size());
  if (rec.audio.sample_rate != spec.sample_rate) {
    throw std::invalid_argument("recording '" + rec.uri +
                                "' is not at the model sample rate");
  }
  if (total < chunk_samples) {
    throw std::invalid_argument("recording '" + rec.uri +
                                "' is shorter than one chunk");
  }
  const int64_t max_onset = total - chunk_samples;
  const int64_t onset =
      max_onset == 0
          ? 0
          : static_cast<int64_t>(rng.uniform_int(
                static_cast<uint64_t>(max_onset) + 1));
  const double onset_s = static_cast<double>(onset) / spec.sample_rate;

  Chunk chunk;
  chunk.source_uri = rec.uri;
  chunk.source_onset = onset_s;
  chunk.waveform.sample_rate = spec.sample_rate;
  chunk.waveform.samples.assign(
      rec.audio.samples.begin() + onset,
      rec.audio.samples.begin() + onset + chunk_samples);

  const FrameGrid grid{
      onset_s, static_cast<double>(spec.frame_step_samples) / spec.sample_rate,
      spec.frames_per_chunk};
  chunk.labels = encode_frames(rec.reference, grid, spec.classes);
  return chunk;
}

namespace {

double mean_square(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

}  // namespace

std::vector<double> mix_at_snr(const std::vector<double>& signal,
                               const std::vector<double>& noise,
                               double snr_db) {
  if (signal.size() != noise.size())
    throw std::invalid_argument("signal and noise lengths differ");
  const double p_signal = mean_square(signal);
  const double p_noise = mean_square(noise);
  if (p_signal <= 0.0 || p_noise <= 0.0) return signal;
  const double alpha =
      std::sqrt(p_signal / (p_noise * std::pow(10.0, snr_db / 10.0)));
  std::vector<double> out(signal.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = signal[i] + alpha * noise[i];
  return out;
}

Chunk augment_additive(const Chunk& chunk, const Waveform& noise,
                       double snr_db, Rng& rng) {
  const size_t n = chunk.waveform.samples.size();
  if (noise.samples.empty()) return chunk;

  std::vector<double> slice(n);
  if (noise.samples.size() >= n) {
    const uint64_t offset = rng.uniform_int(noise.samples.size() - n + 1);
    std::copy_n(noise.samples.begin() + static_cast<int64_t>(offset), n,
                slice.begin());
  } else {
    const uint64_t offset = rng.uniform_int(noise.samples.size());
    for (size_t i = 0; i < n; ++i)
      slice[i] = noise.samples[(offset + i) % noise.samples.size()];
  }

  Chunk out = chunk;
  out.waveform.samples = mix_at_snr(chunk.waveform.samples, slice, snr_db);
  return out;
}

NoiseCorpus load_noise_corpus(const std::string& dir, int target_rate,
                              const std::string& cache_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw std::runtime_error("noise directory not found: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  NoiseCorpus corpus;
  for (const auto& p : paths)
    corpus.noises.push_back(load_audio(p, target_rate, cache_dir));
  return corpus;
}

}  // namespace vtc
