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

#ifndef VTC_AUDIO_HPP_
#define VTC_AUDIO_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace vtc {

struct Waveform {
  std::vector<double> samples;  // nominal range [-1, 1]
  int sample_rate = 16000;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// PCM WAV reader. Handles 8/16/24/32-bit integer and 32/64-bit float
// payloads; multi-channel input is averaged down to mono. Amplitudes are
// normalized by the sample type's maximum.
Waveform read_wav(const std::string& path);

// 16-bit PCM mono writer, values clipped to [-1, 1].
void write_wav(const std::string& path, const Waveform& w);

// Duration in seconds read from the header alone (no payload decode).
double wav_duration(const std::string& path);

// Windowed-sinc resampler (Hann window, `zero_crossings` sinc lobes each
// side). Output length is round(n_in * out_rate / in_rate). A fixed kernel
// keeps results deterministic across runs.
std::vector<double> resample_sinc(const std::vector<double>& in, int in_rate,
                                  int out_rate, int zero_crossings = 16);

struct ResampleSpec {
  int zero_crossings = 16;
  std::string window = "hann";
};

// Reads, downmixes and resamples a recording to `target_rate`. When
// `cache_dir` is non-empty (normally from the VOICETYPE_CACHE environment
// variable), the resampled waveform is cached there keyed by path, file
// size, mtime and rate.
Waveform load_audio(const std::string& path, int target_rate = 16000,
                    const std::string& cache_dir = "",
                    const ResampleSpec& spec = {});

// Cache directory from VOICETYPE_CACHE, or "" when unset.
std::string audio_cache_dir_from_env();

}  // namespace vtc

#endif  // VTC_AUDIO_HPP_
