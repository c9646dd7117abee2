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

#include "vtc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <stdexcept>

#include "vtc/annotation.hpp"
#include "vtc/audio.hpp"
#include "vtc/rng.hpp"
#include "vtc/rttm.hpp"

namespace vtc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Band {
  VoiceClass cls;
  double lo_hz;
  double hi_hz;
};

// Disjoint bands keep the classes spectrally separable.
constexpr Band kVoiceBands[] = {
    {VoiceClass::KCHI, 2200.0, 3400.0},
    {VoiceClass::FEM, 700.0, 1400.0},
    {VoiceClass::MAL, 120.0, 380.0},
};
constexpr Band kUnkBand = {VoiceClass::UNK, 450.0, 600.0};

double quantize_ms(double t) { return std::round(t * 1000.0) / 1000.0; }

// Sum of six random sinusoids inside the band, with 10 ms raised-cosine
// attack and release so bursts do not click.
void add_burst(std::vector<double>* samples, int rate, const Band& band,
               double onset, double offset, Rng& rng) {
  constexpr int kSines = 6;
  constexpr double kAmp = 0.075;
  double freqs[kSines], phases[kSines];
  for (int i = 0; i < kSines; ++i) {
    freqs[i] = rng.uniform(band.lo_hz, band.hi_hz);
    phases[i] = rng.uniform(0.0, kTwoPi);
  }
  const auto first = static_cast<int64_t>(std::llround(onset * rate));
  const auto last = std::min<int64_t>(
      static_cast<int64_t>(std::llround(offset * rate)),
      static_cast<int64_t>(samples->size()));
  const double ramp = 0.010;
  for (int64_t n = first; n < last; ++n) {
    const double t = static_cast<double>(n) / rate;
    double envelope = 1.0;
    const double into = t - onset;
    const double left = offset - t;
    if (into < ramp) {
      envelope = 0.5 - 0.5 * std::cos(std::numbers::pi * into / ramp);
    } else if (left < ramp) {
      envelope = 0.5 - 0.5 * std::cos(std::numbers::pi * left / ramp);
    }
    double v = 0.0;
    for (int i = 0; i < kSines; ++i) {
      v += kAmp * std::sin(kTwoPi * freqs[i] * t + phases[i]);
    }
    (*samples)[static_cast<size_t>(n)] += envelope * v;
  }
}

}  // namespace

SynthCorpus generate_synthetic_corpus(const std::string& out_dir,
                                      const SynthConfig& config) {
  namespace fs = std::filesystem;
  if (config.recordings < 1 || config.children < 1 ||
      config.recording_seconds < 10.0) {
    throw std::invalid_argument(
        "synth: need >= 1 recording of >= 10 s and >= 1 child");
  }
  const fs::path root = fs::absolute(out_dir);
  const fs::path wav_dir = root / "wav";
  const fs::path rttm_dir = root / "rttm";
  const fs::path noise_dir = root / "noise";
  fs::create_directories(wav_dir);
  fs::create_directories(rttm_dir);
  fs::create_directories(noise_dir);

  SynthCorpus corpus;
  corpus.noise_dir = noise_dir.string();

  const int rate = config.sample_rate;
  for (int r = 0; r < config.recordings; ++r) {
    Rng rng(derive_seed(config.seed, 1000 + static_cast<uint64_t>(r)));
    char uri_buf[32];
    std::snprintf(uri_buf, sizeof(uri_buf), "rec_%03d", r);
    const std::string uri(uri_buf);

    const auto n =
        static_cast<size_t>(std::llround(config.recording_seconds * rate));
    std::vector<double> samples(n);
    for (size_t i = 0; i < n; ++i) {
      samples[i] = 0.008 * (2.0 * rng.uniform() - 1.0);  // noise floor
    }

    Annotation reference{uri, {}};
    double t = 0.5;
    int burst_index = 0;
    while (t < config.recording_seconds - 3.0) {
      const double onset = quantize_ms(t + rng.uniform(0.2, 1.4));
      const double length = rng.uniform(0.6, 2.2);
      const double offset = quantize_ms(
          std::min(onset + length, config.recording_seconds - 0.2));
      if (offset - onset < 0.3) {
        t = onset + 0.5;
        continue;
      }
      // The first three bursts cycle through the voice classes so every
      // recording contains each of them.
      Band band = kVoiceBands[burst_index < 3
                                  ? burst_index
                                  : static_cast<int>(rng.uniform_int(3))];
      if (burst_index >= 3 && rng.uniform() < config.unk_prob) {
        band = kUnkBand;
      }
      add_burst(&samples, rate, band, onset, offset, rng);
      reference.entries.push_back({{onset, offset}, band.cls});
      double end = offset;

      if (burst_index >= 3 && band.cls != VoiceClass::UNK &&
          rng.uniform() < config.overlap_prob) {
        Band other = kVoiceBands[rng.uniform_int(3)];
        while (other.cls == band.cls) {
          other = kVoiceBands[rng.uniform_int(3)];
        }
        const double onset2 =
            quantize_ms(onset + rng.uniform(0.2, 0.6 * (offset - onset)));
        const double offset2 = quantize_ms(
            std::min(onset2 + rng.uniform(0.5, 2.0),
                     config.recording_seconds - 0.2));
        if (offset2 - onset2 >= 0.3) {
          add_burst(&samples, rate, other, onset2, offset2, rng);
          reference.entries.push_back({{onset2, offset2}, other.cls});
          end = std::max(end, offset2);
        }
      }
      t = end;
      ++burst_index;
    }

    Waveform audio;
    audio.sample_rate = rate;
    audio.samples = std::move(samples);
    const std::string wav_path = (wav_dir / (uri + ".wav")).string();
    const std::string rttm_path = (rttm_dir / (uri + ".rttm")).string();
    write_wav(wav_path, audio);
    write_rttm_file(rttm_path, reference.normalized());

    ManifestEntry entry;
    entry.uri = uri;
    entry.audio = wav_path;
    entry.rttm = rttm_path;
    entry.split = config.split;
    entry.child_id =
        "child_" + std::to_string(r % std::max(1, config.children));
    corpus.entries.push_back(std::move(entry));
  }

  for (int i = 0; i < config.noise_files; ++i) {
    Rng rng(derive_seed(config.seed, 2000 + static_cast<uint64_t>(i)));
    const auto n =
        static_cast<size_t>(std::llround(config.noise_seconds * rate));
    Waveform noise;
    noise.sample_rate = rate;
    noise.samples.resize(n);
    if (i % 2 == 0) {
      for (size_t k = 0; k < n; ++k) {
        noise.samples[k] = 0.3 * (2.0 * rng.uniform() - 1.0);
      }
    } else {
      // Integrated (brown) noise, renormalized: energy sits low where the
      // voice bands are not.
      double acc = 0.0, peak = 0.0;
      for (size_t k = 0; k < n; ++k) {
        acc += 2.0 * rng.uniform() - 1.0;
        acc *= 0.999;  // leak keeps the walk bounded
        noise.samples[k] = acc;
        peak = std::max(peak, std::fabs(acc));
      }
      if (peak > 0.0) {
        for (double& s : noise.samples) {
          s *= 0.3 / peak;
        }
      }
    }
    char name[32];
    std::snprintf(name, sizeof(name), "noise_%02d.wav", i);
    write_wav((noise_dir / name).string(), noise);
  }

  corpus.manifest_path = (root / "manifest.jsonl").string();
  save_manifest(corpus.manifest_path, corpus.entries);
  return corpus;
}

}  // namespace vtc
