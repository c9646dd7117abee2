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

#ifndef VTC_TRAINER_HPP_
#define VTC_TRAINER_HPP_

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "vtc/chunk.hpp"
#include "vtc/manifest.hpp"
#include "vtc/model.hpp"

namespace vtc {

struct TrainConfig {
  int epochs = 10;
  // Audio sampled per epoch, in seconds (the default matches full-corpus
  // runs at 240 h; desk runs override this down to minutes).
  double epoch_seconds = 240.0 * 3600.0;
  int batch_size = 32;
  double base_lr = 1e-4;
  double max_lr = 1e-2;
  double cycle_epochs = 1.5;
  double momentum = 0.9;
  uint64_t seed = 42;
  // "multitask" or "binary:<CLASS>". Multitask scores every output class
  // with one model; binary mode restricts the model to a single class.
  std::string mode = "multitask";
  bool augment = false;
  std::string noise_dir;
  double snr_min_db = 5.0;
  double snr_max_db = 20.0;
  double augment_prob = 0.5;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  static TrainConfig from_json(const nlohmann::json& j, const TrainConfig& base);
};

// Output classes selected by a mode string; throws on anything that is not
// "multitask" or "binary:<CLASS>" with a predictable class.
std::vector<VoiceClass> classes_for_mode(const std::string& mode);

struct TrainResult {
  std::vector<std::string> checkpoint_paths;  // epoch order
  std::vector<double> epoch_losses;
  std::string log_path;
};

// Recordings from the manifest's train split held in memory with their
// SPEECH-derived references; entries shorter than one chunk are dropped
// with a warning. When no entry carries any split, everything is used.
std::vector<LoadedRecording> load_training_set(
    const std::vector<ManifestEntry>& manifest, int sample_rate,
    double min_duration, const std::string& cache_dir);

// SGD with momentum under the cyclical schedule. Writes one checkpoint per
// epoch (epoch_NNN.ckpt) plus a JSONL log of {epoch, step, lr, loss} into
// out_dir. Identical inputs and seed produce bit-identical checkpoints.
TrainResult train(const ModelConfig& base_model, const TrainConfig& config,
                  const std::vector<ManifestEntry>& manifest,
                  const std::string& out_dir, const std::string& cache_dir = "");

// One single-class model per output class, trained with the same
// configuration and per-class derived seeds, under out_dir/binary_<CLASS>/.
std::map<VoiceClass, TrainResult> train_binary_suite(
    const ModelConfig& base_model, const TrainConfig& config,
    const std::vector<ManifestEntry>& manifest, const std::string& out_dir,
    const std::string& cache_dir = "");

}  // namespace vtc

#endif  // VTC_TRAINER_HPP_
