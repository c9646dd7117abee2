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

#include "vtc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "vtc/checkpoint.hpp"
#include "vtc/loss.hpp"
#include "vtc/lr_schedule.hpp"
#include "vtc/rttm.hpp"

namespace vtc {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (epoch_seconds <= 0.0) {
    throw std::invalid_argument("train: epoch_seconds must be positive");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("train: batch_size must be >= 1");
  }
  if (!(base_lr > 0.0) || max_lr < base_lr) {
    throw std::invalid_argument("train: need 0 < base_lr <= max_lr");
  }
  if (!(cycle_epochs > 0.0)) {
    throw std::invalid_argument("train: cycle_epochs must be positive");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw std::invalid_argument("train: momentum must be in [0, 1)");
  }
  if (snr_min_db > snr_max_db) {
    throw std::invalid_argument("train: snr_min_db must be <= snr_max_db");
  }
  if (augment_prob < 0.0 || augment_prob > 1.0) {
    throw std::invalid_argument("train: augment_prob must be in [0, 1]");
  }
  classes_for_mode(mode);  // throws on a malformed mode string
}

json TrainConfig::to_json() const {
  return json{{"epochs", epochs},
              {"epoch_seconds", epoch_seconds},
              {"batch_size", batch_size},
              {"base_lr", base_lr},
              {"max_lr", max_lr},
              {"cycle_epochs", cycle_epochs},
              {"momentum", momentum},
              {"seed", seed},
              {"mode", mode},
              {"augment", augment},
              {"noise_dir", noise_dir},
              {"snr_min_db", snr_min_db},
              {"snr_max_db", snr_max_db},
              {"augment_prob", augment_prob}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  return from_json(j, TrainConfig{});
}

TrainConfig TrainConfig::from_json(const json& j, const TrainConfig& base) {
  TrainConfig c = base;
  if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
  if (j.contains("epoch_seconds")) {
    c.epoch_seconds = j.at("epoch_seconds").get<double>();
  }
  if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<int>();
  if (j.contains("base_lr")) c.base_lr = j.at("base_lr").get<double>();
  if (j.contains("max_lr")) c.max_lr = j.at("max_lr").get<double>();
  if (j.contains("cycle_epochs")) {
    c.cycle_epochs = j.at("cycle_epochs").get<double>();
  }
  if (j.contains("momentum")) c.momentum = j.at("momentum").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
  if (j.contains("mode")) c.mode = j.at("mode").get<std::string>();
  if (j.contains("augment")) c.augment = j.at("augment").get<bool>();
  if (j.contains("noise_dir")) c.noise_dir = j.at("noise_dir").get<std::string>();
  if (j.contains("snr_min_db")) c.snr_min_db = j.at("snr_min_db").get<double>();
  if (j.contains("snr_max_db")) c.snr_max_db = j.at("snr_max_db").get<double>();
  if (j.contains("augment_prob")) {
    c.augment_prob = j.at("augment_prob").get<double>();
  }
  return c;
}

std::vector<VoiceClass> classes_for_mode(const std::string& mode) {
  if (mode == "multitask") {
    return output_classes();
  }
  constexpr std::string_view prefix = "binary:";
  if (mode.rfind(prefix, 0) == 0) {
    const VoiceClass cls =
        voice_class_from_string(mode.substr(prefix.size()));
    const auto outputs = output_classes();
    if (std::find(outputs.begin(), outputs.end(), cls) == outputs.end()) {
      throw std::invalid_argument("mode: " + std::string(to_string(cls)) +
                                  " is not a predictable class");
    }
    return {cls};
  }
  throw std::invalid_argument(
      "mode must be 'multitask' or 'binary:<CLASS>', got '" + mode + "'");
}

std::vector<LoadedRecording> load_training_set(
    const std::vector<ManifestEntry>& manifest, int sample_rate,
    double min_duration, const std::string& cache_dir) {
  std::vector<ManifestEntry> selected = filter_split(manifest, "train");
  if (selected.empty()) {
    const bool any_split = std::any_of(
        manifest.begin(), manifest.end(),
        [](const ManifestEntry& e) { return !e.split.empty(); });
    if (any_split) {
      throw std::runtime_error("manifest has splits but no train entries");
    }
    selected = manifest;  // unsplit manifest: use everything
  }
  std::vector<LoadedRecording> out;
  for (const ManifestEntry& entry : selected) {
    LoadedRecording rec;
    rec.uri = entry.uri;
    rec.audio = load_audio(entry.audio, sample_rate, cache_dir);
    if (rec.audio.duration() < min_duration) {
      std::cerr << "[train] skipping " << entry.uri << ": "
                << rec.audio.duration() << "s is shorter than one chunk\n";
      continue;
    }
    Annotation reference{entry.uri, {}};
    bool found = false;
    for (Annotation& a : parse_rttm_file(entry.rttm)) {
      if (a.uri == entry.uri) {
        reference = std::move(a);
        found = true;
        break;
      }
    }
    if (!found) {
      std::cerr << "[train] " << entry.rttm << " has no entries for "
                << entry.uri << "; treating the recording as non-speech\n";
    }
    rec.reference = reference.has_class(VoiceClass::SPEECH)
                        ? reference
                        : derive_speech(reference);
    out.push_back(std::move(rec));
  }
  if (out.empty()) {
    throw std::runtime_error("no usable training recordings in manifest");
  }
  return out;
}

namespace {

// Momentum buffers aligned with FrameClassifier::params() order.
struct SgdState {
  std::vector<std::vector<double>> velocity;

  explicit SgdState(const std::vector<nn::ParamRef>& params) {
    velocity.reserve(params.size());
    for (const nn::ParamRef& p : params) {
      velocity.emplace_back(static_cast<size_t>(p.size), 0.0);
    }
  }

  void step(std::vector<nn::ParamRef>& params, double lr, double momentum) {
    for (size_t i = 0; i < params.size(); ++i) {
      nn::ParamRef& p = params[i];
      std::vector<double>& v = velocity[i];
      for (int64_t k = 0; k < p.size; ++k) {
        v[k] = momentum * v[k] - lr * p.grad[k];
        p.value[k] += v[k];
      }
    }
  }
};

size_t pick_weighted(const std::vector<double>& cumulative, Rng& rng) {
  const double r = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
  return std::min<size_t>(it - cumulative.begin(), cumulative.size() - 1);
}

MatrixXd targets_from_labels(const LabelMatrix& labels) {
  const int64_t frames = labels.grid.count;
  const auto k = static_cast<int64_t>(labels.classes.size());
  MatrixXd y(frames, k);
  for (int64_t f = 0; f < frames; ++f) {
    for (int64_t c = 0; c < k; ++c) {
      y(f, c) = labels.at(f, static_cast<size_t>(c));
    }
  }
  return y;
}

}  // namespace

TrainResult train(const ModelConfig& base_model, const TrainConfig& config,
                  const std::vector<ManifestEntry>& manifest,
                  const std::string& out_dir, const std::string& cache_dir) {
  config.validate();
  ModelConfig model_config = base_model;
  model_config.classes = classes_for_mode(config.mode);
  model_config.validate();

  std::filesystem::create_directories(out_dir);

  const std::vector<LoadedRecording> recordings = load_training_set(
      manifest, model_config.sample_rate, model_config.chunk_duration,
      cache_dir);

  NoiseCorpus noise;
  bool augment = config.augment;
  if (augment) {
    if (config.noise_dir.empty()) {
      std::cerr << "[train] augmentation requested without a noise "
                   "directory; disabling\n";
      augment = false;
    } else {
      noise = load_noise_corpus(config.noise_dir, model_config.sample_rate,
                                cache_dir);
      if (noise.noises.empty()) {
        std::cerr << "[train] no noise recordings under " << config.noise_dir
                  << "; disabling augmentation\n";
        augment = false;
      }
    }
  }

  std::vector<double> cumulative;
  cumulative.reserve(recordings.size());
  double total = 0.0;
  for (const LoadedRecording& r : recordings) {
    total += r.audio.duration();
    cumulative.push_back(total);
  }

  ChunkSpec chunk_spec;
  chunk_spec.duration = model_config.chunk_duration;
  chunk_spec.sample_rate = model_config.sample_rate;
  chunk_spec.frame_step_samples = model_config.frame_step_samples();
  chunk_spec.frames_per_chunk = model_config.frames_per_chunk();
  chunk_spec.classes = model_config.classes;

  FrameClassifier model(model_config, derive_seed(config.seed, 0));
  Rng sampler(derive_seed(config.seed, 1));
  Rng augmenter(derive_seed(config.seed, 2));

  std::vector<nn::ParamRef> params = model.params();
  SgdState sgd(params);

  const auto steps_per_epoch = std::max<int64_t>(
      1, static_cast<int64_t>(std::llround(
             config.epoch_seconds / model_config.chunk_duration /
             config.batch_size)));

  TrainResult result;
  result.log_path = (std::filesystem::path(out_dir) / "train_log.jsonl").string();
  std::ofstream log(result.log_path, std::ios::trunc);
  if (!log) throw std::runtime_error("cannot write " + result.log_path);

  int64_t global_step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (int64_t s = 0; s < steps_per_epoch; ++s) {
      const double lr = cyclical_lr(global_step, steps_per_epoch,
                                    config.base_lr, config.max_lr,
                                    config.cycle_epochs);
      std::vector<VectorXd> batch;
      std::vector<MatrixXd> targets;
      batch.reserve(config.batch_size);
      targets.reserve(config.batch_size);
      for (int b = 0; b < config.batch_size; ++b) {
        const size_t pick = pick_weighted(cumulative, sampler);
        Chunk chunk = sample_chunk(recordings[pick], sampler, chunk_spec);
        if (augment && augmenter.uniform() < config.augment_prob) {
          const size_t noise_pick =
              static_cast<size_t>(augmenter.uniform_int(noise.noises.size()));
          const double snr =
              augmenter.uniform(config.snr_min_db, config.snr_max_db);
          chunk = augment_additive(chunk, noise.noises[noise_pick], snr,
                                   augmenter);
        }
        batch.push_back(Eigen::Map<const VectorXd>(
            chunk.waveform.samples.data(),
            static_cast<int64_t>(chunk.waveform.samples.size())));
        targets.push_back(targets_from_labels(chunk.labels));
      }
      const std::vector<MatrixXd> scores = model.forward(batch);
      const double loss = bce_loss(scores, targets);
      loss_sum += loss;
      model.zero_grads();
      model.backward(bce_grad_logits(scores, targets));
      sgd.step(params, lr, config.momentum);

      log << json{{"epoch", epoch},
                  {"step", global_step},
                  {"lr", lr},
                  {"loss", loss}}
                 .dump()
          << "\n";
      ++global_step;
    }
    log.flush();

    const double mean_loss = loss_sum / static_cast<double>(steps_per_epoch);
    char name[32];
    std::snprintf(name, sizeof(name), "epoch_%03d.ckpt", epoch);
    const std::string ckpt_path =
        (std::filesystem::path(out_dir) / name).string();
    CheckpointMeta meta;
    meta.epoch = epoch;
    meta.global_step = global_step;
    meta.mean_loss = mean_loss;
    meta.rng_state = sampler.save_state();
    save_checkpoint(ckpt_path, model, meta);
    result.checkpoint_paths.push_back(ckpt_path);
    result.epoch_losses.push_back(mean_loss);
    std::cerr << "[train] epoch " << epoch << "/" << config.epochs
              << " mean loss " << mean_loss << "\n";
  }
  return result;
}

std::map<VoiceClass, TrainResult> train_binary_suite(
    const ModelConfig& base_model, const TrainConfig& config,
    const std::vector<ManifestEntry>& manifest, const std::string& out_dir,
    const std::string& cache_dir) {
  std::map<VoiceClass, TrainResult> results;
  const auto outputs = output_classes();
  for (size_t i = 0; i < outputs.size(); ++i) {
    const VoiceClass cls = outputs[i];
    TrainConfig per_class = config;
    per_class.mode = "binary:" + std::string(to_string(cls));
    per_class.seed = derive_seed(config.seed, 16 + i);
    const std::string sub_dir =
        (std::filesystem::path(out_dir) /
         ("binary_" + std::string(to_string(cls))))
            .string();
    std::cerr << "[train] binary model for " << to_string(cls) << "\n";
    results.emplace(cls,
                    train(base_model, per_class, manifest, sub_dir, cache_dir));
  }
  return results;
}

}  // namespace vtc
