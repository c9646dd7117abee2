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

#ifndef VTC_CHECKPOINT_HPP_
#define VTC_CHECKPOINT_HPP_

#include <cstdint>
#include <limits>
#include <memory>
#include <string>

#include "vtc/audio.hpp"
#include "vtc/model.hpp"

namespace vtc {

// Training state stored alongside the weights. Contains nothing
// time-dependent so identical runs produce identical files.
struct CheckpointMeta {
  int epoch = 0;  // 1-based index of the completed epoch
  int64_t global_step = 0;
  double mean_loss = std::numeric_limits<double>::quiet_NaN();
  std::string rng_state;  // sampler state after the epoch
  ResampleSpec resampler;
};

// Binary container: magic, format version, a JSON header (model
// configuration plus CheckpointMeta) and named double-precision tensors.
// The write is atomic (temp file then rename).
void save_checkpoint(const std::string& path, FrameClassifier& model,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
  CheckpointMeta meta;
  std::unique_ptr<FrameClassifier> model;
};

// Fails if the tensor set does not exactly match the configuration.
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace vtc

#endif  // VTC_CHECKPOINT_HPP_
