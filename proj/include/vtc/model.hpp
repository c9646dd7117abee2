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

#ifndef VTC_MODEL_HPP_
#define VTC_MODEL_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "vtc/annotation.hpp"
#include "vtc/nn.hpp"
#include "vtc/rng.hpp"
#include "vtc/sinc.hpp"

namespace vtc {

struct ConvBlockConfig {
  int filters = 60;
  int kernel = 5;
  int pool = 3;
};

// Architecture hyperparameters. Every derived quantity (frame count, frame
// step) is computed from the layer trace so configuration stays the single
// source of truth.
struct ModelConfig {
  int sample_rate = 16000;
  double chunk_duration = 2.0;  // seconds per training chunk
  int sinc_filters = 256;
  int sinc_length = 251;
  int sinc_stride = 10;
  int sinc_pool = 3;
  std::vector<ConvBlockConfig> conv_blocks{{60, 5, 3}, {60, 5, 3}};
  int recurrent_layers = 3;
  int recurrent_hidden = 128;
  int head_layers = 2;
  int head_width = 128;
  double leaky_slope = 0.2;
  std::vector<VoiceClass> classes = output_classes();

  int num_classes() const { return static_cast<int>(classes.size()); }
  int64_t chunk_samples() const;
  // Number of output frames produced for an input of `samples` samples.
  int64_t frames_for(int64_t samples) const;
  int frames_per_chunk() const;
  // Input samples between consecutive output frames (product of all strides).
  int frame_step_samples() const;
  double frame_step_seconds() const;
  void validate() const;

  nlohmann::json to_json() const;
  // Missing keys keep their default (or `base`) values.
  static ModelConfig from_json(const nlohmann::json& j);
  static ModelConfig from_json(const nlohmann::json& j, const ModelConfig& base);
  // Desk-scale variant that trains in minutes on a CPU.
  static ModelConfig small();
};

// Removes the mean and scales to unit maximum amplitude. Near-silent input
// is only centered.
Eigen::VectorXd normalize_chunk(const Eigen::VectorXd& x);

// Sinc filterbank front end, convolutional blocks, bidirectional recurrent
// stack and feed-forward head producing per-frame, per-class scores in
// [0, 1]. Double precision and single-threaded throughout so identical
// inputs yield bit-identical outputs.
class FrameClassifier {
 public:
  FrameClassifier(const ModelConfig& config, uint64_t seed);

  const ModelConfig& config() const { return config_; }

  // Inference: scores (frames x classes) for one waveform, no caches kept.
  Eigen::MatrixXd score(const Eigen::VectorXd& waveform) const;

  // Training forward: returns scores per item and keeps layer caches.
  std::vector<Eigen::MatrixXd> forward(const std::vector<Eigen::VectorXd>& batch);
  // dlogits: gradient of the loss with respect to pre-sigmoid outputs,
  // (frames x classes) per item, same order as the preceding forward().
  void backward(const std::vector<Eigen::MatrixXd>& dlogits);

  std::vector<nn::ParamRef> params();
  void zero_grads();

 private:
  struct BlockCache {
    nn::Conv1d::Cache conv;
    nn::MaxPool1d::Cache pool;
    nn::ChannelLayerNorm::Cache norm;
    nn::LeakyRelu::Cache act;
  };
  struct HeadCache {
    nn::Linear::Cache linear;
    nn::TanhActivation::Cache act;
  };
  struct ItemCache {
    nn::SincConv::Cache sinc;
    nn::AbsActivation::Cache rectify;
    nn::MaxPool1d::Cache sinc_pool;
    nn::ChannelLayerNorm::Cache front_norm;
    nn::LeakyRelu::Cache front_act;
    std::vector<BlockCache> blocks;
    std::vector<nn::BiLstm::Cache> recurrent;
    std::vector<HeadCache> head;
    nn::Linear::Cache output;
  };

  struct Block {
    nn::Conv1d conv;
    nn::MaxPool1d pool;
    nn::ChannelLayerNorm norm;
  };

  // Logits (classes x frames); cache may be null for inference.
  Eigen::MatrixXd forward_one(const Eigen::VectorXd& waveform,
                              ItemCache* cache) const;
  void backward_one(const Eigen::MatrixXd& dlogits, ItemCache* cache);

  ModelConfig config_;
  nn::SincConv sinc_;
  nn::MaxPool1d sinc_pool_;
  nn::ChannelLayerNorm front_norm_;
  nn::LeakyRelu act_;
  std::vector<Block> blocks_;
  std::vector<nn::BiLstm> recurrent_;
  std::vector<nn::Linear> head_;
  nn::Linear output_;
  std::vector<ItemCache> caches_;
};

}  // namespace vtc

#endif  // VTC_MODEL_HPP_
