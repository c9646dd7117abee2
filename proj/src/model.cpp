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

#include "vtc/model.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace vtc {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

int64_t ModelConfig::chunk_samples() const {
  return static_cast<int64_t>(std::llround(chunk_duration * sample_rate));
}

int64_t ModelConfig::frames_for(int64_t samples) const {
  int64_t n = samples;
  n = nn::conv_output_length(n, sinc_length, sinc_stride);
  n = nn::conv_output_length(n, sinc_pool, sinc_pool);
  for (const auto& block : conv_blocks) {
    n = nn::conv_output_length(n, block.kernel, 1);
    n = nn::conv_output_length(n, block.pool, block.pool);
  }
  return n;
}

int ModelConfig::frames_per_chunk() const {
  return static_cast<int>(frames_for(chunk_samples()));
}

int ModelConfig::frame_step_samples() const {
  int step = sinc_stride * sinc_pool;
  for (const auto& block : conv_blocks) {
    step *= block.pool;
  }
  return step;
}

double ModelConfig::frame_step_seconds() const {
  return static_cast<double>(frame_step_samples()) / sample_rate;
}

void ModelConfig::validate() const {
  if (sample_rate <= 0) {
    throw std::invalid_argument("model: sample_rate must be positive");
  }
  if (chunk_duration <= 0.0) {
    throw std::invalid_argument("model: chunk_duration must be positive");
  }
  if (sinc_filters < 1 || sinc_length < 3 || sinc_length % 2 == 0) {
    throw std::invalid_argument(
        "model: sinc filterbank needs >= 1 filters and odd length >= 3");
  }
  if (sinc_stride < 1 || sinc_pool < 1) {
    throw std::invalid_argument("model: sinc stride and pool must be >= 1");
  }
  for (const auto& block : conv_blocks) {
    if (block.filters < 1 || block.kernel < 1 || block.pool < 1) {
      throw std::invalid_argument("model: conv block fields must be >= 1");
    }
  }
  if (recurrent_layers < 1 || recurrent_hidden < 1) {
    throw std::invalid_argument("model: recurrent stack must be non-empty");
  }
  if (head_layers < 0 || head_width < 1) {
    throw std::invalid_argument("model: invalid head shape");
  }
  if (leaky_slope < 0.0 || leaky_slope >= 1.0) {
    throw std::invalid_argument("model: leaky_slope must be in [0, 1)");
  }
  if (classes.empty()) {
    throw std::invalid_argument("model: needs at least one output class");
  }
  std::set<VoiceClass> seen(classes.begin(), classes.end());
  if (seen.size() != classes.size()) {
    throw std::invalid_argument("model: duplicate output class");
  }
  if (frames_for(chunk_samples()) < 1) {
    throw std::invalid_argument("model: chunk too short for the layer stack");
  }
}

json ModelConfig::to_json() const {
  json blocks = json::array();
  for (const auto& b : conv_blocks) {
    blocks.push_back({{"filters", b.filters}, {"kernel", b.kernel}, {"pool", b.pool}});
  }
  json names = json::array();
  for (const VoiceClass c : classes) {
    names.push_back(to_string(c));
  }
  return json{
      {"sample_rate", sample_rate},
      {"chunk_duration", chunk_duration},
      {"sinc", {{"filters", sinc_filters},
                {"length", sinc_length},
                {"stride", sinc_stride},
                {"pool", sinc_pool}}},
      {"conv_blocks", blocks},
      {"recurrent", {{"layers", recurrent_layers}, {"hidden", recurrent_hidden}}},
      {"head", {{"layers", head_layers}, {"width", head_width}}},
      {"leaky_slope", leaky_slope},
      {"classes", names},
  };
}

ModelConfig ModelConfig::from_json(const json& j) {
  return from_json(j, ModelConfig{});
}

ModelConfig ModelConfig::from_json(const json& j, const ModelConfig& base) {
  ModelConfig c = base;
  if (j.contains("sample_rate")) c.sample_rate = j.at("sample_rate").get<int>();
  if (j.contains("chunk_duration")) {
    c.chunk_duration = j.at("chunk_duration").get<double>();
  }
  if (j.contains("sinc")) {
    const json& s = j.at("sinc");
    if (s.contains("filters")) c.sinc_filters = s.at("filters").get<int>();
    if (s.contains("length")) c.sinc_length = s.at("length").get<int>();
    if (s.contains("stride")) c.sinc_stride = s.at("stride").get<int>();
    if (s.contains("pool")) c.sinc_pool = s.at("pool").get<int>();
  }
  if (j.contains("conv_blocks")) {
    c.conv_blocks.clear();
    for (const json& b : j.at("conv_blocks")) {
      ConvBlockConfig block;
      if (b.contains("filters")) block.filters = b.at("filters").get<int>();
      if (b.contains("kernel")) block.kernel = b.at("kernel").get<int>();
      if (b.contains("pool")) block.pool = b.at("pool").get<int>();
      c.conv_blocks.push_back(block);
    }
  }
  if (j.contains("recurrent")) {
    const json& r = j.at("recurrent");
    if (r.contains("layers")) c.recurrent_layers = r.at("layers").get<int>();
    if (r.contains("hidden")) c.recurrent_hidden = r.at("hidden").get<int>();
  }
  if (j.contains("head")) {
    const json& h = j.at("head");
    if (h.contains("layers")) c.head_layers = h.at("layers").get<int>();
    if (h.contains("width")) c.head_width = h.at("width").get<int>();
  }
  if (j.contains("leaky_slope")) c.leaky_slope = j.at("leaky_slope").get<double>();
  if (j.contains("classes")) {
    c.classes.clear();
    for (const json& name : j.at("classes")) {
      c.classes.push_back(voice_class_from_string(name.get<std::string>()));
    }
  }
  return c;
}

ModelConfig ModelConfig::small() {
  ModelConfig c;
  c.sinc_filters = 16;
  c.sinc_length = 81;
  c.conv_blocks = {{16, 5, 3}, {16, 5, 3}};
  c.recurrent_layers = 1;
  c.recurrent_hidden = 32;
  c.head_layers = 1;
  c.head_width = 48;
  return c;
}

VectorXd normalize_chunk(const VectorXd& x) {
  VectorXd y = x.array() - x.mean();
  const double peak = y.array().abs().maxCoeff();
  if (peak > 1e-12) {
    y /= peak;
  }
  return y;
}

FrameClassifier::FrameClassifier(const ModelConfig& config, uint64_t seed)
    : config_(config) {
  config_.validate();
  Rng rng(seed);
  sinc_.init(config_.sinc_filters, config_.sinc_length, config_.sinc_stride,
             config_.sample_rate);
  sinc_pool_.kernel = config_.sinc_pool;
  front_norm_.init(config_.sinc_filters);
  act_.slope = config_.leaky_slope;
  int channels = config_.sinc_filters;
  blocks_.resize(config_.conv_blocks.size());
  for (size_t i = 0; i < config_.conv_blocks.size(); ++i) {
    const auto& bc = config_.conv_blocks[i];
    blocks_[i].conv.init(channels, bc.filters, bc.kernel, 1, rng);
    blocks_[i].pool.kernel = bc.pool;
    blocks_[i].norm.init(bc.filters);
    channels = bc.filters;
  }
  recurrent_.resize(config_.recurrent_layers);
  int rec_in = channels;
  for (int i = 0; i < config_.recurrent_layers; ++i) {
    recurrent_[i].init(rec_in, config_.recurrent_hidden, rng);
    rec_in = 2 * config_.recurrent_hidden;
  }
  head_.resize(config_.head_layers);
  int head_in = rec_in;
  for (int i = 0; i < config_.head_layers; ++i) {
    head_[i].init(head_in, config_.head_width, rng);
    head_in = config_.head_width;
  }
  output_.init(head_in, config_.num_classes(), rng);
}

MatrixXd FrameClassifier::forward_one(const VectorXd& waveform,
                                      ItemCache* cache) const {
  const VectorXd x = normalize_chunk(waveform);
  MatrixXd a = sinc_.forward(x, cache != nullptr ? &cache->sinc : nullptr);
  a = nn::AbsActivation::forward(a, cache != nullptr ? &cache->rectify : nullptr);
  a = sinc_pool_.forward(a, cache != nullptr ? &cache->sinc_pool : nullptr);
  a = front_norm_.forward(a, cache != nullptr ? &cache->front_norm : nullptr);
  a = act_.forward(a, cache != nullptr ? &cache->front_act : nullptr);
  if (cache != nullptr) {
    cache->blocks.resize(blocks_.size());
  }
  for (size_t i = 0; i < blocks_.size(); ++i) {
    BlockCache* bc = cache != nullptr ? &cache->blocks[i] : nullptr;
    a = blocks_[i].conv.forward(a, bc != nullptr ? &bc->conv : nullptr);
    a = blocks_[i].pool.forward(a, bc != nullptr ? &bc->pool : nullptr);
    a = blocks_[i].norm.forward(a, bc != nullptr ? &bc->norm : nullptr);
    a = act_.forward(a, bc != nullptr ? &bc->act : nullptr);
  }
  if (cache != nullptr) {
    cache->recurrent.resize(recurrent_.size());
    cache->head.resize(head_.size());
  }
  for (size_t i = 0; i < recurrent_.size(); ++i) {
    a = recurrent_[i].forward(
        a, cache != nullptr ? &cache->recurrent[i] : nullptr);
  }
  for (size_t i = 0; i < head_.size(); ++i) {
    HeadCache* hc = cache != nullptr ? &cache->head[i] : nullptr;
    a = head_[i].forward(a, hc != nullptr ? &hc->linear : nullptr);
    a = nn::TanhActivation::forward(a, hc != nullptr ? &hc->act : nullptr);
  }
  return output_.forward(a, cache != nullptr ? &cache->output : nullptr);
}

void FrameClassifier::backward_one(const MatrixXd& dlogits, ItemCache* cache) {
  MatrixXd d = output_.backward(dlogits, cache->output);
  for (size_t i = head_.size(); i-- > 0;) {
    d = nn::TanhActivation::backward(d, cache->head[i].act);
    d = head_[i].backward(d, cache->head[i].linear);
  }
  for (size_t i = recurrent_.size(); i-- > 0;) {
    d = recurrent_[i].backward(d, cache->recurrent[i]);
  }
  for (size_t i = blocks_.size(); i-- > 0;) {
    d = nn::LeakyRelu::backward(d, cache->blocks[i].act);
    d = blocks_[i].norm.backward(d, cache->blocks[i].norm);
    d = blocks_[i].pool.backward(d, cache->blocks[i].pool);
    d = blocks_[i].conv.backward(d, cache->blocks[i].conv);
  }
  d = nn::LeakyRelu::backward(d, cache->front_act);
  d = front_norm_.backward(d, cache->front_norm);
  d = sinc_pool_.backward(d, cache->sinc_pool);
  d = nn::AbsActivation::backward(d, cache->rectify);
  sinc_.backward(d, cache->sinc);
}

MatrixXd FrameClassifier::score(const VectorXd& waveform) const {
  const MatrixXd logits = forward_one(waveform, nullptr);
  return nn::sigmoid(logits).transpose();
}

std::vector<MatrixXd> FrameClassifier::forward(
    const std::vector<VectorXd>& batch) {
  caches_.clear();
  caches_.resize(batch.size());
  std::vector<MatrixXd> scores;
  scores.reserve(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const MatrixXd logits = forward_one(batch[i], &caches_[i]);
    scores.push_back(nn::sigmoid(logits).transpose());
  }
  return scores;
}

void FrameClassifier::backward(const std::vector<MatrixXd>& dlogits) {
  if (dlogits.size() != caches_.size()) {
    throw std::logic_error("FrameClassifier: backward batch mismatch");
  }
  for (size_t i = 0; i < dlogits.size(); ++i) {
    const MatrixXd d = dlogits[i].transpose();
    backward_one(d, &caches_[i]);
  }
}

std::vector<nn::ParamRef> FrameClassifier::params() {
  std::vector<nn::ParamRef> refs;
  sinc_.collect("sinc", &refs);
  front_norm_.collect("front_norm", &refs);
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const std::string prefix = "block" + std::to_string(i);
    blocks_[i].conv.collect(prefix + ".conv", &refs);
    blocks_[i].norm.collect(prefix + ".norm", &refs);
  }
  for (size_t i = 0; i < recurrent_.size(); ++i) {
    recurrent_[i].collect("lstm" + std::to_string(i), &refs);
  }
  for (size_t i = 0; i < head_.size(); ++i) {
    head_[i].collect("head" + std::to_string(i), &refs);
  }
  output_.collect("output", &refs);
  return refs;
}

void FrameClassifier::zero_grads() {
  for (nn::ParamRef& p : params()) {
    std::fill(p.grad, p.grad + p.size, 0.0);
  }
}

}  // namespace vtc
