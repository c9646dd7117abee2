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

#include "vtc/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace vtc {

namespace {

double bce_sum(const Eigen::MatrixXd& scores, const Eigen::MatrixXd& targets) {
  if (scores.rows() != targets.rows() || scores.cols() != targets.cols()) {
    throw std::invalid_argument("bce_loss: shape mismatch");
  }
  const auto s =
      scores.array().max(kScoreClamp).min(1.0 - kScoreClamp);
  const auto y = targets.array();
  return -(y * s.log() + (1.0 - y) * (1.0 - s).log()).sum();
}

}  // namespace

double bce_loss(const Eigen::MatrixXd& scores, const Eigen::MatrixXd& targets) {
  if (scores.size() == 0) {
    throw std::invalid_argument("bce_loss: empty input");
  }
  return bce_sum(scores, targets) / static_cast<double>(scores.size());
}

double bce_loss(const std::vector<Eigen::MatrixXd>& scores,
                const std::vector<Eigen::MatrixXd>& targets) {
  if (scores.size() != targets.size()) {
    throw std::invalid_argument("bce_loss: batch size mismatch");
  }
  double sum = 0.0;
  int64_t slots = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    sum += bce_sum(scores[i], targets[i]);
    slots += scores[i].size();
  }
  if (slots == 0) {
    throw std::invalid_argument("bce_loss: empty batch");
  }
  return sum / static_cast<double>(slots);
}

std::vector<Eigen::MatrixXd> bce_grad_logits(
    const std::vector<Eigen::MatrixXd>& scores,
    const std::vector<Eigen::MatrixXd>& targets) {
  if (scores.size() != targets.size()) {
    throw std::invalid_argument("bce_grad_logits: batch size mismatch");
  }
  int64_t slots = 0;
  for (const auto& s : scores) {
    slots += s.size();
  }
  if (slots == 0) {
    throw std::invalid_argument("bce_grad_logits: empty batch");
  }
  std::vector<Eigen::MatrixXd> grads;
  grads.reserve(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    grads.push_back((scores[i] - targets[i]) / static_cast<double>(slots));
  }
  return grads;
}

}  // namespace vtc
