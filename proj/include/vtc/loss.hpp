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

#ifndef VTC_LOSS_HPP_
#define VTC_LOSS_HPP_

#include <Eigen/Dense>
#include <vector>

namespace vtc {

// Scores this close to 0 or 1 are clamped before taking logs.
inline constexpr double kScoreClamp = 1e-7;

// Binary cross-entropy averaged over every (frame, class) slot:
//   L = -(1/N) sum y log s + (1 - y) log(1 - s),   N = frames * classes.
double bce_loss(const Eigen::MatrixXd& scores, const Eigen::MatrixXd& targets);

// Batch form; the average runs over all slots of all items.
double bce_loss(const std::vector<Eigen::MatrixXd>& scores,
                const std::vector<Eigen::MatrixXd>& targets);

// Gradient of the batch loss with respect to the pre-sigmoid outputs:
// (s - y) / N per slot, with N the total slot count of the batch.
std::vector<Eigen::MatrixXd> bce_grad_logits(
    const std::vector<Eigen::MatrixXd>& scores,
    const std::vector<Eigen::MatrixXd>& targets);

}  // namespace vtc

#endif  // VTC_LOSS_HPP_
