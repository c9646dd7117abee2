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

#include "vtc/lr_schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace vtc {

double cyclical_lr(int64_t step, int64_t steps_per_epoch, double base_lr,
                   double max_lr, double cycle_epochs) {
  if (step < 0 || steps_per_epoch < 1) {
    throw std::invalid_argument("cyclical_lr: bad step arguments");
  }
  if (!(base_lr > 0.0) || max_lr < base_lr || !(cycle_epochs > 0.0)) {
    throw std::invalid_argument("cyclical_lr: bad rate arguments");
  }
  const int64_t period = std::max<int64_t>(
      1, static_cast<int64_t>(std::llround(cycle_epochs * steps_per_epoch)));
  const double pos = static_cast<double>(step % period) / period;
  const double triangle = 1.0 - std::fabs(2.0 * pos - 1.0);
  return base_lr + (max_lr - base_lr) * triangle;
}

}  // namespace vtc
