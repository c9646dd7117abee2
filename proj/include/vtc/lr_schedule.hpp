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

#ifndef VTC_LR_SCHEDULE_HPP_
#define VTC_LR_SCHEDULE_HPP_

#include <cstdint>

namespace vtc {

// Triangular cyclical learning rate. One full cycle spans
// cycle_epochs * steps_per_epoch steps: the rate climbs linearly from
// base_lr to max_lr over the first half and falls back over the second,
// so step 0 sits exactly at base_lr.
double cyclical_lr(int64_t step, int64_t steps_per_epoch, double base_lr,
                   double max_lr, double cycle_epochs = 1.5);

}  // namespace vtc

#endif  // VTC_LR_SCHEDULE_HPP_
