/*
 * Copyright 2026 The scenesim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scene/channel.hpp"
#include "scene/core.hpp"

namespace scene {

struct AggregateResult {
  std::vector<double> raw;  // signed estimate before projection
  SoftLabel projected;
  double centering_gain = 0.0;  // 1/(S M rho); zero for the ratio estimator
  bool used_ratio = false;
};

/// Self-centering estimate r_c = (Y_c - mean_j Y_j) / (S M rho) + 1/K.
/// The noise-energy offset cancels in the centering and sum_c r_c = 1.
AggregateResult scene_estimate(const ReceivedEnergies& y, const RoundConfig& cfg);

/// q~_c = Y_c / R, then clip and renormalize. Common gain factors cancel.
AggregateResult ratio_estimate(const ReceivedEnergies& y);

/// Clip negatives, renormalize by the positive mass. Falls back to the
/// uniform label when nothing is positive.
SoftLabel project_simplex(std::span<const double> v);

struct TopTResult {
  SoftLabel truncated;
  double tail_mass = 0.0;  // probability dropped before renormalization
};

/// Keeps the t largest entries (ties go to the lower class index).
TopTResult top_t_truncate(const SoftLabel& q, std::size_t t);

}  // namespace scene
