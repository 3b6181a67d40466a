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
#include <optional>
#include <vector>

#include "scene/core.hpp"
#include "scene/power.hpp"
#include "scene/random.hpp"

namespace scene {

/// Log-distance pathloss with lognormal shadowing:
///   beta = d^-alpha * 10^(X / 10),  d ~ U[d_min, d_max],  X ~ N(0, sigma_db^2).
struct PathlossModel {
  double exponent = 3.5;
  double d_min = 5.0;
  double d_max = 50.0;
  double shadowing_std_db = 8.0;
  bool normalize_mean = true;  // rescale so the empirical mean gain is 1
};

std::vector<double> sample_pathloss(const PathlossModel& model, std::size_t n, RandomSource& rng);

struct ReceivedEnergies {
  std::vector<double> y;        // Y_c, summed over S*M samples
  std::optional<double> y_ref;  // reference-RE energy R
  std::size_t sample_count = 0; // S*M
};

/// One round over K orthogonal REs (plus the reference RE when
/// cfg.use_reference_re). Correlation fields of cfg are ignored.
ReceivedEnergies simulate_round(const EnergyFrame& energies, const DevicePopulation& pop,
                                const RoundConfig& cfg, RandomSource& rng);

/// As simulate_round with separable AR(1) fading across repetitions and
/// antennas. The per-sample fading energies |h|^2 have lag-1 correlation
/// cfg.time_corr (resp. cfg.space_corr); marginals stay CN(0, beta_i).
/// With both coefficients zero this consumes the same draws as
/// simulate_round and returns identical values.
ReceivedEnergies simulate_round_correlated(const EnergyFrame& energies,
                                           const DevicePopulation& pop,
                                           const RoundConfig& cfg, RandomSource& rng);

}  // namespace scene
