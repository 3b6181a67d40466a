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

#include <cmath>
#include <initializer_list>
#include <vector>

#include "scene/core.hpp"
#include "scene/estimators.hpp"
#include "scene/montecarlo.hpp"
#include "scene/power.hpp"

namespace scene::testing {

inline DevicePopulation uniform_population(std::size_t n, double beta = 1.0, double cap = 1.0) {
  std::vector<DeviceProfile> d(n);
  for (auto& x : d) {
    x.omega = 1.0 / static_cast<double>(n);
    x.beta_true = x.beta_assumed = beta;
    x.power_cap = cap;
  }
  double partial = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) partial += d[i].omega;
  d.back().omega = 1.0 - partial;
  return DevicePopulation(std::move(d));
}

inline std::vector<SoftLabel> labels_of(std::initializer_list<std::vector<double>> rows) {
  std::vector<SoftLabel> out;
  for (const auto& r : rows) out.push_back(validate_soft_label(r));
  return out;
}

inline std::vector<SoftLabel> dirichlet_labels(std::size_t n, std::size_t k, double alpha, RandomSource& rng) {
  std::vector<SoftLabel> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(validate_soft_label(rng.dirichlet(alpha, k)));
  return out;
}

// Streams: 0 = scene raw, 1 = ratio raw, 2 = Y, 3 = R.
inline std::vector<TrialStats> mc_round(const std::vector<SoftLabel>& labels, const DevicePopulation& pop,
                                        const RoundConfig& cfg, std::size_t trials, std::uint64_t seed,
                                        bool correlated = false) {
  const auto frame = map_energies(labels, pop, cfg.rho, cfg.use_reference_re);
  const std::size_t k = cfg.num_classes;
  std::vector<TrialStats> proto{TrialStats(k), TrialStats(k), TrialStats(k), TrialStats(1)};
  auto body = [&](RandomSource& rng, std::vector<TrialStats>& acc) {
    const auto y = correlated ? simulate_round_correlated(frame, pop, cfg, rng) : simulate_round(frame, pop, cfg, rng);
    acc[0].add(scene_estimate(y, cfg).raw);
    acc[2].add(y.y);
    if (cfg.use_reference_re) {
      acc[1].add(ratio_estimate(y).raw);
      const double r = *y.y_ref;
      acc[3].add(std::span<const double>(&r, 1));
    }
  };
  return run_trials(trials, RandomSource(seed), std::move(proto), body);
}

inline double rel_spread(const std::vector<double>& v) {
  double lo = v.front(), hi = v.front(), sum = 0.0;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum += x;
  }
  return (hi - lo) / (sum / static_cast<double>(v.size()));
}

}  // namespace scene::testing
