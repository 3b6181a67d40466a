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

#include "scene/core.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

#include "scene/error.hpp"

namespace scene {

SoftLabel validate_soft_label(std::vector<double> v) {
  if (v.size() < 2) {
    throw Error(ErrorCode::BadLength, "soft label needs K >= 2 entries, got " + std::to_string(v.size()));
  }
  double total = 0.0;
  for (std::size_t c = 0; c < v.size(); ++c) {
    if (!std::isfinite(v[c])) {
      throw Error(ErrorCode::NotNormalized, "entry " + std::to_string(c) + " is not finite");
    }
    if (v[c] < -kNegativitySlack) {
      std::ostringstream msg;
      msg << "entry " << c << " = " << v[c];
      throw Error(ErrorCode::NegativeEntry, msg.str());
    }
    if (v[c] < 0.0) v[c] = 0.0;
    total += v[c];
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "entries sum to " << total;
    throw Error(ErrorCode::NotNormalized, msg.str());
  }
  return SoftLabel(std::move(v));
}

SoftLabel unchecked_soft_label(std::vector<double> v) {
#ifndef NDEBUG
  double total = 0.0;
  for (double x : v) {
    assert(x >= 0.0);
    total += x;
  }
  assert(v.size() >= 2 && std::abs(total - 1.0) <= kSimplexTolerance);
#endif
  return SoftLabel(std::move(v));
}

SoftLabel SoftLabel::uniform(std::size_t k) {
  if (k < 2) throw Error(ErrorCode::BadLength, "K must be >= 2");
  return SoftLabel(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

DevicePopulation::DevicePopulation(std::vector<DeviceProfile> devices) : devices_(std::move(devices)) {
  if (devices_.empty()) throw Error(ErrorCode::InvalidArgument, "population needs N >= 1 devices");
  double total = 0.0;
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    const auto& d = devices_[i];
    const auto where = "device " + std::to_string(i) + ": ";
    if (!(d.omega >= 0.0) || !std::isfinite(d.omega)) {
      throw Error(ErrorCode::InvalidArgument, where + "omega must be finite and >= 0");
    }
    if (!(d.beta_true > 0.0) || !(d.beta_assumed > 0.0) || !(d.power_cap > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, where + "gains and cap must be > 0");
    }
    if (!std::isfinite(d.gamma()) || !(d.gamma() > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, where + "gamma must be finite and positive");
    }
    total += d.omega;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw Error(ErrorCode::NotNormalized, "weights sum to " + std::to_string(total));
  }
}

double DevicePopulation::mean_gamma() const noexcept {
  double g = 0.0;
  for (const auto& d : devices_) g += d.omega * d.gamma();
  return g;
}

void RoundConfig::validate() const {
  if (num_classes < 2) throw Error(ErrorCode::BadLength, "num_classes must be >= 2");
  if (reps < 1 || antennas < 1) throw Error(ErrorCode::InvalidArgument, "reps and antennas must be >= 1");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(ErrorCode::NonPositiveRho, "rho must be > 0");
  if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
    throw Error(ErrorCode::InvalidArgument, "noise_var must be >= 0");
  }
  if (!(time_corr >= 0.0 && time_corr < 1.0) || !(space_corr >= 0.0 && space_corr < 1.0)) {
    throw Error(ErrorCode::BadCoefficient, "correlation coefficients must lie in [0, 1)");
  }
}

SoftLabel weighted_average(std::span<const SoftLabel> labels, const DevicePopulation& pop) {
  if (labels.size() != pop.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(labels.size()) + " labels for " +
                                               std::to_string(pop.size()) + " devices");
  }
  const std::size_t k = labels.front().size();
  std::vector<double> avg(k, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].size() != k) throw Error(ErrorCode::LengthMismatch, "labels differ in K");
    const double w = pop[i].omega;
    for (std::size_t c = 0; c < k; ++c) avg[c] += w * labels[i][c];
  }
  return validate_soft_label(std::move(avg));
}

}  // namespace scene
