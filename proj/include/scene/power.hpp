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

#include "scene/core.hpp"

namespace scene {

/// N x K transmit energies, row-major. Row i sums to eta_i, independent of
/// the label being sent.
struct EnergyFrame {
  std::size_t num_devices = 0;
  std::size_t num_classes = 0;
  std::vector<double> energies;  // E_{i,c} at [i * num_classes + c]
  std::vector<double> eta;       // per-device total, also the reference-RE energy
  bool include_reference = false;

  double at(std::size_t i, std::size_t c) const { return energies[i * num_classes + c]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(energies).subspan(i * num_classes, num_classes);
  }
};

/// E_{i,c} = (rho * omega_i / beta_assumed_i) * q_{i,c}.
EnergyFrame map_energies(std::span<const SoftLabel> labels, const DevicePopulation& pop,
                         double rho, bool include_reference = false);

/// Largest common scale that keeps every active device (omega_i > 0) within
/// its cap: min_i beta_assumed_i * P_i / omega_i.
double min_rho(const DevicePopulation& pop);

struct RhoReport {
  std::size_t device = 0;
  double rho_local = 0.0;
};

struct MinRhoTranscript {
  std::vector<RhoReport> uplink;  // one scalar per active device
  double broadcast = 0.0;         // the single downlink scalar

  std::size_t uplink_scalars() const noexcept { return uplink.size(); }
  static constexpr std::size_t broadcast_scalars() noexcept { return 1; }
};

struct MinRhoOutcome {
  double rho_min = 0.0;
  MinRhoTranscript transcript;
};

/// Client estimate -> uplink report -> server minimum -> broadcast.
MinRhoOutcome run_min_rho_protocol(const DevicePopulation& pop);

// Server step of the protocol on already-reported scalars.
double reduce_min_rho(std::span<const double> reports);

}  // namespace scene
