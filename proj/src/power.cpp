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

#include "scene/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scene/error.hpp"

namespace scene {

EnergyFrame map_energies(std::span<const SoftLabel> labels, const DevicePopulation& pop, double rho,
                         bool include_reference) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw Error(ErrorCode::NonPositiveRho, "rho = " + std::to_string(rho));
  }
  if (labels.size() != pop.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(labels.size()) + " labels for " +
                                               std::to_string(pop.size()) + " devices");
  }
  EnergyFrame frame;
  frame.num_devices = pop.size();
  frame.num_classes = labels.front().size();
  frame.include_reference = include_reference;
  frame.energies.resize(frame.num_devices * frame.num_classes);
  frame.eta.resize(frame.num_devices);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (labels[i].size() != frame.num_classes) {
      throw Error(ErrorCode::LengthMismatch, "labels differ in K");
    }
    const double eta = rho * pop[i].omega / pop[i].beta_assumed;
    frame.eta[i] = eta;
    for (std::size_t c = 0; c < frame.num_classes; ++c) {
      frame.energies[i * frame.num_classes + c] = eta * labels[i][c];
    }
  }
  return frame;
}

namespace {

double local_rho(const DeviceProfile& d) { return d.beta_assumed * d.power_cap / d.omega; }

}  // namespace

double reduce_min_rho(std::span<const double> reports) {
  if (reports.empty()) throw Error(ErrorCode::EmptyActiveSet, "no reports");
  return *std::min_element(reports.begin(), reports.end());
}

double min_rho(const DevicePopulation& pop) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& d : pop.devices()) {
    if (d.omega > 0.0) best = std::min(best, local_rho(d));
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::EmptyActiveSet, "every device has omega = 0");
  return best;
}

MinRhoOutcome run_min_rho_protocol(const DevicePopulation& pop) {
  MinRhoOutcome out;
  std::vector<double> reports;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (pop[i].omega <= 0.0) continue;
    const double r = local_rho(pop[i]);
    out.transcript.uplink.push_back({i, r});
    reports.push_back(r);
  }
  if (reports.empty()) throw Error(ErrorCode::EmptyActiveSet, "every device has omega = 0");
  out.rho_min = reduce_min_rho(reports);
  out.transcript.broadcast = out.rho_min;
  return out;
}

}  // namespace scene
