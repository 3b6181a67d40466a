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

#include "scene/channel.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "scene/error.hpp"

namespace scene {

std::vector<double> sample_pathloss(const PathlossModel& model, std::size_t n, RandomSource& rng) {
  if (!(model.d_min > 0.0) || model.d_min > model.d_max) {
    throw Error(ErrorCode::BadRange, "distance range [" + std::to_string(model.d_min) + ", " +
                                         std::to_string(model.d_max) + "]");
  }
  if (!(model.exponent > 0.0) || !(model.shadowing_std_db >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "exponent must be > 0 and shadowing std >= 0");
  }
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");

  std::vector<double> beta(n);
  double total = 0.0;
  for (auto& b : beta) {
    const double d = rng.uniform(model.d_min, model.d_max);
    const double shadow_db = model.shadowing_std_db * rng.normal();
    b = std::pow(d, -model.exponent) * std::pow(10.0, shadow_db / 10.0);
    total += b;
  }
  if (model.normalize_mean) {
    const double mean = total / static_cast<double>(n);
    for (auto& b : beta) b /= mean;
  }
  return beta;
}

namespace {

void check_frame(const EnergyFrame& frame, const DevicePopulation& pop, const RoundConfig& cfg) {
  cfg.validate();
  if (frame.num_devices != pop.size() || frame.num_classes != cfg.num_classes ||
      frame.energies.size() != frame.num_devices * frame.num_classes ||
      frame.eta.size() != frame.num_devices) {
    throw Error(ErrorCode::ShapeMismatch,
                "frame is " + std::to_string(frame.num_devices) + "x" +
                    std::to_string(frame.num_classes) + ", expected " + std::to_string(pop.size()) +
                    "x" + std::to_string(cfg.num_classes));
  }
  for (double e : frame.energies) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw Error(ErrorCode::NegativeEnergy, "E = " + std::to_string(e));
  }
  for (double e : frame.eta) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw Error(ErrorCode::NegativeEnergy, "eta = " + std::to_string(e));
  }
}

// Separable AR(1) field over (s, m) with Gaussian coefficients a_t, a_s.
// Unit-variance CN marginals; with a_t = a_s = 0 it is white.
void fading_field(RandomSource& rng, std::size_t reps, std::size_t antennas, double a_t, double a_s,
                  std::vector<std::complex<double>>& g) {
  const double b_t = std::sqrt(1.0 - a_t * a_t);
  const double b_s = std::sqrt(1.0 - a_s * a_s);
  std::complex<double> w_prev{};
  for (std::size_t s = 0; s < reps; ++s) {
    for (std::size_t m = 0; m < antennas; ++m) {
      const auto z = rng.complex_normal();
      const auto w = (m == 0) ? z : a_s * w_prev + b_s * z;
      w_prev = w;
      const std::size_t at = s * antennas + m;
      g[at] = (s == 0) ? w : a_t * g[at - antennas] + b_t * w;
    }
  }
}

ReceivedEnergies simulate(const EnergyFrame& frame, const DevicePopulation& pop,
                          const RoundConfig& cfg, RandomSource& rng, double phi_t, double phi_s) {
  check_frame(frame, pop, cfg);
  const std::size_t k = cfg.num_classes;
  const std::size_t sm = cfg.samples();
  const std::size_t n = pop.size();
  const double a_t = std::sqrt(phi_t);
  const double a_s = std::sqrt(phi_s);
  const double noise_std = std::sqrt(cfg.noise_var);
  const bool superposition = cfg.channel_model == ChannelModel::Superposition;
  const bool frozen = cfg.fading == Fading::Frozen;

  ReceivedEnergies out;
  out.y.assign(k, 0.0);
  out.sample_count = sm;

  std::vector<std::complex<double>> g(sm, {1.0, 0.0});
  std::vector<std::complex<double>> field(sm);
  std::vector<double> energy(sm);

  const std::size_t num_re = k + (cfg.use_reference_re ? 1 : 0);
  for (std::size_t re = 0; re < num_re; ++re) {
    std::fill(field.begin(), field.end(), std::complex<double>{});
    std::fill(energy.begin(), energy.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double e = (re < k) ? frame.at(i, re) : frame.eta[i];
      const double beta = pop[i].beta_true;
      if (!frozen) fading_field(rng, cfg.reps, cfg.antennas, a_t, a_s, g);
      if (superposition) {
        const double amp = std::sqrt(beta * e);
        for (std::size_t j = 0; j < sm; ++j) {
          const double phase = frozen ? 0.0 : 2.0 * std::numbers::pi * rng.uniform();
          field[j] += amp * g[j] * std::polar(1.0, phase);
        }
      } else {
        const double scale = beta * e;
        for (std::size_t j = 0; j < sm; ++j) energy[j] += scale * std::norm(g[j]);
      }
    }
    double total = 0.0;
    for (std::size_t j = 0; j < sm; ++j) {
      const auto noise = noise_std * rng.complex_normal();
      total += superposition ? std::norm(field[j] + noise) : energy[j] + std::norm(noise);
    }
    if (re < k) {
      out.y[re] = total;
    } else {
      out.y_ref = total;
    }
  }
  return out;
}

}  // namespace

ReceivedEnergies simulate_round(const EnergyFrame& energies, const DevicePopulation& pop,
                                const RoundConfig& cfg, RandomSource& rng) {
  return simulate(energies, pop, cfg, rng, 0.0, 0.0);
}

ReceivedEnergies simulate_round_correlated(const EnergyFrame& energies, const DevicePopulation& pop,
                                           const RoundConfig& cfg, RandomSource& rng) {
  return simulate(energies, pop, cfg, rng, cfg.time_corr, cfg.space_corr);
}

}  // namespace scene
