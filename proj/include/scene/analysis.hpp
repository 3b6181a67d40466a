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
#include <functional>
#include <span>
#include <vector>

#include "scene/core.hpp"

namespace scene {

// Closed-form evaluators. None of these draw random numbers.

/// E[r_c] - q_bar_c = sum_i omega_i (gamma_i - 1)(q_{i,c} - 1/K) when devices
/// invert beta_assumed but the channel applies beta_true.
std::vector<double> mismatch_bias(const DevicePopulation& pop, std::span<const SoftLabel> labels);

/// delta * sqrt((K-1)/K): l2 bound on mismatch_bias when |gamma_i - 1| <= delta.
double mismatch_bias_bound(double delta, std::size_t k);

/// Per-class upper bound on Var(r_c):
///   (2 / SM) * (sum_i omega_i^2 q_{i,c}^2 + v_N / rho^2),  v_N = sigma_N^4.
std::vector<double> variance_bound(const DevicePopulation& pop, std::span<const SoftLabel> labels,
                                   const RoundConfig& cfg);

/// Looser bound reported for comparison only:
///   (K-1)/K * max_j(2 V_sig(j) + v_N) / (SM rho^2).
double variance_bound_max_form(const DevicePopulation& pop, std::span<const SoftLabel> labels,
                               const RoundConfig& cfg);

/// Balanced case Var(Y_j) = V for all j: Var(r_c) = (K-1)/K * V / (SM rho)^2.
double balanced_variance(double energy_variance, std::size_t k, std::size_t samples, double rho);

struct EffectiveSamples {
  double s_eff = 0.0;
  double m_eff = 0.0;
};

inline constexpr std::size_t kMaxAcfLag = 64;

/// S / (1 + 2 sum_{tau>=1} acf_t(tau)), likewise for M. acf[0] is lag 1.
/// Sums are truncated at lag min(count - 1, 64).
EffectiveSamples effective_samples(std::size_t s, std::size_t m, std::span<const double> time_acf,
                                   std::span<const double> space_acf);

/// phi^tau for tau = 1..lags.
std::vector<double> ar1_acf(double phi, std::size_t lags);

struct CrossoverModel {
  double budget = 100.0;      // B, REs per round
  double pilot_cost = 0.0;    // P, REs spent on CSI acquisition
  double c_coh = 1.0;
  double c_nc = 1.0;
  std::size_t num_classes = 10;
  std::size_t antennas = 1;   // M in the round-MSE expressions
};

struct CrossoverResult {
  double p_threshold = 0.0;
  double s_coh = 0.0;
  double s_nc = 0.0;
  double mse_coh = 0.0;
  double mse_nc = 0.0;
  bool scene_wins = false;  // at model.pilot_cost
};

/// Threshold max(0, (1 - c_coh/c_nc) B) and both round-MSEs at model.pilot_cost.
CrossoverResult crossover_threshold(const CrossoverModel& model);

/// c_nc / B <= c_coh / (B - P).
bool scene_wins(const CrossoverModel& model, double pilot_cost);

/// sigma_N^2 giving class-averaged per-RE SNR snr_db: (rho/K) / 10^(snr_db/10).
double calibrate_noise(double rho, std::size_t k, double snr_db);

}  // namespace scene
