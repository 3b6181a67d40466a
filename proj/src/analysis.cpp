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

#include "scene/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "scene/error.hpp"

namespace scene {

namespace {

void check_labels(const DevicePopulation& pop, std::span<const SoftLabel> labels) {
  if (labels.size() != pop.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(labels.size()) + " labels for " +
                                               std::to_string(pop.size()) + " devices");
  }
  for (const auto& q : labels) {
    if (q.size() != labels.front().size()) throw Error(ErrorCode::LengthMismatch, "labels differ in K");
  }
}

// V_sig(c) / rho^2 = sum_i omega_i^2 gamma_i^2 q_{i,c}^2.
std::vector<double> signal_energy_variance(const DevicePopulation& pop, std::span<const SoftLabel> labels) {
  const std::size_t k = labels.front().size();
  std::vector<double> v(k, 0.0);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const double wg = pop[i].omega * pop[i].gamma();
    for (std::size_t c = 0; c < k; ++c) v[c] += wg * wg * labels[i][c] * labels[i][c];
  }
  return v;
}

}  // namespace

std::vector<double> mismatch_bias(const DevicePopulation& pop, std::span<const SoftLabel> labels) {
  check_labels(pop, labels);
  const std::size_t k = labels.front().size();
  const double inv_k = 1.0 / static_cast<double>(k);
  std::vector<double> b(k, 0.0);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const double w = pop[i].omega * (pop[i].gamma() - 1.0);
    for (std::size_t c = 0; c < k; ++c) b[c] += w * (labels[i][c] - inv_k);
  }
  return b;
}

double mismatch_bias_bound(double delta, std::size_t k) {
  if (delta < 0.0) throw Error(ErrorCode::NegativeDelta, "delta = " + std::to_string(delta));
  if (k < 2) throw Error(ErrorCode::BadLength, "K must be >= 2");
  const double kd = static_cast<double>(k);
  return delta * std::sqrt((kd - 1.0) / kd);
}

std::vector<double> variance_bound(const DevicePopulation& pop, std::span<const SoftLabel> labels,
                                   const RoundConfig& cfg) {
  check_labels(pop, labels);
  const double v_n = cfg.noise_var * cfg.noise_var;
  const double sm = static_cast<double>(cfg.samples());
  auto bound = signal_energy_variance(pop, labels);
  for (auto& b : bound) b = (2.0 / sm) * (b + v_n / (cfg.rho * cfg.rho));
  return bound;
}

double variance_bound_max_form(const DevicePopulation& pop, std::span<const SoftLabel> labels,
                               const RoundConfig& cfg) {
  check_labels(pop, labels);
  const auto v = signal_energy_variance(pop, labels);
  const double rho2 = cfg.rho * cfg.rho;
  const double v_n = cfg.noise_var * cfg.noise_var;
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, 2.0 * rho2 * x + v_n);
  const double kd = static_cast<double>(v.size());
  return (kd - 1.0) / kd * worst / (static_cast<double>(cfg.samples()) * rho2);
}

double balanced_variance(double energy_variance, std::size_t k, std::size_t samples, double rho) {
  const double kd = static_cast<double>(k);
  const double scale = static_cast<double>(samples) * rho;
  return (kd - 1.0) / kd * energy_variance / (scale * scale);
}

namespace {

double inflation(std::size_t count, std::span<const double> acf) {
  const std::size_t lags = std::min({count > 0 ? count - 1 : 0, kMaxAcfLag, acf.size()});
  double sum = 0.0;
  for (std::size_t tau = 0; tau < lags; ++tau) sum += acf[tau];
  const double denom = 1.0 + 2.0 * sum;
  if (!(denom > 0.0)) throw Error(ErrorCode::DivergentACF, "1 + 2 sum(acf) = " + std::to_string(denom));
  return denom;
}

}  // namespace

EffectiveSamples effective_samples(std::size_t s, std::size_t m, std::span<const double> time_acf,
                                   std::span<const double> space_acf) {
  if (s < 1 || m < 1) throw Error(ErrorCode::InvalidArgument, "S and M must be >= 1");
  return {static_cast<double>(s) / inflation(s, time_acf),
          static_cast<double>(m) / inflation(m, space_acf)};
}

std::vector<double> ar1_acf(double phi, std::size_t lags) {
  std::vector<double> acf(lags);
  double p = 1.0;
  for (auto& a : acf) a = (p *= phi);
  return acf;
}

namespace {

void check_crossover(const CrossoverModel& model, double pilot_cost) {
  if (!(model.budget > 0.0) || !(pilot_cost >= 0.0) || !(pilot_cost < model.budget)) {
    throw Error(ErrorCode::BadBudget, "need 0 <= P < B, got P = " + std::to_string(pilot_cost) +
                                          ", B = " + std::to_string(model.budget));
  }
  if (!(model.c_coh > 0.0) || !(model.c_nc > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "MSE constants must be > 0");
  }
  if (model.num_classes < 2 || model.antennas < 1) {
    throw Error(ErrorCode::InvalidArgument, "need K >= 2 and M >= 1");
  }
}

}  // namespace

bool scene_wins(const CrossoverModel& model, double pilot_cost) {
  check_crossover(model, pilot_cost);
  return model.c_nc / model.budget <= model.c_coh / (model.budget - pilot_cost);
}

CrossoverResult crossover_threshold(const CrossoverModel& model) {
  check_crossover(model, model.pilot_cost);
  const double k = static_cast<double>(model.num_classes);
  const double m = static_cast<double>(model.antennas);
  CrossoverResult r;
  r.p_threshold = std::max(0.0, (1.0 - model.c_coh / model.c_nc) * model.budget);
  r.s_coh = (model.budget - model.pilot_cost) / k;
  r.s_nc = model.budget / k;
  r.mse_coh = model.c_coh / (m * r.s_coh);
  r.mse_nc = model.c_nc / (m * r.s_nc);
  r.scene_wins = scene_wins(model, model.pilot_cost);
  return r;
}

double calibrate_noise(double rho, std::size_t k, double snr_db) {
  if (!(rho > 0.0)) throw Error(ErrorCode::NonPositiveRho, "rho must be > 0");
  if (k < 2) throw Error(ErrorCode::BadLength, "K must be >= 2");
  return (rho / static_cast<double>(k)) / std::pow(10.0, snr_db / 10.0);
}

}  // namespace scene
