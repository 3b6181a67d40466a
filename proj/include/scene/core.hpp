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

namespace scene {

inline constexpr double kSimplexTolerance = 1e-9;
inline constexpr double kNegativitySlack = 1e-12;

/// A probability vector over K >= 2 classes. Only constructible through
/// validate_soft_label (or internal code that already guarantees the
/// simplex invariants), so holders can rely on q >= 0 and sum(q) = 1.
class SoftLabel {
 public:
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t c) const { return probs_[c]; }
  std::span<const double> probs() const noexcept { return probs_; }
  const std::vector<double>& vec() const noexcept { return probs_; }

  static SoftLabel uniform(std::size_t k);

 private:
  friend SoftLabel validate_soft_label(std::vector<double> v);
  friend SoftLabel unchecked_soft_label(std::vector<double> v);
  explicit SoftLabel(std::vector<double> v) : probs_(std::move(v)) {}
  std::vector<double> probs_;
};

/// Throws Error{BadLength | NegativeEntry | NotNormalized}. Entries inside the
/// negativity slack are clamped to zero.
SoftLabel validate_soft_label(std::vector<double> v);

// For code paths that construct simplex points by clipping + renormalizing.
// Asserts the invariants in debug builds only.
SoftLabel unchecked_soft_label(std::vector<double> v);

struct DeviceProfile {
  double omega = 0.0;         // aggregation weight
  double beta_true = 1.0;     // large-scale gain seen by the channel
  double beta_assumed = 1.0;  // device-side estimate used for power control
  double power_cap = 1.0;     // per-trial energy cap

  double gamma() const noexcept { return beta_true / beta_assumed; }
};

class DevicePopulation {
 public:
  /// Validates positivity of gains/caps, nonnegative weights summing to 1.
  explicit DevicePopulation(std::vector<DeviceProfile> devices);

  std::size_t size() const noexcept { return devices_.size(); }
  const DeviceProfile& operator[](std::size_t i) const { return devices_[i]; }
  std::span<const DeviceProfile> devices() const noexcept { return devices_; }

  double mean_gamma() const noexcept;  // sum_i omega_i gamma_i

 private:
  std::vector<DeviceProfile> devices_;
};

enum class ChannelModel { Superposition, Diagonal };
enum class Fading { Rayleigh, Frozen };

struct RoundConfig {
  std::size_t num_classes = 10;
  std::size_t reps = 1;      // S
  std::size_t antennas = 1;  // M
  double rho = 1.0;
  double noise_var = 0.0;    // sigma_N^2 per RE sample
  ChannelModel channel_model = ChannelModel::Superposition;
  double time_corr = 0.0;    // lag-1 energy correlation across repetitions
  double space_corr = 0.0;   // lag-1 energy correlation across antennas
  bool use_reference_re = false;
  // Test hook: |h_i|^2 pinned to beta_i with zero phase. Not a physical model.
  Fading fading = Fading::Rayleigh;

  std::size_t samples() const noexcept { return reps * antennas; }
  void validate() const;
};

/// q_bar_c = sum_i omega_i q_{i,c}.
SoftLabel weighted_average(std::span<const SoftLabel> labels, const DevicePopulation& pop);

}  // namespace scene
