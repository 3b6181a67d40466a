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

#include "scene/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scene/error.hpp"

namespace scene {

AggregateResult scene_estimate(const ReceivedEnergies& y, const RoundConfig& cfg) {
  if (!(cfg.rho > 0.0)) throw Error(ErrorCode::ZeroRho, "rho must be > 0");
  const std::size_t k = y.y.size();
  if (k != cfg.num_classes) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(k) + " energies for K = " +
                                              std::to_string(cfg.num_classes));
  }
  if (y.sample_count != cfg.samples()) {
    throw Error(ErrorCode::ShapeMismatch, "sample_count " + std::to_string(y.sample_count) +
                                              " != S*M = " + std::to_string(cfg.samples()));
  }
  const double kd = static_cast<double>(k);
  const double mean = std::accumulate(y.y.begin(), y.y.end(), 0.0) / kd;
  const double gain = 1.0 / (static_cast<double>(cfg.samples()) * cfg.rho);

  std::vector<double> raw(k);
  for (std::size_t c = 0; c < k; ++c) raw[c] = gain * (y.y[c] - mean) + 1.0 / kd;
  auto projected = project_simplex(raw);
  return AggregateResult{std::move(raw), std::move(projected), gain, false};
}

AggregateResult ratio_estimate(const ReceivedEnergies& y) {
  if (!y.y_ref || !(*y.y_ref > 0.0)) throw Error(ErrorCode::ZeroReference, "reference energy R must be > 0");
  const double r = *y.y_ref;
  std::vector<double> ratio(y.y.size());
  double positive = 0.0;
  for (std::size_t c = 0; c < ratio.size(); ++c) {
    ratio[c] = y.y[c] / r;
    positive += std::max(ratio[c], 0.0);
  }
  if (!(positive > 0.0)) throw Error(ErrorCode::AllNonpositive, "no positive class energy");
  auto projected = project_simplex(ratio);
  return AggregateResult{std::move(ratio), std::move(projected), 0.0, true};
}

SoftLabel project_simplex(std::span<const double> v) {
  if (v.size() < 2) throw Error(ErrorCode::BadLength, "K must be >= 2");
  std::vector<double> q(v.size());
  double positive = 0.0;
  for (std::size_t c = 0; c < v.size(); ++c) {
    q[c] = v[c] > 0.0 ? v[c] : 0.0;
    positive += q[c];
  }
  if (!(positive > 0.0) || !std::isfinite(positive)) return SoftLabel::uniform(v.size());
  for (auto& x : q) x /= positive;
  return unchecked_soft_label(std::move(q));
}

TopTResult top_t_truncate(const SoftLabel& q, std::size_t t) {
  const std::size_t k = q.size();
  if (t < 1 || t > k) {
    throw Error(ErrorCode::BadT, "t = " + std::to_string(t) + " outside [1, " + std::to_string(k) + "]");
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return q[a] > q[b]; });

  std::vector<double> kept(k, 0.0);
  double mass = 0.0;
  for (std::size_t j = 0; j < t; ++j) {
    kept[order[j]] = q[order[j]];
    mass += q[order[j]];
  }
  double tail = 0.0;
  for (std::size_t j = t; j < k; ++j) tail += q[order[j]];

  // mass > 0: the largest entry of a simplex point is at least 1/K.
  for (auto& x : kept) x /= mass;
  return {unchecked_soft_label(std::move(kept)), tail};
}

}  // namespace scene
