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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "scene/error.hpp"
#include "scene/power.hpp"
#include "support.hpp"

using namespace scene;
using testing::labels_of;

namespace {

// Feasibility of a common scale rho: every device's eta_i within its cap.
bool feasible(const DevicePopulation& pop, double rho) {
  for (const auto& d : pop.devices()) {
    if (d.omega > 0.0 && rho * d.omega / d.beta_assumed > d.power_cap) return false;
  }
  return true;
}

// Oracle: bisection on the feasibility predicate, independent of the formula.
double scan_boundary(const DevicePopulation& pop) {
  double lo = 0.0, hi = 1.0;
  while (feasible(pop, hi)) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(pop, mid) ? lo : hi) = mid;
  }
  return lo;
}

DevicePopulation random_population(RandomSource& rng, std::size_t n) {
  auto w = rng.dirichlet(1.0, n);
  std::vector<DeviceProfile> d(n);
  double partial = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i].omega = w[i];
    if (i + 1 < n) partial += w[i];
    d[i].beta_true = std::exp(2.0 * rng.normal());
    d[i].beta_assumed = d[i].beta_true / rng.uniform(0.7, 1.3);
    d[i].power_cap = rng.uniform(0.5, 1.5);
  }
  d.back().omega = std::max(0.0, 1.0 - partial);
  return DevicePopulation(std::move(d));
}

}  // namespace

TEST_CASE("map_energies example") {
  DevicePopulation pop({{1.0, 0.25, 0.25, 10.0}});
  auto labels = labels_of({{0.75, 0.25}});
  auto f = map_energies(labels, pop, 2.0, true);
  CHECK(f.eta[0] == 8.0);
  CHECK(f.at(0, 0) == 6.0);
  CHECK(f.at(0, 1) == 2.0);
  CHECK(f.include_reference);
}

TEST_CASE("map_energies vertex and uniform labels") {
  auto pop = testing::uniform_population(2, 0.5);
  auto f = map_energies(labels_of({{1, 0, 0, 0}, {0.25, 0.25, 0.25, 0.25}}), pop, 1.0);
  CHECK(f.at(0, 0) == f.eta[0]);
  for (std::size_t c = 1; c < 4; ++c) CHECK(f.at(0, c) == 0.0);
  for (std::size_t c = 0; c < 4; ++c) CHECK(f.at(1, c) == doctest::Approx(f.eta[1] / 4.0).epsilon(1e-15));
}

TEST_CASE("map_energies uses beta_assumed") {
  DevicePopulation pop({{1.0, 4.0, 2.0, 1.0}});
  auto f = map_energies(labels_of({{0.5, 0.5}}), pop, 1.0);
  CHECK(f.eta[0] == 0.5);
}

TEST_CASE("map_energies errors") {
  auto pop = testing::uniform_population(2);
  auto labels = labels_of({{0.5, 0.5}, {0.5, 0.5}});
  CHECK_THROWS_WITH_AS(map_energies(labels, pop, 0.0), doctest::Contains("NonPositiveRho"), Error);
  CHECK_THROWS_WITH_AS(map_energies(labels, pop, -1.0), doctest::Contains("NonPositiveRho"), Error);
  CHECK_THROWS_WITH_AS(map_energies(labels_of({{1, 0}}), pop, 1.0), doctest::Contains("LengthMismatch"), Error);
}

TEST_CASE("energy frame properties: row sums, label-independence, scaling") {
  RandomSource rng(1);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng.index(10), k = 2 + rng.index(20);
    auto pop = random_population(rng, n);
    auto a = testing::dirichlet_labels(n, k, 0.3, rng);
    auto b = testing::dirichlet_labels(n, k, 3.0, rng);
    const double rho = 0.1 + 5.0 * rng.uniform();
    const double scale = 0.5 + 3.0 * rng.uniform();
    auto fa = map_energies(a, pop, rho);
    auto fb = map_energies(b, pop, rho);
    auto fs = map_energies(a, pop, scale * rho);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        CHECK(fa.at(i, c) >= 0.0);
        sum += fa.at(i, c);
        CHECK(fs.at(i, c) == doctest::Approx(scale * fa.at(i, c)).epsilon(1e-12));
      }
      CHECK(sum == doctest::Approx(fa.eta[i]).epsilon(1e-9));
      CHECK(fa.eta[i] == fb.eta[i]);
    }
  }
}

TEST_CASE("min_rho examples") {
  DevicePopulation two({{0.5, 1.0, 1.0, 1.0}, {0.5, 0.5, 0.5, 1.0}});
  CHECK(min_rho(two) == 1.0);
  CHECK(scan_boundary(two) == doctest::Approx(1.0).epsilon(1e-12));
  DevicePopulation single({{1.0, 1.0, 1.0, 1.0}});
  CHECK(min_rho(single) == 1.0);
  for (std::size_t n : {1u, 3u, 17u}) {
    auto pop = testing::uniform_population(n, 0.4, 1.2);
    CHECK(min_rho(pop) == doctest::Approx(0.4 * 1.2 / pop[0].omega).epsilon(1e-9));
  }
}

TEST_CASE("min_rho skips inactive devices and rejects empty sets") {
  DevicePopulation pop({{1.0, 1.0, 1.0, 2.0}, {0.0, 1e-6, 1e-6, 1e-6}});
  CHECK(min_rho(pop) == 2.0);
  auto out = run_min_rho_protocol(pop);
  CHECK(out.transcript.uplink_scalars() == 1);
  CHECK(out.transcript.uplink[0].device == 0);
  CHECK_THROWS_WITH_AS(reduce_min_rho({}), doctest::Contains("EmptyActiveSet"), Error);
}

TEST_CASE("protocol transcript") {
  const double reports[] = {4.0, 2.0, 9.0};
  CHECK(reduce_min_rho(reports) == 2.0);
  RandomSource rng(2);
  auto pop = random_population(rng, 6);
  auto out = run_min_rho_protocol(pop);
  CHECK(out.rho_min == min_rho(pop));
  CHECK(out.transcript.broadcast == out.rho_min);
  CHECK(MinRhoTranscript::broadcast_scalars() == 1);
  std::size_t active = 0;
  for (const auto& d : pop.devices()) active += d.omega > 0.0;
  CHECK(out.transcript.uplink_scalars() == active);
  for (const auto& r : out.transcript.uplink) {
    const auto& d = pop[r.device];
    CHECK(r.rho_local == doctest::Approx(d.beta_assumed * d.power_cap / d.omega).epsilon(1e-15));
  }
}

TEST_CASE("min_rho equals the feasibility boundary (property)") {
  RandomSource rng(3);
  for (int t = 0; t < 1000; ++t) {
    auto pop = random_population(rng, 1 + rng.index(20));
    const double rho = min_rho(pop);
    CHECK(rho == doctest::Approx(scan_boundary(pop)).epsilon(1e-12));
    // Feasible interval is (0, rho*].
    CHECK(feasible(pop, rho * (1.0 - 1e-12)));
    CHECK(feasible(pop, 0.5 * rho));
    CHECK_FALSE(feasible(pop, rho * (1.0 + 1e-9)));
    auto labels = testing::dirichlet_labels(pop.size(), 3, 0.5, rng);
    auto f = map_energies(labels, pop, run_min_rho_protocol(pop).rho_min);
    for (std::size_t i = 0; i < pop.size(); ++i) CHECK(f.eta[i] <= pop[i].power_cap * (1.0 + 1e-9));
  }
}
