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

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "scene/analysis.hpp"
#include "scene/error.hpp"
#include "support.hpp"

using namespace scene;
using testing::labels_of;

namespace {

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

DevicePopulation mismatched(RandomSource& rng, std::size_t n, double delta) {
  auto w = rng.dirichlet(1.0, n);
  std::vector<DeviceProfile> d(n);
  double partial = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i].omega = w[i];
    if (i + 1 < n) partial += w[i];
    d[i].beta_true = rng.uniform(0.2, 2.0);
    d[i].beta_assumed = d[i].beta_true / rng.uniform(1.0 - delta, 1.0 + delta);
  }
  d.back().omega = std::max(0.0, 1.0 - partial);
  return DevicePopulation(std::move(d));
}

}  // namespace

TEST_CASE("mismatch_bias examples") {
  auto pop = testing::uniform_population(3);
  RandomSource rng(1);
  auto labels = testing::dirichlet_labels(3, 4, 0.5, rng);
  for (double b : mismatch_bias(pop, labels)) CHECK(b == 0.0);

  DevicePopulation one({{1.0, 1.2, 1.0, 1.0}});
  auto b = mismatch_bias(one, labels_of({{1.0, 0.0}}));
  CHECK(b[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx(-0.1).epsilon(1e-12));

  DevicePopulation two({{0.5, 3.0, 1.0, 1.0}, {0.5, 1.0, 1.0, 1.0}});
  auto with_uniform = mismatch_bias(two, labels_of({{0.25, 0.25, 0.25, 0.25}, {1, 0, 0, 0}}));
  for (double x : with_uniform) CHECK(x == 0.0);
}

TEST_CASE("mismatch_bias_bound examples and errors") {
  CHECK(mismatch_bias_bound(0.0, 5) == 0.0);
  CHECK(mismatch_bias_bound(0.2, 2) == doctest::Approx(0.14142).epsilon(1e-4));
  CHECK(mismatch_bias_bound(0.2, 10) == doctest::Approx(0.18974).epsilon(1e-4));
  CHECK_THROWS_WITH_AS(mismatch_bias_bound(-0.1, 2), doctest::Contains("NegativeDelta"), Error);
  DevicePopulation one({{1.0, 1.2, 1.0, 1.0}});
  CHECK(l2(mismatch_bias(one, labels_of({{1.0, 0.0}}))) == doctest::Approx(mismatch_bias_bound(0.2, 2)).epsilon(1e-12));
}

TEST_CASE("bias vector sums to zero and respects the bound (property)") {
  RandomSource rng(2);
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 1 + rng.index(12), k = 2 + rng.index(12);
    const double delta = rng.uniform(0.0, 0.5);
    auto pop = mismatched(rng, n, delta);
    auto labels = testing::dirichlet_labels(n, k, 0.3, rng);
    auto b = mismatch_bias(pop, labels);
    CHECK(std::abs(std::accumulate(b.begin(), b.end(), 0.0)) <= 1e-14);
    CHECK(l2(b) <= mismatch_bias_bound(delta, k) * (1.0 + 1e-9));
  }
}

TEST_CASE("mismatch bias matches Monte Carlo scene means") {
  RandomSource rng(3);
  for (int t = 0; t < 4; ++t) {
    auto pop = mismatched(rng, 4, 0.3);
    auto labels = testing::dirichlet_labels(4, 3, 0.5, rng);
    RoundConfig cfg;
    cfg.num_classes = 3;
    cfg.reps = 2;
    cfg.antennas = 2;
    cfg.noise_var = 0.05;
    cfg.channel_model = t % 2 ? ChannelModel::Diagonal : ChannelModel::Superposition;
    auto st = testing::mc_round(labels, pop, cfg, 100000, 30 + t)[0];
    const auto b = mismatch_bias(pop, labels);
    const auto target = weighted_average(labels, pop);
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(std::abs(st.mean()[c] - target[c] - b[c]) <= 3.0 * st.standard_error(c));
    }
  }
}

TEST_CASE("variance_bound examples") {
  DevicePopulation one({{1.0, 1.0, 1.0, 1.0}});
  auto labels = labels_of({{0.7, 0.3}});
  RoundConfig cfg;
  cfg.num_classes = 2;
  auto b = variance_bound(one, labels, cfg);
  CHECK(b[0] == doctest::Approx(0.98).epsilon(1e-12));

  double prev = b[0];
  for (std::size_t s : {4u, 64u, 1024u}) {
    cfg.reps = s;
    cfg.antennas = s;
    const double v = variance_bound(one, labels, cfg)[0];
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-5);

  RoundConfig base;
  base.num_classes = 4;
  double last = 1e9;
  for (std::size_t n : {1u, 2u, 4u, 8u}) {
    auto pop = testing::uniform_population(n);
    std::vector<SoftLabel> u(n, SoftLabel::uniform(4));
    const double v = variance_bound(pop, u, base)[0];
    CHECK(v == doctest::Approx(2.0 / (16.0 * n)).epsilon(1e-12));
    CHECK(v < last);
    last = v;
  }
}

TEST_CASE("variance bound against the exact single-device value") {
  // N = 1, sigma = 0, S = M = 1, independent fading per class:
  // Var(r_0) = (E_0^2 + E_1^2) / (4 rho^2) = 0.145 <= 0.98.
  DevicePopulation one({{1.0, 1.0, 1.0, 1.0}});
  auto labels = labels_of({{0.7, 0.3}});
  RoundConfig cfg;
  cfg.num_classes = 2;
  cfg.channel_model = ChannelModel::Diagonal;
  auto st = testing::mc_round(labels, one, cfg, 200000, 4)[0];
  CHECK(std::abs(st.variance(0) - 0.145) <= 3.0 * st.variance_standard_error(0));
  CHECK(st.variance(0) <= variance_bound(one, labels, cfg)[0]);
}

TEST_CASE("exact centering identity on independent class energies") {
  RandomSource rng(5);
  const std::size_t n = 5, k = 6;
  auto pop = testing::uniform_population(n);
  auto labels = testing::dirichlet_labels(n, k, 0.4, rng);
  RoundConfig cfg;
  cfg.num_classes = k;
  cfg.reps = 2;
  cfg.noise_var = 0.01;
  cfg.channel_model = ChannelModel::Diagonal;
  auto st = testing::mc_round(labels, pop, cfg, 200000, 6);
  double sum_var = 0.0;
  for (std::size_t j = 0; j < k; ++j) sum_var += st[2].variance(j);
  const double scale = static_cast<double>(cfg.samples()) * cfg.rho;
  for (std::size_t c = 0; c < k; ++c) {
    const double kd = static_cast<double>(k);
    const double predicted = ((1.0 - 2.0 / kd) * st[2].variance(c) + sum_var / (kd * kd)) / (scale * scale);
    CHECK(st[0].variance(c) == doctest::Approx(predicted).epsilon(0.03));
  }
}

TEST_CASE("balanced_variance formula") {
  CHECK(balanced_variance(4.0, 2, 1, 1.0) == 2.0);
  CHECK(balanced_variance(9.0, 10, 3, 2.0) == doctest::Approx(0.9 * 9.0 / 36.0).epsilon(1e-15));
}

TEST_CASE("variance_bound_max_form") {
  DevicePopulation one({{1.0, 1.0, 1.0, 1.0}});
  auto labels = labels_of({{0.7, 0.3}});
  RoundConfig cfg;
  cfg.num_classes = 2;
  CHECK(variance_bound_max_form(one, labels, cfg) == doctest::Approx(0.5 * 2.0 * 0.49).epsilon(1e-12));
}

TEST_CASE("effective_samples") {
  auto zero = std::vector<double>(64, 0.0);
  auto e0 = effective_samples(16, 4, zero, zero);
  CHECK(e0.s_eff == 16.0);
  CHECK(e0.m_eff == 4.0);

  auto half = ar1_acf(0.5, 200);
  auto e = effective_samples(1000, 1000, half, half);
  CHECK(e.s_eff == doctest::Approx(1000.0 / 3.0).epsilon(1e-12));
  CHECK(e.m_eff == doctest::Approx(1000.0 / 3.0).epsilon(1e-12));

  // Truncation at S - 1: with S = 2 only lag 1 counts.
  auto e2 = effective_samples(2, 1, half, {});
  CHECK(e2.s_eff == 1.0);
  CHECK(e2.m_eff == 1.0);

  // Truncation at lag 64 for slowly decaying ACFs.
  std::vector<double> ones(100, 0.5);
  CHECK(effective_samples(1000, 1, ones, {}).s_eff == doctest::Approx(1000.0 / 65.0));

  std::vector<double> bad{-0.6};
  CHECK_THROWS_WITH_AS(effective_samples(4, 1, bad, {}), doctest::Contains("DivergentACF"), Error);
}

TEST_CASE("ar1_acf") {
  auto a = ar1_acf(0.5, 3);
  CHECK(a == std::vector<double>{0.5, 0.25, 0.125});
}

TEST_CASE("crossover examples") {
  CrossoverModel m;
  m.budget = 100.0;
  m.c_coh = 1.0;
  m.c_nc = 1.0;
  CHECK(crossover_threshold(m).p_threshold == 0.0);
  CHECK(scene_wins(m, 1.0));

  m.c_nc = 2.0;
  CHECK(crossover_threshold(m).p_threshold == 50.0);
  CHECK(scene_wins(m, 50.0));
  CHECK_FALSE(scene_wins(m, 49.0));

  m.c_coh = 3.0;
  CHECK(crossover_threshold(m).p_threshold == 0.0);

  m.c_coh = 1.0;
  m.pilot_cost = 20.0;
  m.num_classes = 10;
  m.antennas = 2;
  auto r = crossover_threshold(m);
  CHECK(r.s_coh == 8.0);
  CHECK(r.s_nc == 10.0);
  CHECK(r.mse_coh == doctest::Approx(1.0 / 16.0));
  CHECK(r.mse_nc == doctest::Approx(2.0 / 20.0));
  CHECK_FALSE(r.scene_wins);
}

TEST_CASE("crossover errors") {
  CrossoverModel m;
  m.pilot_cost = 100.0;
  CHECK_THROWS_WITH_AS(crossover_threshold(m), doctest::Contains("BadBudget"), Error);
  m.pilot_cost = -1.0;
  CHECK_THROWS_WITH_AS(crossover_threshold(m), doctest::Contains("BadBudget"), Error);
  m.pilot_cost = 0.0;
  m.c_nc = 0.0;
  CHECK_THROWS_AS(crossover_threshold(m), Error);
}

TEST_CASE("scene_wins agrees with the threshold off the boundary (property)") {
  RandomSource rng(7);
  for (int t = 0; t < 20000; ++t) {
    CrossoverModel m;
    m.budget = rng.uniform(1.0, 1000.0);
    m.c_coh = rng.uniform(0.1, 5.0);
    m.c_nc = rng.uniform(0.1, 5.0);
    const double p = rng.uniform(0.0, m.budget * 0.999);
    const double thr = crossover_threshold(m).p_threshold;
    if (std::abs(p - thr) < 1e-9 * m.budget) continue;
    CHECK(scene_wins(m, p) == (p >= thr));
  }
}

TEST_CASE("calibrate_noise") {
  CHECK(calibrate_noise(1.0, 10, 10.0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(calibrate_noise(1.0, 10, 0.0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(calibrate_noise(2.0, 10, 7.0) == doctest::Approx(2.0 * calibrate_noise(1.0, 10, 7.0)).epsilon(1e-14));
  CHECK_THROWS_WITH_AS(calibrate_noise(0.0, 10, 5.0), doctest::Contains("NonPositiveRho"), Error);
}
