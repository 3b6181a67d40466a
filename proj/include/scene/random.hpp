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

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace scene {

/// Seeded random stream. Every stochastic operation takes one explicitly;
/// there is no global generator.
///
/// `split(k)` derives a child stream whose seed is a SplitMix64 hash of the
/// parent seed and `k`. Children do not consume parent state, so the set of
/// children is fixed by the parent seed alone, which keeps parallel trial
/// chunks reproducible regardless of scheduling.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  RandomSource split(std::uint64_t stream) const;

  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // N(0, 1)
  std::complex<double> complex_normal();  // CN(0, 1): each part N(0, 1/2)
  double gamma(double shape);             // Gamma(shape, 1)
  std::vector<double> dirichlet(double alpha, std::size_t k);
  std::size_t index(std::size_t n);       // uniform in [0, n)

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace scene
