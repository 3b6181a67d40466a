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

#include "scene/random.hpp"

#include <cmath>

namespace scene {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RandomSource RandomSource::split(std::uint64_t stream) const {
  return RandomSource(splitmix64(seed_ ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)));
}

double RandomSource::uniform() { return uniform_(engine_); }

double RandomSource::uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }

double RandomSource::normal() { return normal_(engine_); }

std::complex<double> RandomSource::complex_normal() {
  constexpr double kHalf = 0.70710678118654752440;
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {kHalf * re, kHalf * im};
}

double RandomSource::gamma(double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

std::vector<double> RandomSource::dirichlet(double alpha, std::size_t k) {
  std::vector<double> v(k);
  double total = 0.0;
  // Small alpha can underflow every gamma draw; retry until some mass exists.
  while (total <= 0.0) {
    total = 0.0;
    for (auto& x : v) {
      x = gamma(alpha);
      total += x;
    }
  }
  for (auto& x : v) x /= total;
  return v;
}

std::size_t RandomSource::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace scene
