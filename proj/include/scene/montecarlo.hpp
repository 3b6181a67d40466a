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
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scene/analysis.hpp"
#include "scene/channel.hpp"
#include "scene/core.hpp"
#include "scene/random.hpp"

namespace scene {

/// Streaming per-component moments (Welford) with pairwise merge.
/// Carries third and fourth central sums so the sampling error of the
/// variance itself can be reported.
class TrialStats {
 public:
  TrialStats() = default;
  explicit TrialStats(std::size_t dim);

  void add(std::span<const double> x);
  void merge(const TrialStats& other);

  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return mean_.size(); }
  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<double>& m2() const noexcept { return m2_; }

  double variance(std::size_t c) const;        // m2 / (n - 1); NaN for n < 2
  double standard_error(std::size_t c) const;  // sqrt(variance / n)
  // Standard error of variance(c), from the fourth central moment.
  double variance_standard_error(std::size_t c) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> mean_, m2_, m3_, m4_;
};

/// Runs `trials` calls of `body(rng, stats)` split into fixed-size chunks.
/// Chunk k draws from base.split(k) and chunks are merged in index order, so
/// results do not depend on `threads`.
inline constexpr std::size_t kTrialChunk = 2048;

using TrialBody = std::function<void(RandomSource&, std::vector<TrialStats>&)>;

std::vector<TrialStats> run_trials(std::size_t trials, const RandomSource& base,
                                   std::vector<TrialStats> prototype, const TrialBody& body,
                                   std::size_t threads = 0);

std::size_t default_threads();

enum class WeightRule { Uniform, RandomSizes };
enum class LabelKind { Fixed, Dirichlet, Vertex };
enum class RhoRule { Fixed, MinRho };
enum class EstimatorSel { Scene, Ratio, Both };

struct PopulationSpec {
  std::size_t num_devices = 10;
  PathlossModel pathloss{};
  double cap_min = 0.5;
  double cap_max = 1.5;
  WeightRule weights = WeightRule::Uniform;
  // gamma_i ~ U[1 - delta, 1 + delta]; beta_assumed = beta_true / gamma_i.
  double mismatch_delta = 0.0;
};

struct LabelSpec {
  LabelKind kind = LabelKind::Dirichlet;
  double alpha_dir = 0.3;
  std::vector<std::vector<double>> fixed;  // one row per device for LabelKind::Fixed
};

struct SmPair {
  std::size_t s = 1;
  std::size_t m = 1;
};

struct ExperimentSpec {
  std::size_t num_classes = 10;
  PopulationSpec population{};
  LabelSpec labels{};
  std::vector<SmPair> sm_pairs{{4, 4}};
  std::vector<double> snr_db{5.0};
  std::vector<ChannelModel> models{ChannelModel::Superposition};
  RhoRule rho_rule = RhoRule::MinRho;
  double rho_fixed = 1.0;
  double time_corr = 0.0;
  double space_corr = 0.0;
  EstimatorSel estimator = EstimatorSel::Scene;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;

  void validate() const;
};

/// Population and labels are drawn once per experiment from this stream.
struct Scenario {
  DevicePopulation population;
  std::vector<SoftLabel> labels;
  SoftLabel target;  // q_bar
};

Scenario draw_scenario(const ExperimentSpec& spec);

struct ResultRow {
  std::size_t s = 0, m = 0;
  double snr_db = 0.0;
  double rho = 0.0;
  ChannelModel model = ChannelModel::Superposition;
  std::string estimator;  // scene | scene_proj | ratio | ratio_proj
  std::size_t cls = 0;
  double mean = 0.0;
  double bias = 0.0;
  std::optional<double> var;
  std::optional<double> var_bound;
  std::optional<double> se;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

struct PointTiming {
  std::size_t s = 0, m = 0;
  double snr_db = 0.0;
  ChannelModel model{};
  double wall_seconds = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<PointTiming> timings;  // not serialized
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

inline constexpr const char* kExperimentCsvHeader =
    "S,M,snr_db,rho,model,estimator,class,mean,bias,var,var_bound,se,trials,seed";

void write_experiment_csv(std::ostream& out, std::span<const ResultRow> rows);

struct MsePoint {
  std::size_t s = 0, m = 0;
  double snr_db = 0.0;
  ChannelModel model{};
  double c = 0.0;   // class-averaged Var(r_c) * S * M
  double se = 0.0;  // from the variance sampling error
};

struct MseConstant {
  double c_nc = 0.0;
  double standard_error = 0.0;  // spread of the per-point values
  std::vector<MsePoint> points;
};

/// Mean over sweep points and classes of Var(r_c) * S * M from the raw
/// SCENE estimate. Needs at least three distinct S*M products.
MseConstant estimate_mse_constants(const ExperimentSpec& spec);

const char* to_string(ChannelModel model) noexcept;
std::string format_double(double v);  // 17 significant digits

}  // namespace scene
