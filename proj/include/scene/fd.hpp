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
#include <span>
#include <vector>

#include "scene/channel.hpp"
#include "scene/core.hpp"
#include "scene/random.hpp"

namespace scene::fd {

/// Gaussian clusters around K unit-norm means. Means are the vertices of a
/// regular simplex when K - 1 <= d, otherwise random unit vectors.
struct SyntheticDataset {
  std::size_t dim = 0;
  std::size_t num_classes = 0;
  std::vector<double> features;  // row-major n x dim
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dim, dim);
  }
};

struct GeneratorConfig {
  std::size_t num_classes = 10;
  std::size_t dim = 16;
  double noise_std = 0.33;
};

std::vector<double> cluster_means(const GeneratorConfig& gen, RandomSource& rng);

/// Class counts are balanced within one sample.
SyntheticDataset generate_dataset(const GeneratorConfig& gen, std::span<const double> means,
                                  std::size_t n, RandomSource& rng);

/// Multinomial logistic regression: p = softmax(W^T x + b).
class SoftmaxClassifier {
 public:
  SoftmaxClassifier(std::size_t dim, std::size_t num_classes);

  static SoftmaxClassifier random_init(std::size_t dim, std::size_t num_classes,
                                       RandomSource& rng, double scale = 0.01);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_classes() const noexcept { return k_; }
  std::vector<double>& weights() noexcept { return w_; }  // dim x K, row-major
  std::vector<double>& bias() noexcept { return b_; }
  const std::vector<double>& weights() const noexcept { return w_; }
  const std::vector<double>& bias() const noexcept { return b_; }

  std::vector<double> probabilities(std::span<const double> x) const;
  SoftLabel predict(std::span<const double> x) const;
  int classify(std::span<const double> x) const;

  /// Mean KL(target || p) over the batch, and its gradient (same layout as
  /// weights()/bias()). Hard labels are one-hot targets, so this is also the
  /// cross-entropy up to the target entropy.
  double loss_and_gradient(std::span<const double> features, std::span<const double> targets,
                           std::size_t batch, std::vector<double>& grad_w,
                           std::vector<double>& grad_b) const;

  double accuracy(const SyntheticDataset& data) const;

 private:
  std::size_t dim_, k_;
  std::vector<double> w_, b_;
};

enum class StepSchedule { Constant, InverseSqrt };

struct SgdConfig {
  std::size_t epochs = 20;
  std::size_t batch = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  // InverseSqrt: epoch e uses learning_rate / sqrt(e + 1).
  StepSchedule schedule = StepSchedule::Constant;
};

/// Mini-batch SGD on KL(target || model). Returns the mean loss of each epoch,
/// evaluated on the full set after the epoch. Throws Divergence on
/// non-finite loss.
std::vector<double> train(SoftmaxClassifier& model, std::span<const double> features,
                          std::span<const double> targets, std::size_t n, const SgdConfig& sgd,
                          RandomSource& rng);

enum class Aggregation { Plain, Scene, RatioScene };

const char* to_string(Aggregation agg) noexcept;

struct FdProtocolConfig {
  std::size_t clients = 10;
  std::size_t dataset_size = 10000;  // pool the private and open sets are cut from
  std::size_t private_size = 6000;   // I_p
  std::size_t open_size = 4000;      // I_o
  std::size_t test_size = 2000;
  std::size_t unlabeled_budget = 1000;  // U
  SgdConfig pretrain{};
  SgdConfig distill{20, 32, 0.005, 0.9, 5e-4, StepSchedule::Constant};
  GeneratorConfig generator{};
  PathlossModel pathloss{};
  double cap_min = 0.5;
  double cap_max = 1.5;
  double snr_db = 5.0;
  std::size_t reps = 1;
  std::size_t antennas = 1;
  ChannelModel channel_model = ChannelModel::Superposition;
  Fading fading = Fading::Rayleigh;
  bool fixed_rho = false;  // false: rho from the min-rho protocol
  double rho = 1.0;
  bool noise_free = false;  // sigma_N^2 = 0 regardless of snr_db
  Aggregation aggregation = Aggregation::Scene;

  void validate() const;
};

/// Private pool, open (unlabeled) pool, and held-out test set.
struct FdData {
  SyntheticDataset private_set;
  SyntheticDataset open_set;
  SyntheticDataset test_set;
};

FdData make_fd_data(const FdProtocolConfig& cfg, RandomSource& rng);

/// Shard sizes of the even IID split (differ by at most one).
std::vector<std::size_t> shard_sizes(const FdProtocolConfig& cfg);

/// IID split of the private set into cfg.clients shards (shuffle drawn from
/// rng.split(0)).
std::vector<SyntheticDataset> client_shards(const FdProtocolConfig& cfg, const FdData& data,
                                            const RandomSource& rng);

/// Each client trains on its client_shards() shard with one-hot targets.
std::vector<SoftmaxClassifier> pretrain_clients(const FdProtocolConfig& cfg, const FdData& data,
                                                RandomSource& rng);

struct DistillMetrics {
  double server_accuracy = 0.0;
  double agg_l2_error = 0.0;  // mean per-sample ||q_hat - q_plain||_2
  double rho = 0.0;
  double noise_var = 0.0;
  std::vector<double> epoch_loss;
  std::vector<std::vector<double>> targets;  // per unlabeled sample
  std::vector<std::vector<double>> plain_targets;
};

struct DistillOutcome {
  SoftmaxClassifier server;
  DistillMetrics metrics;
};

/// Selects U open-set samples without replacement, aggregates client soft
/// labels per cfg.aggregation (one OTA round per sample), and distills the
/// server on the aggregated targets.
DistillOutcome one_shot_distill(const FdProtocolConfig& cfg,
                                std::span<const SoftmaxClassifier> clients,
                                SoftmaxClassifier server, const FdData& data, RandomSource& rng);

/// The device population used for OTA transport: omega_i = shard fraction,
/// pathloss drawn once, caps ~ U[cap_min, cap_max].
DevicePopulation fd_population(const FdProtocolConfig& cfg, std::span<const std::size_t> shard_sizes,
                               RandomSource& rng);

}  // namespace scene::fd
