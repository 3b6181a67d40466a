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

#include "scene/fd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "scene/analysis.hpp"
#include "scene/error.hpp"
#include "scene/estimators.hpp"
#include "scene/power.hpp"

namespace scene::fd {

std::vector<double> cluster_means(const GeneratorConfig& gen, RandomSource& rng) {
  const std::size_t k = gen.num_classes;
  const std::size_t d = gen.dim;
  std::vector<double> means(k * d, 0.0);
  if (k <= d) {
    // e_c - (1/K) 1, scaled to unit norm: pairwise cosine -1/(K-1).
    const double kd = static_cast<double>(k);
    const double norm = std::sqrt((kd - 1.0) / kd);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < k; ++j) means[c * d + j] = ((j == c ? 1.0 : 0.0) - 1.0 / kd) / norm;
    }
    return means;
  }
  for (std::size_t c = 0; c < k; ++c) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      means[c * d + j] = rng.normal();
      sq += means[c * d + j] * means[c * d + j];
    }
    for (std::size_t j = 0; j < d; ++j) means[c * d + j] /= std::sqrt(sq);
  }
  return means;
}

SyntheticDataset generate_dataset(const GeneratorConfig& gen, std::span<const double> means, std::size_t n,
                                  RandomSource& rng) {
  SyntheticDataset data;
  data.dim = gen.dim;
  data.num_classes = gen.num_classes;
  data.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) data.labels[i] = static_cast<int>(i % gen.num_classes);
  std::shuffle(data.labels.begin(), data.labels.end(), rng.engine());
  data.features.resize(n * gen.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(data.labels[i]);
    for (std::size_t j = 0; j < gen.dim; ++j) {
      data.features[i * gen.dim + j] = means[c * gen.dim + j] + gen.noise_std * rng.normal();
    }
  }
  return data;
}

SoftmaxClassifier::SoftmaxClassifier(std::size_t dim, std::size_t num_classes)
    : dim_(dim), k_(num_classes), w_(dim * num_classes, 0.0), b_(num_classes, 0.0) {}

SoftmaxClassifier SoftmaxClassifier::random_init(std::size_t dim, std::size_t num_classes, RandomSource& rng,
                                                 double scale) {
  SoftmaxClassifier model(dim, num_classes);
  for (auto& w : model.w_) w = scale * rng.normal();
  return model;
}

namespace {

// Writes log-softmax of the affine scores into `out`.
void log_probabilities(const SoftmaxClassifier& m, std::span<const double> x, std::vector<double>& out) {
  const std::size_t k = m.num_classes();
  const auto& w = m.weights();
  out.assign(m.bias().begin(), m.bias().end());
  for (std::size_t j = 0; j < m.dim(); ++j) {
    const double xj = x[j];
    const double* row = &w[j * k];
    for (std::size_t c = 0; c < k; ++c) out[c] += xj * row[c];
  }
  const double top = *std::max_element(out.begin(), out.end());
  double z = 0.0;
  for (double s : out) z += std::exp(s - top);
  const double log_z = top + std::log(z);
  for (auto& s : out) s -= log_z;
}

}  // namespace

std::vector<double> SoftmaxClassifier::probabilities(std::span<const double> x) const {
  std::vector<double> p;
  log_probabilities(*this, x, p);
  double total = 0.0;
  for (auto& v : p) total += (v = std::exp(v));
  for (auto& v : p) v /= total;
  return p;
}

SoftLabel SoftmaxClassifier::predict(std::span<const double> x) const {
  return unchecked_soft_label(probabilities(x));
}

int SoftmaxClassifier::classify(std::span<const double> x) const {
  std::vector<double> p;
  log_probabilities(*this, x, p);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

double SoftmaxClassifier::loss_and_gradient(std::span<const double> features, std::span<const double> targets,
                                            std::size_t batch, std::vector<double>& grad_w,
                                            std::vector<double>& grad_b) const {
  grad_w.assign(w_.size(), 0.0);
  grad_b.assign(b_.size(), 0.0);
  std::vector<double> logp;
  double loss = 0.0;
  const double inv = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const auto x = features.subspan(i * dim_, dim_);
    const auto t = targets.subspan(i * k_, k_);
    log_probabilities(*this, x, logp);
    for (std::size_t c = 0; c < k_; ++c) {
      if (t[c] > 0.0) loss += t[c] * (std::log(t[c]) - logp[c]);
      const double g = (std::exp(logp[c]) - t[c]) * inv;
      grad_b[c] += g;
      for (std::size_t j = 0; j < dim_; ++j) grad_w[j * k_ + c] += x[j] * g;
    }
  }
  return loss * inv;
}

double SoftmaxClassifier::accuracy(const SyntheticDataset& data) const {
  if (data.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) hits += classify(data.row(i)) == data.labels[i];
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

std::vector<double> train(SoftmaxClassifier& model, std::span<const double> features,
                          std::span<const double> targets, std::size_t n, const SgdConfig& sgd,
                          RandomSource& rng) {
  const std::size_t d = model.dim();
  const std::size_t k = model.num_classes();
  if (features.size() != n * d || targets.size() != n * k) {
    throw Error(ErrorCode::ShapeMismatch, "training data does not match model shape");
  }
  if (sgd.batch == 0) throw Error(ErrorCode::InvalidArgument, "batch size must be >= 1");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> vel_w(model.weights().size(), 0.0), vel_b(k, 0.0);
  std::vector<double> gw, gb, bx, bt;
  std::vector<double> history;
  for (std::size_t epoch = 0; epoch < sgd.epochs; ++epoch) {
    const double lr = sgd.schedule == StepSchedule::InverseSqrt
                          ? sgd.learning_rate / std::sqrt(static_cast<double>(epoch + 1))
                          : sgd.learning_rate;
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t start = 0; start < n; start += sgd.batch) {
      const std::size_t len = std::min(sgd.batch, n - start);
      bx.resize(len * d);
      bt.resize(len * k);
      for (std::size_t r = 0; r < len; ++r) {
        const std::size_t src = order[start + r];
        std::copy_n(features.begin() + static_cast<std::ptrdiff_t>(src * d), d, bx.begin() + static_cast<std::ptrdiff_t>(r * d));
        std::copy_n(targets.begin() + static_cast<std::ptrdiff_t>(src * k), k, bt.begin() + static_cast<std::ptrdiff_t>(r * k));
      }
      model.loss_and_gradient(bx, bt, len, gw, gb);
      auto& w = model.weights();
      auto& b = model.bias();
      for (std::size_t j = 0; j < w.size(); ++j) {
        vel_w[j] = sgd.momentum * vel_w[j] + gw[j] + sgd.weight_decay * w[j];
        w[j] -= lr * vel_w[j];
      }
      for (std::size_t c = 0; c < k; ++c) {
        vel_b[c] = sgd.momentum * vel_b[c] + gb[c];
        b[c] -= lr * vel_b[c];
      }
    }
    const double loss = model.loss_and_gradient(features, targets, n, gw, gb);
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "loss became " << loss << " at epoch " << epoch << " (lr=" << sgd.learning_rate
          << ", momentum=" << sgd.momentum << ", batch=" << sgd.batch << ", weight_decay=" << sgd.weight_decay << ")";
      throw Error(ErrorCode::Divergence, msg.str());
    }
    history.push_back(loss);
  }
  return history;
}

const char* to_string(Aggregation agg) noexcept {
  switch (agg) {
    case Aggregation::Plain: return "plain";
    case Aggregation::Scene: return "scene";
    case Aggregation::RatioScene: return "ratio";
  }
  return "unknown";
}

void FdProtocolConfig::validate() const {
  if (clients < 1) throw Error(ErrorCode::InvalidArgument, "need at least one client");
  if (private_size < clients) throw Error(ErrorCode::InvalidArgument, "private set smaller than client count");
  if (private_size + open_size > dataset_size) {
    throw Error(ErrorCode::InvalidArgument, "I_p + I_o exceeds the dataset size");
  }
  if (unlabeled_budget == 0) throw Error(ErrorCode::EmptyBudget, "unlabeled budget U must be >= 1");
  if (unlabeled_budget > open_size) throw Error(ErrorCode::InvalidArgument, "U exceeds the open set size");
  if (reps < 1 || antennas < 1) throw Error(ErrorCode::InvalidArgument, "S and M must be >= 1");
  if (generator.num_classes < 2) throw Error(ErrorCode::BadLength, "K must be >= 2");
  if (!(cap_min > 0.0) || cap_min > cap_max) throw Error(ErrorCode::BadRange, "power cap range");
}

FdData make_fd_data(const FdProtocolConfig& cfg, RandomSource& rng) {
  cfg.validate();
  RandomSource mean_rng = rng.split(0);
  RandomSource pool_rng = rng.split(1);
  RandomSource test_rng = rng.split(2);
  const auto means = cluster_means(cfg.generator, mean_rng);
  const auto pool = generate_dataset(cfg.generator, means, cfg.dataset_size, pool_rng);

  auto slice = [&](std::size_t from, std::size_t count) {
    SyntheticDataset part;
    part.dim = pool.dim;
    part.num_classes = pool.num_classes;
    part.labels.assign(pool.labels.begin() + static_cast<std::ptrdiff_t>(from),
                       pool.labels.begin() + static_cast<std::ptrdiff_t>(from + count));
    part.features.assign(pool.features.begin() + static_cast<std::ptrdiff_t>(from * pool.dim),
                         pool.features.begin() + static_cast<std::ptrdiff_t>((from + count) * pool.dim));
    return part;
  };
  return FdData{slice(0, cfg.private_size), slice(cfg.private_size, cfg.open_size),
                generate_dataset(cfg.generator, means, cfg.test_size, test_rng)};
}

std::vector<std::size_t> shard_sizes(const FdProtocolConfig& cfg) {
  std::vector<std::size_t> sizes(cfg.clients, cfg.private_size / cfg.clients);
  for (std::size_t i = 0; i < cfg.private_size % cfg.clients; ++i) ++sizes[i];
  return sizes;
}

std::vector<SyntheticDataset> client_shards(const FdProtocolConfig& cfg, const FdData& data,
                                            const RandomSource& rng) {
  cfg.validate();
  const auto& priv = data.private_set;
  std::vector<std::size_t> order(priv.size());
  std::iota(order.begin(), order.end(), 0);
  RandomSource split_rng = rng.split(0);
  std::shuffle(order.begin(), order.end(), split_rng.engine());

  const auto sizes = shard_sizes(cfg);
  std::vector<SyntheticDataset> shards(cfg.clients);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < cfg.clients; ++i) {
    auto& sh = shards[i];
    sh.dim = priv.dim;
    sh.num_classes = priv.num_classes;
    for (std::size_t r = 0; r < sizes[i]; ++r) {
      const auto src = order[offset + r];
      const auto row = priv.row(src);
      sh.features.insert(sh.features.end(), row.begin(), row.end());
      sh.labels.push_back(priv.labels[src]);
    }
    offset += sizes[i];
  }
  return shards;
}

std::vector<SoftmaxClassifier> pretrain_clients(const FdProtocolConfig& cfg, const FdData& data,
                                                RandomSource& rng) {
  const std::size_t d = data.private_set.dim;
  const std::size_t k = data.private_set.num_classes;
  const auto shards = client_shards(cfg, data, rng);
  std::vector<SoftmaxClassifier> clients;
  for (std::size_t i = 0; i < cfg.clients; ++i) {
    const auto& sh = shards[i];
    std::vector<double> t(sh.size() * k, 0.0);
    for (std::size_t r = 0; r < sh.size(); ++r) t[r * k + static_cast<std::size_t>(sh.labels[r])] = 1.0;
    RandomSource init_rng = rng.split(100 + i);
    RandomSource sgd_rng = rng.split(10000 + i);
    auto model = SoftmaxClassifier::random_init(d, k, init_rng);
    train(model, sh.features, t, sh.size(), cfg.pretrain, sgd_rng);
    clients.push_back(std::move(model));
  }
  return clients;
}

DevicePopulation fd_population(const FdProtocolConfig& cfg, std::span<const std::size_t> sizes, RandomSource& rng) {
  const auto beta = sample_pathloss(cfg.pathloss, sizes.size(), rng);
  const double total = static_cast<double>(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}));
  std::vector<DeviceProfile> devices(sizes.size());
  double partial = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    auto& d = devices[i];
    d.omega = static_cast<double>(sizes[i]) / total;
    d.beta_true = d.beta_assumed = beta[i];
    d.power_cap = rng.uniform(cfg.cap_min, cfg.cap_max);
    if (i + 1 < sizes.size()) partial += d.omega;
  }
  devices.back().omega = 1.0 - partial;
  return DevicePopulation(std::move(devices));
}

DistillOutcome one_shot_distill(const FdProtocolConfig& cfg, std::span<const SoftmaxClassifier> clients,
                                SoftmaxClassifier server, const FdData& data, RandomSource& rng) {
  cfg.validate();
  if (clients.size() != cfg.clients) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(clients.size()) + " clients for N = " +
                                               std::to_string(cfg.clients));
  }
  const std::size_t d = data.open_set.dim;
  const std::size_t k = data.open_set.num_classes;
  const std::size_t u = cfg.unlabeled_budget;

  // Independent streams so that aggregation variants sharing a seed see the
  // same population, the same unlabeled subset, and the same SGD order.
  RandomSource pop_rng = rng.split(0);
  RandomSource ota_rng = rng.split(1);
  RandomSource pick_rng = rng.split(2);
  RandomSource sgd_rng = rng.split(3);

  const auto sizes = shard_sizes(cfg);
  const auto pop = fd_population(cfg, sizes, pop_rng);

  RoundConfig round;
  round.num_classes = k;
  round.reps = cfg.reps;
  round.antennas = cfg.antennas;
  round.rho = cfg.fixed_rho ? cfg.rho : run_min_rho_protocol(pop).rho_min;
  round.noise_var = cfg.noise_free ? 0.0 : calibrate_noise(round.rho, k, cfg.snr_db);
  round.channel_model = cfg.channel_model;
  round.fading = cfg.fading;
  round.use_reference_re = cfg.aggregation == Aggregation::RatioScene;
  round.validate();

  std::vector<std::size_t> pool(data.open_set.size());
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < u; ++i) std::swap(pool[i], pool[i + pick_rng.index(pool.size() - i)]);

  DistillMetrics metrics;
  metrics.rho = round.rho;
  metrics.noise_var = round.noise_var;
  std::vector<double> x, t;
  x.reserve(u * d);
  t.reserve(u * k);
  std::vector<SoftLabel> labels;
  double err = 0.0;
  for (std::size_t s = 0; s < u; ++s) {
    const auto row = data.open_set.row(pool[s]);
    labels.clear();
    for (const auto& c : clients) labels.push_back(c.predict(row));
    const auto plain = weighted_average(labels, pop);

    std::vector<double> target;
    if (cfg.aggregation == Aggregation::Plain) {
      target = plain.vec();
    } else {
      const auto frame = map_energies(labels, pop, round.rho, round.use_reference_re);
      const auto y = simulate_round(frame, pop, round, ota_rng);
      target = cfg.aggregation == Aggregation::Scene ? scene_estimate(y, round).projected.vec()
                                                     : ratio_estimate(y).projected.vec();
    }
    double sq = 0.0;
    for (std::size_t c = 0; c < k; ++c) sq += (target[c] - plain[c]) * (target[c] - plain[c]);
    err += std::sqrt(sq);

    x.insert(x.end(), row.begin(), row.end());
    t.insert(t.end(), target.begin(), target.end());
    metrics.targets.push_back(std::move(target));
    metrics.plain_targets.push_back(plain.vec());
  }
  metrics.agg_l2_error = err / static_cast<double>(u);
  metrics.epoch_loss = train(server, x, t, u, cfg.distill, sgd_rng);
  metrics.server_accuracy = server.accuracy(data.test_set);
  return DistillOutcome{std::move(server), std::move(metrics)};
}

}  // namespace scene::fd
