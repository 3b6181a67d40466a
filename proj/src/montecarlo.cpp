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

#include "scene/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <thread>

#include "scene/error.hpp"
#include "scene/estimators.hpp"
#include "scene/power.hpp"

namespace scene {

TrialStats::TrialStats(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0), m3_(dim, 0.0), m4_(dim, 0.0) {}

void TrialStats::add(std::span<const double> x) {
  if (x.size() != mean_.size()) throw Error(ErrorCode::ShapeMismatch, "sample dimension mismatch");
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double delta = x[c] - mean_[c];
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean_[c] += delta_n;
    m4_[c] += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_[c] - 4.0 * delta_n * m3_[c];
    m3_[c] += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_[c];
    m2_[c] += term1;
  }
}

void TrialStats::merge(const TrialStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  if (other.dim() != dim()) throw Error(ErrorCode::ShapeMismatch, "merging stats of different dimension");
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  for (std::size_t c = 0; c < dim(); ++c) {
    const double d = other.mean_[c] - mean_[c];
    const double d2 = d * d;
    const double m2 = m2_[c] + other.m2_[c] + d2 * na * nb / n;
    const double m3 = m3_[c] + other.m3_[c] + d2 * d * na * nb * (na - nb) / (n * n) +
                      3.0 * d * (na * other.m2_[c] - nb * m2_[c]) / n;
    const double m4 = m4_[c] + other.m4_[c] + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                      6.0 * d2 * (na * na * other.m2_[c] + nb * nb * m2_[c]) / (n * n) +
                      4.0 * d * (na * other.m3_[c] - nb * m3_[c]) / n;
    mean_[c] += d * nb / n;
    m2_[c] = m2;
    m3_[c] = m3;
    m4_[c] = m4;
  }
  n_ += other.n_;
}

double TrialStats::variance(std::size_t c) const {
  if (n_ < 2) return std::numeric_limits<double>::quiet_NaN();
  return m2_[c] / static_cast<double>(n_ - 1);
}

double TrialStats::standard_error(std::size_t c) const {
  return std::sqrt(variance(c) / static_cast<double>(n_));
}

double TrialStats::variance_standard_error(std::size_t c) const {
  if (n_ < 4) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(n_);
  const double mu4 = m4_[c] / n;
  const double s2 = variance(c);
  const double v = (mu4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
  return std::sqrt(std::max(v, 0.0));
}

std::size_t default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<TrialStats> run_trials(std::size_t trials, const RandomSource& base,
                                   std::vector<TrialStats> prototype, const TrialBody& body,
                                   std::size_t threads) {
  const std::size_t chunks = (trials + kTrialChunk - 1) / kTrialChunk;
  std::vector<std::vector<TrialStats>> partial(chunks, prototype);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (std::size_t k = next++; k < chunks && !failed; k = next++) {
      try {
        RandomSource rng = base.split(k);
        const std::size_t count = std::min(kTrialChunk, trials - k * kTrialChunk);
        for (std::size_t t = 0; t < count; ++t) body(rng, partial[k]);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::min(threads == 0 ? default_threads() : threads, std::max<std::size_t>(chunks, 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& part : partial) {
    for (std::size_t j = 0; j < prototype.size(); ++j) prototype[j].merge(part[j]);
  }
  return prototype;
}

void ExperimentSpec::validate() const {
  if (num_classes < 2) throw Error(ErrorCode::BadLength, "num_classes must be >= 2");
  if (sm_pairs.empty() || snr_db.empty() || models.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sweep lists must be nonempty");
  }
  for (const auto& p : sm_pairs) {
    if (p.s < 1 || p.m < 1) throw Error(ErrorCode::InvalidArgument, "S and M must be >= 1");
  }
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (population.num_devices < 1) throw Error(ErrorCode::InvalidArgument, "need at least one device");
  if (!(population.cap_min > 0.0) || population.cap_min > population.cap_max) {
    throw Error(ErrorCode::BadRange, "power cap range");
  }
  if (!(population.mismatch_delta >= 0.0 && population.mismatch_delta < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "mismatch_delta must lie in [0, 1)");
  }
  if (rho_rule == RhoRule::Fixed && !(rho_fixed > 0.0)) throw Error(ErrorCode::NonPositiveRho, "rho_fixed");
  if (labels.kind == LabelKind::Dirichlet && !(labels.alpha_dir > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha_dir must be > 0");
  }
  if (!(time_corr >= 0.0 && time_corr < 1.0) || !(space_corr >= 0.0 && space_corr < 1.0)) {
    throw Error(ErrorCode::BadCoefficient, "correlation coefficients must lie in [0, 1)");
  }
}

Scenario draw_scenario(const ExperimentSpec& spec) {
  spec.validate();
  RandomSource rng = RandomSource(spec.seed).split(0);
  const auto& ps = spec.population;
  const std::size_t n = ps.num_devices;
  const std::size_t k = spec.num_classes;

  const auto beta = sample_pathloss(ps.pathloss, n, rng);
  std::vector<double> sizes(n, 1.0);
  if (ps.weights == WeightRule::RandomSizes) {
    for (auto& s : sizes) s = rng.uniform(0.5, 1.5);
  }
  double total = 0.0;
  for (double s : sizes) total += s;

  std::vector<DeviceProfile> devices(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& d = devices[i];
    d.omega = sizes[i] / total;
    d.beta_true = beta[i];
    d.power_cap = rng.uniform(ps.cap_min, ps.cap_max);
    const double gamma = ps.mismatch_delta > 0.0 ? rng.uniform(1.0 - ps.mismatch_delta, 1.0 + ps.mismatch_delta) : 1.0;
    d.beta_assumed = d.beta_true / gamma;
  }
  // Fold rounding of the weight sum into the last device.
  double partial = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) partial += devices[i].omega;
  devices.back().omega = 1.0 - partial;

  std::vector<SoftLabel> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (spec.labels.kind) {
      case LabelKind::Fixed:
        if (spec.labels.fixed.size() != n) {
          throw Error(ErrorCode::LengthMismatch, "fixed labels need one row per device");
        }
        labels.push_back(validate_soft_label(spec.labels.fixed[i]));
        if (labels.back().size() != k) throw Error(ErrorCode::LengthMismatch, "fixed label has wrong K");
        break;
      case LabelKind::Dirichlet:
        labels.push_back(validate_soft_label(rng.dirichlet(spec.labels.alpha_dir, k)));
        break;
      case LabelKind::Vertex: {
        std::vector<double> v(k, 0.0);
        v[i % k] = 1.0;
        labels.push_back(validate_soft_label(std::move(v)));
        break;
      }
    }
  }
  DevicePopulation pop(std::move(devices));
  auto target = weighted_average(labels, pop);
  return Scenario{std::move(pop), std::move(labels), std::move(target)};
}

const char* to_string(ChannelModel model) noexcept {
  return model == ChannelModel::Superposition ? "superposition" : "diagonal";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

struct Point {
  ChannelModel model;
  double snr_db;
  SmPair sm;
};

std::vector<Point> sweep_points(const ExperimentSpec& spec) {
  std::vector<Point> points;
  for (auto model : spec.models) {
    for (double snr : spec.snr_db) {
      for (const auto& sm : spec.sm_pairs) points.push_back({model, snr, sm});
    }
  }
  return points;
}

enum Stream : std::size_t { kSceneRaw, kSceneProj, kRatioRaw, kRatioProj, kStreams };

struct PointOutcome {
  RoundConfig cfg;
  std::vector<TrialStats> stats;  // indexed by Stream; unused streams stay empty
  double wall_seconds = 0.0;
};

PointOutcome run_point(const ExperimentSpec& spec, const Scenario& sc, const Point& p, std::size_t index) {
  const std::size_t k = spec.num_classes;
  const bool want_scene = spec.estimator != EstimatorSel::Ratio;
  const bool want_ratio = spec.estimator != EstimatorSel::Scene;

  PointOutcome out;
  auto& cfg = out.cfg;
  cfg.num_classes = k;
  cfg.reps = p.sm.s;
  cfg.antennas = p.sm.m;
  cfg.rho = spec.rho_rule == RhoRule::MinRho ? run_min_rho_protocol(sc.population).rho_min : spec.rho_fixed;
  cfg.noise_var = calibrate_noise(cfg.rho, k, p.snr_db);
  cfg.channel_model = p.model;
  cfg.time_corr = spec.time_corr;
  cfg.space_corr = spec.space_corr;
  cfg.use_reference_re = want_ratio;
  cfg.validate();

  const auto frame = map_energies(sc.labels, sc.population, cfg.rho, want_ratio);
  const auto& pop = sc.population;

  std::vector<TrialStats> proto(kStreams);
  if (want_scene) proto[kSceneRaw] = proto[kSceneProj] = TrialStats(k);
  if (want_ratio) proto[kRatioRaw] = proto[kRatioProj] = TrialStats(k);

  auto body = [&](RandomSource& rng, std::vector<TrialStats>& acc) {
    const auto y = simulate_round_correlated(frame, pop, cfg, rng);
    if (want_scene) {
      const auto est = scene_estimate(y, cfg);
      acc[kSceneRaw].add(est.raw);
      acc[kSceneProj].add(est.projected.probs());
    }
    if (want_ratio) {
      const auto est = ratio_estimate(y);
      acc[kRatioRaw].add(est.raw);
      acc[kRatioProj].add(est.projected.probs());
    }
  };

  const auto start = std::chrono::steady_clock::now();
  try {
    out.stats = run_trials(spec.trials, RandomSource(spec.seed).split(1 + index), std::move(proto), body, spec.threads);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("sweep point S=") + std::to_string(p.sm.s) + " M=" + std::to_string(p.sm.m) +
                              " snr_db=" + format_double(p.snr_db) + " model=" + to_string(p.model) + ": " + e.what());
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::optional<double> defined(double v) {
  if (std::isfinite(v)) return v;
  return std::nullopt;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  const auto sc = draw_scenario(spec);
  const auto points = sweep_points(spec);
  static constexpr const char* kNames[kStreams] = {"scene", "scene_proj", "ratio", "ratio_proj"};

  ExperimentResult result;
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    const auto& p = points[idx];
    const auto outcome = run_point(spec, sc, p, idx);
    const auto bound = variance_bound(sc.population, sc.labels, outcome.cfg);
    result.timings.push_back({p.sm.s, p.sm.m, p.snr_db, p.model, outcome.wall_seconds});

    for (std::size_t stream = 0; stream < kStreams; ++stream) {
      const auto& st = outcome.stats[stream];
      if (st.dim() == 0) continue;
      for (std::size_t c = 0; c < spec.num_classes; ++c) {
        ResultRow row;
        row.s = p.sm.s;
        row.m = p.sm.m;
        row.snr_db = p.snr_db;
        row.rho = outcome.cfg.rho;
        row.model = p.model;
        row.estimator = kNames[stream];
        row.cls = c;
        row.mean = st.mean()[c];
        row.bias = st.mean()[c] - sc.target[c];
        row.var = defined(st.variance(c));
        if (stream == kSceneRaw) row.var_bound = bound[c];
        row.se = defined(st.standard_error(c));
        row.trials = st.n();
        row.seed = spec.seed;
        result.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

void write_experiment_csv(std::ostream& out, std::span<const ResultRow> rows) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  out << kExperimentCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.s << ',' << r.m << ',' << format_double(r.snr_db) << ',' << format_double(r.rho) << ','
        << to_string(r.model) << ',' << r.estimator << ',' << r.cls << ',' << format_double(r.mean) << ','
        << format_double(r.bias) << ',' << opt(r.var) << ',' << opt(r.var_bound) << ',' << opt(r.se) << ','
        << r.trials << ',' << r.seed << '\n';
  }
}

MseConstant estimate_mse_constants(const ExperimentSpec& spec) {
  std::set<std::size_t> products;
  for (const auto& p : spec.sm_pairs) products.insert(p.s * p.m);
  if (products.size() < 3) {
    throw Error(ErrorCode::InsufficientSweep,
                "need at least 3 distinct S*M products, got " + std::to_string(products.size()));
  }
  if (spec.trials < 4) throw Error(ErrorCode::InsufficientSweep, "need at least 4 trials per point");

  ExperimentSpec scene_only = spec;
  scene_only.estimator = EstimatorSel::Scene;
  const auto sc = draw_scenario(scene_only);
  const auto points = sweep_points(scene_only);

  MseConstant out;
  const double k = static_cast<double>(spec.num_classes);
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    const auto& p = points[idx];
    const auto outcome = run_point(scene_only, sc, p, idx);
    const auto& st = outcome.stats[kSceneRaw];
    const double sm = static_cast<double>(p.sm.s * p.sm.m);
    double c_sum = 0.0, se_sq = 0.0;
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
      c_sum += st.variance(c);
      const double se = st.variance_standard_error(c);
      se_sq += se * se;
    }
    out.points.push_back({p.sm.s, p.sm.m, p.snr_db, p.model, sm * c_sum / k, sm * std::sqrt(se_sq) / k});
  }
  double mean = 0.0;
  for (const auto& p : out.points) mean += p.c;
  mean /= static_cast<double>(out.points.size());
  double ss = 0.0;
  for (const auto& p : out.points) ss += (p.c - mean) * (p.c - mean);
  const double np = static_cast<double>(out.points.size());
  out.c_nc = mean;
  out.standard_error = std::sqrt(ss / (np - 1.0) / np);
  return out;
}

}  // namespace scene
