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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>

#include "scene/cli.hpp"
#include "scene/error.hpp"
#include "scene/estimators.hpp"
#include "scene/power.hpp"

namespace scene::cli {

namespace {

namespace fs = std::filesystem;

// Runs one stage; failures are reported as "<command>: <stage>: <message>".
class Stages {
 public:
  Stages(const char* command, std::ostream& err) : command_(command), err_(err) {}

  template <typename F>
  bool run(const char* stage, F&& f) {
    try {
      f();
      return true;
    } catch (const std::exception& e) {
      err_ << command_ << ": " << stage << ": " << e.what() << "\n";
      return false;
    }
  }

 private:
  const char* command_;
  std::ostream& err_;
};

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string() + " for writing");
  f << contents;
  f.close();
  if (!f) throw Error(ErrorCode::InvalidArgument, "write failed for " + path.string());
}

void prepare_out(const CliConfig& cfg) {
  fs::create_directories(cfg.out);
  write_file(fs::path(cfg.out) / kResolvedConfigName, cfg.resolved_json);
}

std::string fixed(double v, int prec = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

}  // namespace

int cmd_round(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  Stages st("round", err);
  const auto& spec = cfg.experiment;

  std::optional<Scenario> sc;
  if (!st.run("scenario", [&] {
        spec.validate();
        sc = draw_scenario(spec);
      })) {
    return 1;
  }

  const bool want_scene = spec.estimator != EstimatorSel::Ratio;
  const bool want_ratio = spec.estimator != EstimatorSel::Scene;
  RoundConfig round;
  std::optional<EnergyFrame> frame;
  if (!st.run("power", [&] {
        round.num_classes = spec.num_classes;
        round.reps = spec.sm_pairs.front().s;
        round.antennas = spec.sm_pairs.front().m;
        round.rho = spec.rho_rule == RhoRule::MinRho ? run_min_rho_protocol(sc->population).rho_min
                                                     : spec.rho_fixed;
        round.noise_var = calibrate_noise(round.rho, spec.num_classes, spec.snr_db.front());
        round.channel_model = spec.models.front();
        round.time_corr = spec.time_corr;
        round.space_corr = spec.space_corr;
        round.use_reference_re = want_ratio;
        round.validate();
        frame = map_energies(sc->labels, sc->population, round.rho, want_ratio);
      })) {
    return 1;
  }

  std::optional<ReceivedEnergies> y;
  if (!st.run("channel", [&] {
        RandomSource rng = RandomSource(cfg.seed).split(1);
        y = simulate_round_correlated(*frame, sc->population, round, rng);
      })) {
    return 1;
  }

  std::optional<AggregateResult> scene_res, ratio_res;
  std::vector<double> bound;
  if (!st.run("estimator", [&] {
        if (want_scene) scene_res = scene_estimate(*y, round);
        if (want_ratio) ratio_res = ratio_estimate(*y);
        bound = variance_bound(sc->population, sc->labels, round);
      })) {
    return 1;
  }

  std::ostringstream csv;
  csv << "class,target,estimator,raw,projected,bias,var_bound\n";
  auto emit = [&](const char* name, const AggregateResult& r) {
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
      csv << c << ',' << format_double(sc->target[c]) << ',' << name << ',' << format_double(r.raw[c]) << ','
          << format_double(r.projected[c]) << ',' << format_double(r.raw[c] - sc->target[c]) << ','
          << (std::string(name) == "scene" ? format_double(bound[c]) : std::string()) << '\n';
    }
  };
  if (scene_res) emit("scene", *scene_res);
  if (ratio_res) emit("ratio", *ratio_res);

  if (!st.run("output", [&] {
        prepare_out(cfg);
        write_file(fs::path(cfg.out) / "round.csv", csv.str());
      })) {
    return 1;
  }

  out << "S=" << round.reps << " M=" << round.antennas << " snr_db=" << spec.snr_db.front()
      << " model=" << to_string(round.channel_model) << " rho=" << format_double(round.rho)
      << " noise_var=" << format_double(round.noise_var) << "\n";
  auto table = [&](const char* name, const AggregateResult& r, bool with_bound) {
    out << "[" << name << "]\n  c  q_bar      raw        proj       bias" << (with_bound ? "       var_bound" : "")
        << "\n";
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
      char line[160];
      std::snprintf(line, sizeof line, "%3zu  %-9s  %-9s  %-9s  %-9s", c, fixed(sc->target[c]).c_str(),
                    fixed(r.raw[c]).c_str(), fixed(r.projected[c]).c_str(),
                    fixed(r.raw[c] - sc->target[c]).c_str());
      out << line;
      if (with_bound) out << "  " << fixed(bound[c], 8);
      out << "\n";
    }
  };
  if (scene_res) table("scene", *scene_res, true);
  if (ratio_res) table("ratio", *ratio_res, false);
  return 0;
}

int cmd_sweep(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  Stages st("sweep", err);
  std::optional<ExperimentResult> result;
  if (!st.run("experiment", [&] {
        cfg.experiment.validate();
        result = run_experiment(cfg.experiment);
      })) {
    return 1;
  }
  if (!st.run("output", [&] {
        prepare_out(cfg);
        std::ostringstream csv;
        write_experiment_csv(csv, result->rows);
        write_file(fs::path(cfg.out) / "montecarlo.csv", csv.str());
      })) {
    return 1;
  }
  for (const auto& t : result->timings) {
    out << "S=" << t.s << " M=" << t.m << " snr_db=" << t.snr_db << " model=" << to_string(t.model) << " "
        << fixed(t.wall_seconds, 3) << " s\n";
  }
  out << result->rows.size() << " rows written to " << (fs::path(cfg.out) / "montecarlo.csv").string() << "\n";
  return 0;
}

int cmd_crossover(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  Stages st("crossover", err);
  const auto& grid = cfg.crossover;
  double c_nc = grid.c_nc;
  if (grid.estimate_c_nc) {
    if (!st.run("estimate_mse_constants", [&] {
          const auto fit = estimate_mse_constants(cfg.experiment);
          c_nc = fit.c_nc;
          out << "c_nc estimated as " << format_double(fit.c_nc) << " (se " << format_double(fit.standard_error)
              << ")\n";
        })) {
      return 1;
    }
  }

  std::ostringstream csv;
  csv << kCrossoverCsvHeader << '\n';
  if (!st.run("grid", [&] {
        for (double b : grid.budgets) {
          for (double p : grid.pilots) {
            CrossoverModel model;
            model.budget = b;
            model.pilot_cost = p;
            model.c_coh = grid.c_coh;
            model.c_nc = c_nc;
            model.num_classes = cfg.experiment.num_classes;
            const auto r = crossover_threshold(model);
            csv << format_double(b) << ',' << format_double(p) << ',' << format_double(grid.c_coh) << ','
                << format_double(c_nc) << ',' << format_double(r.mse_coh) << ',' << format_double(r.mse_nc) << ','
                << (r.scene_wins ? 1 : 0) << '\n';
          }
          CrossoverModel model;
          model.budget = b;
          model.c_coh = grid.c_coh;
          model.c_nc = c_nc;
          out << "B=" << format_double(b) << " threshold P*=" << format_double(crossover_threshold(model).p_threshold)
              << "\n";
        }
      })) {
    return 1;
  }
  if (!st.run("output", [&] {
        prepare_out(cfg);
        write_file(fs::path(cfg.out) / "crossover.csv", csv.str());
      })) {
    return 1;
  }
  return 0;
}

int cmd_fd(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  Stages st("fd", err);
  const auto& base = cfg.fd.protocol;
  if (!st.run("config", [&] {
        base.validate();
        if (cfg.fd.rounds == 0) throw Error(ErrorCode::InvalidArgument, "fd.rounds must be >= 1");
        if (cfg.fd.aggregations.empty()) throw Error(ErrorCode::InvalidArgument, "fd.aggregations is empty");
      })) {
    return 1;
  }

  std::ostringstream csv;
  csv << kFdCsvHeader << '\n';
  for (std::size_t r = 0; r < cfg.fd.rounds; ++r) {
    const RandomSource round_rng = RandomSource(cfg.seed).split(r);
    std::optional<fd::FdData> data;
    std::vector<fd::SoftmaxClassifier> clients;
    std::optional<fd::SoftmaxClassifier> server0;
    if (!st.run("pretrain", [&] {
          RandomSource data_rng = round_rng.split(0);
          data = fd::make_fd_data(base, data_rng);
          RandomSource client_rng = round_rng.split(1);
          clients = fd::pretrain_clients(base, *data, client_rng);
          RandomSource init_rng = round_rng.split(2);
          server0 = fd::SoftmaxClassifier::random_init(data->open_set.dim, data->open_set.num_classes, init_rng);
        })) {
      return 1;
    }
    for (auto agg : cfg.fd.aggregations) {
      if (!st.run("distill", [&] {
            auto p = base;
            p.aggregation = agg;
            // Same stream for every aggregation: paired comparison.
            RandomSource distill_rng = round_rng.split(3);
            const auto res = fd::one_shot_distill(p, clients, *server0, *data, distill_rng);
            csv << r << ',' << p.unlabeled_budget << ',' << p.reps << ',' << p.antennas << ','
                << format_double(p.snr_db) << ',' << fd::to_string(agg) << ','
                << format_double(res.metrics.server_accuracy) << ',' << format_double(res.metrics.agg_l2_error)
                << ',' << cfg.seed << '\n';
            out << "round " << r << " " << fd::to_string(agg) << ": server_acc "
                << fixed(res.metrics.server_accuracy, 4) << ", agg_l2_err " << fixed(res.metrics.agg_l2_error, 4)
                << "\n";
          })) {
        return 1;
      }
    }
  }
  if (!st.run("output", [&] {
        prepare_out(cfg);
        write_file(fs::path(cfg.out) / "fd.csv", csv.str());
      })) {
    return 1;
  }
  return 0;
}

}  // namespace scene::cli
