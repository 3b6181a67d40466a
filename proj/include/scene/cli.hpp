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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scene/analysis.hpp"
#include "scene/fd.hpp"
#include "scene/montecarlo.hpp"

namespace scene::cli {

struct CrossoverGrid {
  std::vector<double> budgets{100.0};
  std::vector<double> pilots{0.0, 10.0, 20.0, 30.0, 40.0, 50.0};
  double c_coh = 1.0;
  double c_nc = 2.0;
  // Replace c_nc with estimate_mse_constants(experiment) before evaluating.
  bool estimate_c_nc = false;
};

struct FdRun {
  fd::FdProtocolConfig protocol{};
  std::size_t rounds = 1;  // independent repetitions, each with its own data and clients
  std::vector<fd::Aggregation> aggregations{fd::Aggregation::Plain, fd::Aggregation::Scene};
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> out;
  std::optional<std::size_t> s;
  std::optional<std::size_t> m;
  std::optional<double> snr_db;
  std::optional<double> rho;
  std::optional<std::string> model;      // superposition | diagonal
  std::optional<std::string> estimator;  // scene | ratio
};

struct CliConfig {
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  std::string out = "out";
  ExperimentSpec experiment{};
  CrossoverGrid crossover{};
  FdRun fd{};
  std::string resolved_json;  // echo written next to the outputs
};

inline constexpr const char* kResolvedConfigName = "config_resolved.json";

/// Defaults, then the JSON document, then overrides. Unknown keys and type
/// errors throw Error{BadConfig} naming the dotted key path.
CliConfig resolve_config(const std::string& json_text, const Overrides& overrides);
CliConfig load_config(const std::optional<std::string>& path, const Overrides& overrides);

/// The default configuration as pretty-printed JSON.
std::string default_config_json();

// Subcommands. Return the process exit status; diagnostics go to `err`.
int cmd_round(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_crossover(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_fd(const CliConfig& cfg, std::ostream& out, std::ostream& err);

inline constexpr const char* kCrossoverCsvHeader = "B,P,c_coh,c_nc,mse_coh,mse_nc,scene_wins";
inline constexpr const char* kFdCsvHeader = "round,U,S,M,snr_db,aggregation,server_acc,agg_l2_err,seed";

}  // namespace scene::cli
