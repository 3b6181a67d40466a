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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "scene/cli.hpp"
#include "scene/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"scenesim: noncoherent over-the-air soft-label aggregation simulator"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  scene::cli::Overrides ov;
  bool print_defaults = false;

  app.add_flag("--print-default-config", print_defaults, "Print the default config as JSON and exit");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", ov.seed, "Master seed");
    sub->add_option("--threads", ov.threads, "Worker threads (0 = all cores)");
    sub->add_option("--out", ov.out, "Output directory");
    sub->add_option("--s", ov.s, "Repetitions S");
    sub->add_option("--m", ov.m, "Receive antennas M");
    sub->add_option("--snr-db", ov.snr_db, "Per-RE SNR in dB");
    sub->add_option("--rho", ov.rho, "Fixed rho (disables the min-rho rule)");
    sub->add_option("--model", ov.model, "Channel model")->check(CLI::IsMember({"superposition", "diagonal"}));
    sub->add_option("--estimator", ov.estimator, "Estimator")->check(CLI::IsMember({"scene", "ratio"}));
  };

  using Cmd = int (*)(const scene::cli::CliConfig&, std::ostream&, std::ostream&);
  struct Entry {
    const char* name;
    const char* help;
    Cmd fn;
  };
  const Entry entries[] = {
      {"round", "Run a single aggregation round and print the estimate", scene::cli::cmd_round},
      {"sweep", "Monte Carlo sweep; writes montecarlo.csv", scene::cli::cmd_sweep},
      {"crossover", "Pilot-tax crossover grid; writes crossover.csv", scene::cli::cmd_crossover},
      {"fd", "Toy one-shot federated distillation; writes fd.csv", scene::cli::cmd_fd},
  };
  for (const auto& e : entries) add_common(app.add_subcommand(e.name, e.help));

  if (argc > 1 && std::string(argv[1]) == "--print-default-config") {
    std::cout << scene::cli::default_config_json() << "\n";
    return 0;
  }
  CLI11_PARSE(app, argc, argv);

  scene::cli::CliConfig cfg;
  try {
    cfg = scene::cli::load_config(config_path, ov);
  } catch (const scene::Error& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 1;
  }
  for (const auto& e : entries) {
    if (app.got_subcommand(e.name)) return e.fn(cfg, std::cout, std::cerr);
  }
  return 1;
}
