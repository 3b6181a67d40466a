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

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scene/analysis.hpp"
#include "scene/channel.hpp"
#include "scene/cli.hpp"
#include "scene/core.hpp"
#include "scene/error.hpp"
#include "scene/estimators.hpp"
#include "scene/montecarlo.hpp"
#include "scene/power.hpp"

namespace py = pybind11;
using namespace scene;

namespace {

std::vector<SoftLabel> to_labels(const std::vector<std::vector<double>>& rows) {
  std::vector<SoftLabel> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(validate_soft_label(r));
  return out;
}

std::string sweep_csv(const std::string& config_json, std::optional<std::uint64_t> seed,
                      std::optional<std::size_t> threads) {
  cli::Overrides ov;
  ov.seed = seed;
  ov.threads = threads;
  const auto cfg = cli::resolve_config(config_json, ov);
  ExperimentResult result;
  {
    py::gil_scoped_release release;
    result = run_experiment(cfg.experiment);
  }
  std::ostringstream csv;
  write_experiment_csv(csv, result.rows);
  return csv.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Noncoherent over-the-air soft-label aggregation";

  static py::exception<Error> scene_error(m, "SceneError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(scene_error, e.what());
    }
  });

  py::enum_<ChannelModel>(m, "ChannelModel")
      .value("Superposition", ChannelModel::Superposition)
      .value("Diagonal", ChannelModel::Diagonal);
  py::enum_<Fading>(m, "Fading").value("Rayleigh", Fading::Rayleigh).value("Frozen", Fading::Frozen);

  py::class_<RandomSource>(m, "RandomSource")
      .def(py::init<std::uint64_t>(), py::arg("seed") = 0)
      .def_property_readonly("seed", &RandomSource::seed)
      .def("split", &RandomSource::split, py::arg("stream"))
      .def("uniform", py::overload_cast<>(&RandomSource::uniform))
      .def("normal", &RandomSource::normal)
      .def("dirichlet", &RandomSource::dirichlet, py::arg("alpha"), py::arg("k"));

  py::class_<DeviceProfile>(m, "DeviceProfile")
      .def(py::init([](double omega, double beta_true, double beta_assumed, double power_cap) {
             return DeviceProfile{omega, beta_true, beta_assumed, power_cap};
           }),
           py::arg("omega"), py::arg("beta_true") = 1.0, py::arg("beta_assumed") = 1.0, py::arg("power_cap") = 1.0)
      .def_readwrite("omega", &DeviceProfile::omega)
      .def_readwrite("beta_true", &DeviceProfile::beta_true)
      .def_readwrite("beta_assumed", &DeviceProfile::beta_assumed)
      .def_readwrite("power_cap", &DeviceProfile::power_cap)
      .def_property_readonly("gamma", &DeviceProfile::gamma);

  py::class_<DevicePopulation>(m, "DevicePopulation")
      .def(py::init<std::vector<DeviceProfile>>(), py::arg("devices"))
      .def("__len__", &DevicePopulation::size)
      .def("__getitem__",
           [](const DevicePopulation& p, std::size_t i) {
             if (i >= p.size()) throw py::index_error();
             return p[i];
           })
      .def("mean_gamma", &DevicePopulation::mean_gamma);

  py::class_<RoundConfig>(m, "RoundConfig")
      .def(py::init<>())
      .def_readwrite("num_classes", &RoundConfig::num_classes)
      .def_readwrite("reps", &RoundConfig::reps)
      .def_readwrite("antennas", &RoundConfig::antennas)
      .def_readwrite("rho", &RoundConfig::rho)
      .def_readwrite("noise_var", &RoundConfig::noise_var)
      .def_readwrite("channel_model", &RoundConfig::channel_model)
      .def_readwrite("time_corr", &RoundConfig::time_corr)
      .def_readwrite("space_corr", &RoundConfig::space_corr)
      .def_readwrite("use_reference_re", &RoundConfig::use_reference_re)
      .def_readwrite("fading", &RoundConfig::fading)
      .def("samples", &RoundConfig::samples)
      .def("validate", &RoundConfig::validate);

  m.def("validate_soft_label", [](std::vector<double> v) { return validate_soft_label(std::move(v)).vec(); });
  m.def(
      "weighted_average",
      [](const std::vector<std::vector<double>>& labels, const DevicePopulation& pop) {
        return weighted_average(to_labels(labels), pop).vec();
      },
      py::arg("labels"), py::arg("population"));

  py::class_<EnergyFrame>(m, "EnergyFrame")
      .def_readonly("num_devices", &EnergyFrame::num_devices)
      .def_readonly("num_classes", &EnergyFrame::num_classes)
      .def_readonly("energies", &EnergyFrame::energies)
      .def_readonly("eta", &EnergyFrame::eta)
      .def_readonly("include_reference", &EnergyFrame::include_reference);
  m.def(
      "map_energies",
      [](const std::vector<std::vector<double>>& labels, const DevicePopulation& pop, double rho, bool ref) {
        return map_energies(to_labels(labels), pop, rho, ref);
      },
      py::arg("labels"), py::arg("population"), py::arg("rho"), py::arg("include_reference") = false);
  m.def("min_rho", &min_rho, py::arg("population"));
  m.def(
      "run_min_rho_protocol",
      [](const DevicePopulation& pop) {
        const auto out = run_min_rho_protocol(pop);
        std::vector<std::pair<std::size_t, double>> uplink;
        for (const auto& r : out.transcript.uplink) uplink.emplace_back(r.device, r.rho_local);
        return py::dict(py::arg("rho_min") = out.rho_min, py::arg("uplink") = uplink,
                        py::arg("broadcast") = out.transcript.broadcast);
      },
      py::arg("population"));

  py::class_<PathlossModel>(m, "PathlossModel")
      .def(py::init<>())
      .def_readwrite("exponent", &PathlossModel::exponent)
      .def_readwrite("d_min", &PathlossModel::d_min)
      .def_readwrite("d_max", &PathlossModel::d_max)
      .def_readwrite("shadowing_std_db", &PathlossModel::shadowing_std_db)
      .def_readwrite("normalize_mean", &PathlossModel::normalize_mean);
  m.def("sample_pathloss", &sample_pathloss, py::arg("model"), py::arg("n"), py::arg("rng"));

  py::class_<ReceivedEnergies>(m, "ReceivedEnergies")
      .def(py::init([](std::vector<double> y, std::optional<double> ref, std::size_t samples) {
             return ReceivedEnergies{std::move(y), ref, samples};
           }),
           py::arg("y"), py::arg("y_ref") = std::nullopt, py::arg("sample_count") = 1)
      .def_readonly("y", &ReceivedEnergies::y)
      .def_readonly("y_ref", &ReceivedEnergies::y_ref)
      .def_readonly("sample_count", &ReceivedEnergies::sample_count);
  m.def("simulate_round", &simulate_round, py::arg("frame"), py::arg("population"), py::arg("config"),
        py::arg("rng"));
  m.def("simulate_round_correlated", &simulate_round_correlated, py::arg("frame"), py::arg("population"),
        py::arg("config"), py::arg("rng"));

  py::class_<AggregateResult>(m, "AggregateResult")
      .def_readonly("raw", &AggregateResult::raw)
      .def_property_readonly("projected", [](const AggregateResult& r) { return r.projected.vec(); })
      .def_readonly("centering_gain", &AggregateResult::centering_gain)
      .def_readonly("used_ratio", &AggregateResult::used_ratio);
  m.def("scene_estimate", &scene_estimate, py::arg("energies"), py::arg("config"));
  m.def("ratio_estimate", &ratio_estimate, py::arg("energies"));
  m.def("project_simplex", [](const std::vector<double>& v) { return project_simplex(v).vec(); });
  m.def(
      "top_t_truncate",
      [](const std::vector<double>& q, std::size_t t) {
        const auto r = top_t_truncate(validate_soft_label(q), t);
        return py::make_tuple(r.truncated.vec(), r.tail_mass);
      },
      py::arg("q"), py::arg("t"));

  m.def(
      "mismatch_bias",
      [](const DevicePopulation& pop, const std::vector<std::vector<double>>& labels) {
        return mismatch_bias(pop, to_labels(labels));
      },
      py::arg("population"), py::arg("labels"));
  m.def("mismatch_bias_bound", &mismatch_bias_bound, py::arg("delta"), py::arg("k"));
  m.def(
      "variance_bound",
      [](const DevicePopulation& pop, const std::vector<std::vector<double>>& labels, const RoundConfig& cfg) {
        return variance_bound(pop, to_labels(labels), cfg);
      },
      py::arg("population"), py::arg("labels"), py::arg("config"));
  m.def("balanced_variance", &balanced_variance, py::arg("energy_variance"), py::arg("k"), py::arg("samples"),
        py::arg("rho"));
  m.def(
      "effective_samples",
      [](std::size_t s, std::size_t mm, const std::vector<double>& t_acf, const std::vector<double>& s_acf) {
        const auto e = effective_samples(s, mm, t_acf, s_acf);
        return py::make_tuple(e.s_eff, e.m_eff);
      },
      py::arg("s"), py::arg("m"), py::arg("time_acf"), py::arg("space_acf"));
  m.def("ar1_acf", &ar1_acf, py::arg("phi"), py::arg("lags"));
  m.def("calibrate_noise", &calibrate_noise, py::arg("rho"), py::arg("k"), py::arg("snr_db"));

  py::class_<CrossoverModel>(m, "CrossoverModel")
      .def(py::init<>())
      .def_readwrite("budget", &CrossoverModel::budget)
      .def_readwrite("pilot_cost", &CrossoverModel::pilot_cost)
      .def_readwrite("c_coh", &CrossoverModel::c_coh)
      .def_readwrite("c_nc", &CrossoverModel::c_nc)
      .def_readwrite("num_classes", &CrossoverModel::num_classes)
      .def_readwrite("antennas", &CrossoverModel::antennas);
  py::class_<CrossoverResult>(m, "CrossoverResult")
      .def_readonly("p_threshold", &CrossoverResult::p_threshold)
      .def_readonly("s_coh", &CrossoverResult::s_coh)
      .def_readonly("s_nc", &CrossoverResult::s_nc)
      .def_readonly("mse_coh", &CrossoverResult::mse_coh)
      .def_readonly("mse_nc", &CrossoverResult::mse_nc)
      .def_readonly("scene_wins", &CrossoverResult::scene_wins);
  m.def("crossover_threshold", &crossover_threshold, py::arg("model"));

  m.def("default_config", &cli::default_config_json);
  m.def("sweep_csv", &sweep_csv, py::arg("config_json") = "{}", py::arg("seed") = std::nullopt,
        py::arg("threads") = std::nullopt,
        "Run the Monte Carlo sweep described by a JSON config and return the CSV text.");
}
