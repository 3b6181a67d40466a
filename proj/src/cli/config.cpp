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

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "scene/cli.hpp"
#include "scene/error.hpp"

namespace scene::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::BadConfig, "'" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// ---- enum names ------------------------------------------------------------

template <typename E>
struct Names {
  const char* name;
  E value;
};

constexpr Names<ChannelModel> kModels[] = {{"superposition", ChannelModel::Superposition},
                                           {"diagonal", ChannelModel::Diagonal}};
constexpr Names<EstimatorSel> kEstimators[] = {
    {"scene", EstimatorSel::Scene}, {"ratio", EstimatorSel::Ratio}, {"both", EstimatorSel::Both}};
constexpr Names<RhoRule> kRhoRules[] = {{"min_rho", RhoRule::MinRho}, {"fixed", RhoRule::Fixed}};
constexpr Names<WeightRule> kWeightRules[] = {{"uniform", WeightRule::Uniform},
                                              {"random_sizes", WeightRule::RandomSizes}};
constexpr Names<LabelKind> kLabelKinds[] = {
    {"dirichlet", LabelKind::Dirichlet}, {"fixed", LabelKind::Fixed}, {"vertex", LabelKind::Vertex}};
constexpr Names<fd::StepSchedule> kSchedules[] = {{"constant", fd::StepSchedule::Constant},
                                                  {"inverse_sqrt", fd::StepSchedule::InverseSqrt}};
constexpr Names<fd::Aggregation> kAggregations[] = {
    {"plain", fd::Aggregation::Plain}, {"scene", fd::Aggregation::Scene}, {"ratio", fd::Aggregation::RatioScene}};
constexpr Names<Fading> kFadings[] = {{"rayleigh", Fading::Rayleigh}, {"frozen", Fading::Frozen}};

template <typename E, std::size_t N>
const char* name_of(const Names<E> (&table)[N], E v) {
  for (const auto& entry : table) {
    if (entry.value == v) return entry.name;
  }
  return "?";
}

template <typename E, std::size_t N>
E value_of(const Names<E> (&table)[N], const std::string& s, const std::string& path) {
  for (const auto& entry : table) {
    if (s == entry.name) return entry.value;
  }
  std::string allowed;
  for (const auto& entry : table) allowed += std::string(allowed.empty() ? "" : ", ") + entry.name;
  bad(path, "unknown value \"" + s + "\" (expected one of: " + allowed + ")");
}

// ---- defaults as JSON ------------------------------------------------------

json pathloss_json(const PathlossModel& p) {
  return {{"exponent", p.exponent},
          {"d_min", p.d_min},
          {"d_max", p.d_max},
          {"shadowing_std_db", p.shadowing_std_db},
          {"normalize_mean", p.normalize_mean}};
}

json sgd_json(const fd::SgdConfig& s) {
  return {{"epochs", s.epochs},
          {"batch", s.batch},
          {"learning_rate", s.learning_rate},
          {"momentum", s.momentum},
          {"weight_decay", s.weight_decay},
          {"schedule", name_of(kSchedules, s.schedule)}};
}

json to_json(const CliConfig& cfg) {
  const auto& e = cfg.experiment;
  json pairs = json::array();
  for (const auto& p : e.sm_pairs) pairs.push_back({p.s, p.m});
  json models = json::array();
  for (auto m : e.models) models.push_back(name_of(kModels, m));

  const auto& f = cfg.fd.protocol;
  json aggs = json::array();
  for (auto a : cfg.fd.aggregations) aggs.push_back(name_of(kAggregations, a));

  return {
      {"seed", cfg.seed},
      {"threads", cfg.threads},
      {"out", cfg.out},
      {"experiment",
       {{"num_classes", e.num_classes},
        {"trials", e.trials},
        {"sm_pairs", pairs},
        {"snr_db", e.snr_db},
        {"models", models},
        {"rho_rule", name_of(kRhoRules, e.rho_rule)},
        {"rho", e.rho_fixed},
        {"time_corr", e.time_corr},
        {"space_corr", e.space_corr},
        {"estimator", name_of(kEstimators, e.estimator)},
        {"population",
         {{"num_devices", e.population.num_devices},
          {"pathloss", pathloss_json(e.population.pathloss)},
          {"cap_min", e.population.cap_min},
          {"cap_max", e.population.cap_max},
          {"weights", name_of(kWeightRules, e.population.weights)},
          {"mismatch_delta", e.population.mismatch_delta}}},
        {"labels",
         {{"kind", name_of(kLabelKinds, e.labels.kind)},
          {"alpha_dir", e.labels.alpha_dir},
          {"fixed", e.labels.fixed}}}}},
      {"crossover",
       {{"budgets", cfg.crossover.budgets},
        {"pilots", cfg.crossover.pilots},
        {"c_coh", cfg.crossover.c_coh},
        {"c_nc", cfg.crossover.c_nc},
        {"estimate_c_nc", cfg.crossover.estimate_c_nc}}},
      {"fd",
       {{"rounds", cfg.fd.rounds},
        {"aggregations", aggs},
        {"clients", f.clients},
        {"dataset_size", f.dataset_size},
        {"private_size", f.private_size},
        {"open_size", f.open_size},
        {"test_size", f.test_size},
        {"unlabeled_budget", f.unlabeled_budget},
        {"pretrain", sgd_json(f.pretrain)},
        {"distill", sgd_json(f.distill)},
        {"generator",
         {{"num_classes", f.generator.num_classes},
          {"dim", f.generator.dim},
          {"noise_std", f.generator.noise_std}}},
        {"pathloss", pathloss_json(f.pathloss)},
        {"cap_min", f.cap_min},
        {"cap_max", f.cap_max},
        {"snr_db", f.snr_db},
        {"reps", f.reps},
        {"antennas", f.antennas},
        {"channel_model", name_of(kModels, f.channel_model)},
        {"fading", name_of(kFadings, f.fading)},
        {"fixed_rho", f.fixed_rho},
        {"rho", f.rho},
        {"noise_free", f.noise_free}}},
  };
}

// ---- strict merge ----------------------------------------------------------

void merge_strict(json& dst, const json& src, const std::string& path) {
  if (!src.is_object()) bad(path.empty() ? "<root>" : path, "expected an object");
  for (auto it = src.begin(); it != src.end(); ++it) {
    const auto key = join(path, it.key());
    auto found = dst.find(it.key());
    if (found == dst.end()) bad(key, "unknown key");
    if (found->is_object()) {
      merge_strict(*found, it.value(), key);
    } else {
      *found = it.value();
    }
  }
}

// ---- typed readers ---------------------------------------------------------

const json& at(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) bad(join(path, key), "missing");
  return *it;
}

std::size_t read_size(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) bad(path, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::uint64_t read_u64(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) bad(path, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

double read_double(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  return v.get<double>();
}

bool read_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) bad(path, "expected true or false");
  return v.get<bool>();
}

std::string read_string(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

const json& read_array(const json& v, const std::string& path) {
  if (!v.is_array()) bad(path, "expected an array");
  return v;
}

std::vector<double> read_doubles(const json& v, const std::string& path) {
  std::vector<double> out;
  const auto& arr = read_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(read_double(arr[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

#define FIELD(obj, path, key) at(obj, key, path), join(path, key)

PathlossModel read_pathloss(const json& j, const std::string& p) {
  PathlossModel m;
  m.exponent = read_double(FIELD(j, p, "exponent"));
  m.d_min = read_double(FIELD(j, p, "d_min"));
  m.d_max = read_double(FIELD(j, p, "d_max"));
  m.shadowing_std_db = read_double(FIELD(j, p, "shadowing_std_db"));
  m.normalize_mean = read_bool(FIELD(j, p, "normalize_mean"));
  return m;
}

fd::SgdConfig read_sgd(const json& j, const std::string& p) {
  fd::SgdConfig s;
  s.epochs = read_size(FIELD(j, p, "epochs"));
  s.batch = read_size(FIELD(j, p, "batch"));
  s.learning_rate = read_double(FIELD(j, p, "learning_rate"));
  s.momentum = read_double(FIELD(j, p, "momentum"));
  s.weight_decay = read_double(FIELD(j, p, "weight_decay"));
  s.schedule = value_of(kSchedules, read_string(FIELD(j, p, "schedule")), join(p, "schedule"));
  if (s.batch == 0) bad(join(p, "batch"), "must be at least 1");
  return s;
}

CliConfig from_json(const json& j) {
  CliConfig cfg;
  cfg.seed = read_u64(FIELD(j, "", "seed"));
  cfg.threads = read_size(FIELD(j, "", "threads"));
  cfg.out = read_string(FIELD(j, "", "out"));

  {
    const std::string p = "experiment";
    const auto& x = at(j, p, "");
    auto& e = cfg.experiment;
    e.num_classes = read_size(FIELD(x, p, "num_classes"));
    e.trials = read_size(FIELD(x, p, "trials"));
    e.sm_pairs.clear();
    const auto& pairs = read_array(FIELD(x, p, "sm_pairs"));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto ip = p + ".sm_pairs[" + std::to_string(i) + "]";
      if (!pairs[i].is_array() || pairs[i].size() != 2) bad(ip, "expected [S, M]");
      e.sm_pairs.push_back({read_size(pairs[i][0], ip), read_size(pairs[i][1], ip)});
    }
    e.snr_db = read_doubles(FIELD(x, p, "snr_db"));
    e.models.clear();
    const auto& models = read_array(FIELD(x, p, "models"));
    for (std::size_t i = 0; i < models.size(); ++i) {
      const auto ip = p + ".models[" + std::to_string(i) + "]";
      e.models.push_back(value_of(kModels, read_string(models[i], ip), ip));
    }
    e.rho_rule = value_of(kRhoRules, read_string(FIELD(x, p, "rho_rule")), p + ".rho_rule");
    e.rho_fixed = read_double(FIELD(x, p, "rho"));
    e.time_corr = read_double(FIELD(x, p, "time_corr"));
    e.space_corr = read_double(FIELD(x, p, "space_corr"));
    e.estimator = value_of(kEstimators, read_string(FIELD(x, p, "estimator")), p + ".estimator");

    const std::string pp = p + ".population";
    const auto& pop = at(x, "population", p);
    e.population.num_devices = read_size(FIELD(pop, pp, "num_devices"));
    e.population.pathloss = read_pathloss(FIELD(pop, pp, "pathloss"));
    e.population.cap_min = read_double(FIELD(pop, pp, "cap_min"));
    e.population.cap_max = read_double(FIELD(pop, pp, "cap_max"));
    e.population.weights = value_of(kWeightRules, read_string(FIELD(pop, pp, "weights")), pp + ".weights");
    e.population.mismatch_delta = read_double(FIELD(pop, pp, "mismatch_delta"));

    const std::string lp = p + ".labels";
    const auto& lab = at(x, "labels", p);
    e.labels.kind = value_of(kLabelKinds, read_string(FIELD(lab, lp, "kind")), lp + ".kind");
    e.labels.alpha_dir = read_double(FIELD(lab, lp, "alpha_dir"));
    e.labels.fixed.clear();
    const auto& rows = read_array(FIELD(lab, lp, "fixed"));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      e.labels.fixed.push_back(read_doubles(rows[i], lp + ".fixed[" + std::to_string(i) + "]"));
    }
    e.seed = cfg.seed;
    e.threads = cfg.threads;
  }

  {
    const std::string p = "crossover";
    const auto& x = at(j, p, "");
    auto& c = cfg.crossover;
    c.budgets = read_doubles(FIELD(x, p, "budgets"));
    c.pilots = read_doubles(FIELD(x, p, "pilots"));
    c.c_coh = read_double(FIELD(x, p, "c_coh"));
    c.c_nc = read_double(FIELD(x, p, "c_nc"));
    c.estimate_c_nc = read_bool(FIELD(x, p, "estimate_c_nc"));
  }

  {
    const std::string p = "fd";
    const auto& x = at(j, p, "");
    auto& f = cfg.fd.protocol;
    cfg.fd.rounds = read_size(FIELD(x, p, "rounds"));
    cfg.fd.aggregations.clear();
    const auto& aggs = read_array(FIELD(x, p, "aggregations"));
    for (std::size_t i = 0; i < aggs.size(); ++i) {
      const auto ip = p + ".aggregations[" + std::to_string(i) + "]";
      cfg.fd.aggregations.push_back(value_of(kAggregations, read_string(aggs[i], ip), ip));
    }
    f.clients = read_size(FIELD(x, p, "clients"));
    f.dataset_size = read_size(FIELD(x, p, "dataset_size"));
    f.private_size = read_size(FIELD(x, p, "private_size"));
    f.open_size = read_size(FIELD(x, p, "open_size"));
    f.test_size = read_size(FIELD(x, p, "test_size"));
    f.unlabeled_budget = read_size(FIELD(x, p, "unlabeled_budget"));
    f.pretrain = read_sgd(FIELD(x, p, "pretrain"));
    f.distill = read_sgd(FIELD(x, p, "distill"));
    const std::string gp = p + ".generator";
    const auto& gen = at(x, "generator", p);
    f.generator.num_classes = read_size(FIELD(gen, gp, "num_classes"));
    f.generator.dim = read_size(FIELD(gen, gp, "dim"));
    f.generator.noise_std = read_double(FIELD(gen, gp, "noise_std"));
    f.pathloss = read_pathloss(FIELD(x, p, "pathloss"));
    f.cap_min = read_double(FIELD(x, p, "cap_min"));
    f.cap_max = read_double(FIELD(x, p, "cap_max"));
    f.snr_db = read_double(FIELD(x, p, "snr_db"));
    f.reps = read_size(FIELD(x, p, "reps"));
    f.antennas = read_size(FIELD(x, p, "antennas"));
    f.channel_model = value_of(kModels, read_string(FIELD(x, p, "channel_model")), p + ".channel_model");
    f.fading = value_of(kFadings, read_string(FIELD(x, p, "fading")), p + ".fading");
    f.fixed_rho = read_bool(FIELD(x, p, "fixed_rho"));
    f.rho = read_double(FIELD(x, p, "rho"));
    f.noise_free = read_bool(FIELD(x, p, "noise_free"));
  }
  return cfg;
}

#undef FIELD

void apply_overrides(json& j, const Overrides& o) {
  if (o.seed) j["seed"] = *o.seed;
  if (o.threads) j["threads"] = *o.threads;
  if (o.out) j["out"] = *o.out;

  auto& e = j["experiment"];
  auto& f = j["fd"];
  if (o.s || o.m) {
    const auto& pairs = e["sm_pairs"];
    json first = pairs.is_array() && !pairs.empty() ? pairs[0] : json::array({1, 1});
    const json s = o.s ? json(*o.s) : first[0];
    const json m = o.m ? json(*o.m) : first[1];
    e["sm_pairs"] = json::array({json::array({s, m})});
    if (o.s) f["reps"] = *o.s;
    if (o.m) f["antennas"] = *o.m;
  }
  if (o.snr_db) {
    e["snr_db"] = json::array({*o.snr_db});
    f["snr_db"] = *o.snr_db;
  }
  if (o.rho) {
    e["rho_rule"] = "fixed";
    e["rho"] = *o.rho;
    f["fixed_rho"] = true;
    f["rho"] = *o.rho;
  }
  if (o.model) {
    value_of(kModels, *o.model, "--model");
    e["models"] = json::array({*o.model});
    f["channel_model"] = *o.model;
  }
  if (o.estimator) {
    if (*o.estimator != "scene" && *o.estimator != "ratio") {
      bad("--estimator", "unknown value \"" + *o.estimator + "\" (expected one of: scene, ratio)");
    }
    e["estimator"] = *o.estimator;
    f["aggregations"] = json::array({*o.estimator});
  }
}

}  // namespace

std::string default_config_json() { return to_json(CliConfig{}).dump(2); }

CliConfig resolve_config(const std::string& json_text, const Overrides& overrides) {
  json j = to_json(CliConfig{});
  if (!json_text.empty()) {
    json file;
    try {
      file = json::parse(json_text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::BadConfig, std::string("malformed JSON: ") + e.what());
    }
    merge_strict(j, file, "");
  }
  apply_overrides(j, overrides);
  auto cfg = from_json(j);
  cfg.resolved_json = j.dump(2) + "\n";
  return cfg;
}

CliConfig load_config(const std::optional<std::string>& path, const Overrides& overrides) {
  std::string text;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw Error(ErrorCode::BadConfig, "cannot read config file " + *path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return resolve_config(text, overrides);
}

}  // namespace scene::cli
