// Copyright 2026 The Nanogrid P2P Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nanogrid/experiment/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nanogrid/errors.hpp"

namespace nanogrid::experiment {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) {
  throw ConfigError("invalid config: " + what);
}

// A JSON object being read. Keys that are never asked for are reported by
// finish() as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(where() + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      invalid(name(key) + " has the wrong type (" + std::string(it->type_name()) + ")");
    }
  }

  template <typename T>
  void get_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    T v{};
    get(key, v);
    out = v;
  }

  void get_path(const char* key, std::optional<std::filesystem::path>& out) {
    std::optional<std::string> s;
    get_optional(key, s);
    if (s) out = *s;
  }

  Section sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    static const json empty = json::object();
    if (it == j_.end() || it->is_null()) return Section(empty, name(key));
    return Section(*it, name(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError("unknown key \"" + name(it.key().c_str()) + "\"");
      }
    }
  }

  std::string name(const char* key) const {
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

 private:
  std::string where() const { return path_.empty() ? "top level" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_scenario(Section s, ExperimentConfig& cfg) {
  ScenarioConfig& sc = cfg.scenario;
  s.get("clusters", sc.clusters);
  s.get("nanogrids_per_cluster", sc.nanogrids_per_cluster);
  s.get("days", sc.days);
  s.get("train_days", cfg.train_days);
  s.get("eval_days", cfg.eval_days);
  s.get("horizon", cfg.horizon);
  s.get("start_day_of_year", sc.start_day_of_year);
  s.get("pv_kw_per_index", sc.pv_kw_per_index);
  s.get("wind_kw_per_index", sc.wind_kw_per_index);
  s.get_path("generation_csv", sc.generation_csv);
  s.get_path("appliance_csv", cfg.appliance_csv);
  s.get("tariff_preset", sc.tariff_preset);
  s.get("occupant_stay", sc.occupant_stay);
  s.get("d_max", sc.d_max);

  Section pv = s.sub("pv");
  pv.get("sunrise_hour", sc.pv.sunrise_hour);
  pv.get("sunset_hour", sc.pv.sunset_hour);
  pv.get("seasonal_swing_hours", sc.pv.seasonal_swing_hours);
  pv.get("cloud_mean", sc.pv.cloud_mean);
  pv.get("cloud_persistence", sc.pv.cloud_persistence);
  pv.get("cloud_sigma", sc.pv.cloud_sigma);
  pv.finish();

  Section wind = s.sub("wind");
  wind.get("weibull_shape", sc.wind.weibull_shape);
  wind.get("weibull_scale", sc.wind.weibull_scale);
  wind.get("cut_in", sc.wind.cut_in);
  wind.get("rated", sc.wind.rated);
  wind.get("cut_out", sc.wind.cut_out);
  wind.get("persistence", sc.wind.persistence);
  wind.finish();

  Section smp = s.sub("smp");
  smp.get("mean", sc.smp_mean);
  smp.get("amplitude", sc.smp_amplitude);
  smp.get("peak_hour", sc.smp_peak_hour);
  smp.get("monthly_average", sc.smp_monthly_average);
  smp.get_path("csv", sc.smp_csv);
  smp.finish();

  Section ccec = s.sub("ccec");
  ccec.get("rps", sc.ccec.rps);
  ccec.get("ets", sc.ccec.ets);
  ccec.get("cgr", sc.ccec.cgr);
  ccec.finish();

  Section pw = s.sub("pw_max");
  std::string rule = "percentile";
  pw.get("rule", rule);
  pw.get("percentile", cfg.env.pw_max_percentile);
  double kw = -1.0;
  pw.get("kw", kw);
  pw.finish();
  if (rule == "fixed") {
    if (kw < 0.0) invalid(pw.name("kw") + " must be given and >= 0 for the fixed rule");
    cfg.pw_max_kw = kw;
  } else if (rule != "percentile") {
    invalid(pw.name("rule") + " must be \"percentile\" or \"fixed\"");
  }

  std::string quantity = to_string(cfg.env.quantity_rule);
  s.get("quantity_rule", quantity);
  cfg.env.quantity_rule = parse_quantity_rule(quantity);
  s.get("literal_action_multiplier", cfg.env.settle.literal_action_multiplier);
  s.get("carry_state", cfg.env.carry_state);

  Section ev = s.sub("ev");
  ev.get("enabled", sc.ev_enabled);
  ev.get("capacity_kwh", sc.ev.capacity_kwh);
  ev.get("initial_soc", sc.ev.soc);
  ev.get("max_charge_kw", sc.ev.max_charge_kw);
  ev.get("max_discharge_kw", sc.ev.max_discharge_kw);
  ev.get("efficiency", sc.ev.efficiency);
  ev.get("available_from_hour", sc.ev.available_from_hour);
  ev.get("available_until_hour", sc.ev.available_until_hour);
  ev.get("soc_min", sc.ev.soc_min);
  ev.get("soc_max", sc.ev.soc_max);
  ev.get("surplus_threshold_kw", cfg.env.ev_policy.surplus_threshold_kw);
  ev.finish();
  s.finish();
}

void read_hyperparams(Section s, agents::Hyperparams& hp) {
  s.get("gamma", hp.gamma);
  s.get("batch", hp.batch);
  s.get("hidden", hp.hidden);
  s.get("gcn_features", hp.gcn_features);
  s.get("grad_clip", hp.grad_clip);
  s.get("epsilon", hp.epsilon);
  s.get("epsilon_decay", hp.epsilon_decay);
  s.get("epsilon_min", hp.epsilon_min);
  s.get("lr", hp.lr);
  s.get("replay_capacity", hp.replay_capacity);
  s.get("target_net", hp.target_net);
  s.get("target_sync", hp.target_sync);
  s.get("train_every", hp.train_every);
  s.get("seq_len", hp.seq_len);
  s.get("burn_in", hp.burn_in);
  s.get("actor_lr", hp.actor_lr);
  s.get("critic_lr", hp.critic_lr);
  s.get("clip", hp.clip);
  s.get("gae_lambda", hp.gae_lambda);
  s.get("update_interval", hp.update_interval);
  s.get("epochs", hp.epochs);
  s.get("normalize_advantages", hp.normalize_advantages);
  s.get("entropy_coef", hp.entropy_coef);
  s.finish();
}

ExperimentConfig from_json_unchecked(const json& root, const Overrides& ov) {
  ExperimentConfig cfg;
  Section top(root, "");
  read_scenario(top.sub("scenario"), cfg);

  Section algo = top.sub("algorithm");
  algo.get("name", cfg.algorithm);
  std::optional<std::string> space;
  algo.get_optional("action_space", space);
  bool gcn = false;
  algo.get("gcn", gcn);
  algo.get("epochs", cfg.epochs);
  if (ov.algorithm) cfg.algorithm = *ov.algorithm;
  if (ov.action_space) space = *ov.action_space;
  gcn = gcn || ov.gcn;
  if (!cfg.is_baseline()) {
    cfg.variant = agents::parse_variant(cfg.algorithm);
    if (space) cfg.variant.space = parse_action_space(*space);
    cfg.variant.gcn = cfg.variant.gcn || gcn;
    cfg.algorithm = cfg.variant.name();
    cfg.hp = agents::Hyperparams::defaults(cfg.variant.algo);
  } else if (space) {
    cfg.env.action_space = parse_action_space(*space);
  }
  // Hyperparameters are read after the defaults for the algorithm are known.
  read_hyperparams(algo.sub("hyperparams"), cfg.hp);
  algo.finish();
  if (!cfg.is_baseline()) cfg.env.action_space = cfg.variant.space;

  std::vector<std::uint64_t> seeds = cfg.seeds;
  top.get("seeds", seeds);
  cfg.seeds = ov.seed ? std::vector<std::uint64_t>{*ov.seed} : seeds;
  std::string out = cfg.output_dir.string();
  top.get("output_dir", out);
  cfg.output_dir = ov.output_dir ? *ov.output_dir : std::filesystem::path(out);
  top.get("workers", cfg.workers);

  Section cmp = top.sub("compare");
  std::vector<std::string> runs;
  cmp.get("runs", runs);
  cmp.finish();
  for (const std::string& r : runs) cfg.compare_runs.emplace_back(r);
  top.finish();

  if (cfg.appliance_csv) {
    if (!std::filesystem::exists(*cfg.appliance_csv)) {
      invalid("scenario.appliance_csv: file not found: " + cfg.appliance_csv->string());
    }
    cfg.scenario.catalog = load_appliance_catalog(*cfg.appliance_csv);
  }
  cfg.env.settle.nanogrids_per_cluster = cfg.scenario.nanogrids_per_cluster;
  cfg.validate();
  return cfg;
}

// Lower-level parsers raise their own ConfigErrors; give them the common
// "invalid config" prefix unless they already carry a specific one.
ExperimentConfig from_json(const json& root, const Overrides& ov) {
  try {
    return from_json_unchecked(root, ov);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const char* prefix : {"unknown key", "unknown algorithm", "invalid config"}) {
      if (msg.rfind(prefix, 0) == 0) throw;
    }
    invalid(msg);
  }
}

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json path_or_null(const std::optional<std::filesystem::path>& p) {
  return p ? json(p->string()) : json(nullptr);
}

json scenario_json(const ExperimentConfig& cfg) {
  const ScenarioConfig& sc = cfg.scenario;
  json pw = cfg.pw_max_kw
                ? json{{"rule", "fixed"}, {"kw", *cfg.pw_max_kw}}
                : json{{"rule", "percentile"}, {"percentile", cfg.env.pw_max_percentile}};
  return json{
      {"clusters", sc.clusters},
      {"nanogrids_per_cluster", sc.nanogrids_per_cluster},
      {"days", sc.days},
      {"train_days", cfg.train_days},
      {"eval_days", cfg.eval_days},
      {"horizon", cfg.horizon},
      {"start_day_of_year", sc.start_day_of_year},
      {"pv_kw_per_index", sc.pv_kw_per_index},
      {"wind_kw_per_index", sc.wind_kw_per_index},
      {"generation_csv", path_or_null(sc.generation_csv)},
      {"appliance_csv", path_or_null(cfg.appliance_csv)},
      {"tariff_preset", sc.tariff_preset},
      {"occupant_stay", sc.occupant_stay},
      {"d_max", sc.d_max},
      {"pv",
       {{"sunrise_hour", sc.pv.sunrise_hour},
        {"sunset_hour", sc.pv.sunset_hour},
        {"seasonal_swing_hours", sc.pv.seasonal_swing_hours},
        {"cloud_mean", sc.pv.cloud_mean},
        {"cloud_persistence", sc.pv.cloud_persistence},
        {"cloud_sigma", sc.pv.cloud_sigma}}},
      {"wind",
       {{"weibull_shape", sc.wind.weibull_shape},
        {"weibull_scale", sc.wind.weibull_scale},
        {"cut_in", sc.wind.cut_in},
        {"rated", sc.wind.rated},
        {"cut_out", sc.wind.cut_out},
        {"persistence", sc.wind.persistence}}},
      {"smp",
       {{"mean", sc.smp_mean},
        {"amplitude", sc.smp_amplitude},
        {"peak_hour", sc.smp_peak_hour},
        {"monthly_average", sc.smp_monthly_average},
        {"csv", path_or_null(sc.smp_csv)}}},
      {"ccec", {{"rps", sc.ccec.rps}, {"ets", sc.ccec.ets}, {"cgr", sc.ccec.cgr}}},
      {"pw_max", pw},
      {"quantity_rule", to_string(cfg.env.quantity_rule)},
      {"literal_action_multiplier", cfg.env.settle.literal_action_multiplier},
      {"carry_state", cfg.env.carry_state},
      {"ev",
       {{"enabled", sc.ev_enabled},
        {"capacity_kwh", sc.ev.capacity_kwh},
        {"initial_soc", sc.ev.soc},
        {"max_charge_kw", sc.ev.max_charge_kw},
        {"max_discharge_kw", sc.ev.max_discharge_kw},
        {"efficiency", sc.ev.efficiency},
        {"available_from_hour", sc.ev.available_from_hour},
        {"available_until_hour", sc.ev.available_until_hour},
        {"soc_min", sc.ev.soc_min},
        {"soc_max", sc.ev.soc_max},
        {"surplus_threshold_kw", cfg.env.ev_policy.surplus_threshold_kw}}},
  };
}

json hyperparams_json(const agents::Hyperparams& hp) {
  return json{{"gamma", hp.gamma},
              {"batch", hp.batch},
              {"hidden", hp.hidden},
              {"gcn_features", hp.gcn_features},
              {"grad_clip", hp.grad_clip},
              {"epsilon", hp.epsilon},
              {"epsilon_decay", hp.epsilon_decay},
              {"epsilon_min", hp.epsilon_min},
              {"lr", hp.lr},
              {"replay_capacity", hp.replay_capacity},
              {"target_net", hp.target_net},
              {"target_sync", hp.target_sync},
              {"train_every", hp.train_every},
              {"seq_len", hp.seq_len},
              {"burn_in", hp.burn_in},
              {"actor_lr", hp.actor_lr},
              {"critic_lr", hp.critic_lr},
              {"clip", hp.clip},
              {"gae_lambda", hp.gae_lambda},
              {"update_interval", hp.update_interval},
              {"epochs", hp.epochs},
              {"normalize_advantages", hp.normalize_advantages},
              {"entropy_coef", hp.entropy_coef}};
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    scenario.validate();
  } catch (const ConfigError& e) {
    invalid(e.what());
  }
  if (train_days < 1) invalid("scenario.train_days must be >= 1");
  if (eval_days < 0) invalid("scenario.eval_days must be >= 0");
  if (train_days + eval_days > scenario.days) {
    invalid("scenario.train_days + eval_days exceeds scenario.days");
  }
  if (horizon < 1 || horizon > kIntervalsPerDay) {
    invalid("scenario.horizon must lie in [1, " + std::to_string(kIntervalsPerDay) + "]");
  }
  if (!(env.pw_max_percentile >= 0.0 && env.pw_max_percentile <= 100.0)) {
    invalid("scenario.pw_max.percentile must lie in [0, 100]");
  }
  for (const auto& p : {scenario.generation_csv, scenario.smp_csv}) {
    if (p && !std::filesystem::exists(*p)) invalid("file not found: " + p->string());
  }
  if (epochs < 0) invalid("algorithm.epochs must be >= 0");
  if (seeds.empty()) invalid("seeds must not be empty");
  if (workers < 0) invalid("workers must be >= 0");
  if (!is_baseline()) {
    try {
      hp.validate();
    } catch (const ConfigError& e) {
      invalid(std::string("algorithm.") + e.what());
    }
  }
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin,
                              const Overrides& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + origin + ": " + e.what());
  }
  return from_json(root, overrides);
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), overrides);
}

ExperimentConfig default_config(const Overrides& overrides) {
  return from_json(json::object(), overrides);
}

std::string to_json(const ExperimentConfig& cfg) {
  json algo = {{"name", cfg.algorithm},
               {"action_space", to_string(cfg.env.action_space)},
               {"gcn", !cfg.is_baseline() && cfg.variant.gcn},
               {"epochs", cfg.epochs}};
  if (!cfg.is_baseline()) algo["hyperparams"] = hyperparams_json(cfg.hp);
  std::vector<std::string> runs;
  for (const auto& r : cfg.compare_runs) runs.push_back(r.string());
  json root = {{"scenario", scenario_json(cfg)},
               {"algorithm", algo},
               {"seeds", cfg.seeds},
               {"output_dir", cfg.output_dir.string()},
               {"workers", cfg.workers},
               {"compare", {{"runs", runs}}}};
  return root.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) { return fnv1a(to_json(cfg)); }

std::string scenario_hash(const ExperimentConfig& cfg) {
  json j = {{"scenario", scenario_json(cfg)}, {"seeds", cfg.seeds}};
  return fnv1a(j.dump());
}

}  // namespace nanogrid::experiment
