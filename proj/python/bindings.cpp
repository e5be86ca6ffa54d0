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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nanogrid/env.hpp"
#include "nanogrid/errors.hpp"
#include "nanogrid/experiment/config.hpp"
#include "nanogrid/experiment/report.hpp"
#include "nanogrid/experiment/runner.hpp"
#include "nanogrid/market.hpp"
#include "nanogrid/tariff.hpp"

namespace py = pybind11;
using namespace nanogrid;

namespace {

// Python-facing environment: integer action indices in, plain lists out.
class PyEnvironment {
 public:
  PyEnvironment(int clusters, int days, std::uint64_t seed, const std::string& action_space)
      : space_(parse_action_space(action_space)) {
    ScenarioConfig cfg;
    cfg.clusters = clusters;
    cfg.days = days;
    cfg.seed = seed;
    EnvOptions opt;
    opt.action_space = space_;
    env_ = std::make_unique<Environment>(std::make_shared<const Scenario>(cfg), opt);
  }

  std::vector<double> reset(int day, int horizon) {
    EpisodeConfig ec;
    ec.day = day;
    ec.horizon = horizon;
    return env_->reset(ec).flatten();
  }

  py::tuple step(const std::vector<int>& actions) {
    std::vector<TradeAction> a;
    a.reserve(actions.size());
    for (int i : actions) a.push_back(action_from_index(space_, i));
    const StepResult r = env_->step(a);
    return py::make_tuple(r.state.flatten(), r.rewards, r.done);
  }

  std::vector<int> baseline_actions() const {
    std::vector<int> out;
    for (TradeAction a : env_->baseline_actions()) out.push_back(action_index(space_, a));
    return out;
  }

  int clusters() const { return env_->clusters(); }
  int state_size() const { return env_->state_size(); }
  int action_count() const { return nanogrid::action_count(space_); }
  bool done() const { return env_->done(); }
  std::vector<double> episode_cost() const { return env_->episode_cost(); }
  std::vector<double> episode_baseline_cost() const { return env_->episode_baseline_cost(); }

 private:
  ActionSpace space_;
  std::unique_ptr<Environment> env_;
};

py::dict allocate(const std::vector<double>& producers, const std::vector<double>& consumers) {
  std::vector<TradeOrder> p, c;
  int id = 0;
  for (double q : producers) p.push_back({id++, Role::kProducer, q, 0.0});
  for (double q : consumers) c.push_back({id++, Role::kConsumer, q, 0.0});
  const Allocation a = allocate_proportional(p, c);
  py::list trades;
  for (const Trade& t : a.trades) trades.append(py::make_tuple(t.producer, t.consumer, t.kwh));
  py::dict out;
  out["delivered"] = a.delivered;
  out["received"] = a.received;
  out["trades"] = trades;
  out["total_kwh"] = a.total_kwh;
  return out;
}

experiment::ExperimentConfig config_from(const std::optional<std::string>& path,
                                         const std::optional<std::string>& algo,
                                         std::optional<std::uint64_t> seed,
                                         const std::optional<std::string>& out) {
  experiment::Overrides o;
  o.algorithm = algo;
  o.seed = seed;
  if (out) o.output_dir = *out;
  return path ? experiment::load_config(*path, o) : experiment::default_config(o);
}

py::list seed_results(const std::vector<experiment::SeedResult>& results) {
  py::list out;
  for (const auto& s : results) {
    py::dict d;
    d["seed"] = s.seed;
    d["cost_usd"] = s.eval.cost_usd;
    d["baseline_cost_usd"] = s.eval.baseline_cost_usd;
    d["avg_reward"] = s.eval.avg_reward;
    d["train_seconds"] = s.train_seconds;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nanogrid cluster P2P trading simulator and RL trainer";
  m.attr("__version__") = NANOGRID_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);

  m.def("tou_rate", [](double hour, const std::string& preset) {
    const TariffSchedule t(TariffSchedule::bands_for_preset(preset),
                           TariffSchedule::standard_tiers(), CcecComponents{},
                           SmpSeries::synthetic_diurnal(1));
    return t.tou_rate(hour);
  }, py::arg("hour"), py::arg("preset") = "standard",
        "Time-of-use rate in $/kWh at an hour of day; bands are (a, b].");
  m.def("progressive_rate", [](double kwh) {
    return TariffSchedule::standard(SmpSeries::synthetic_diurnal(1)).progressive_rate(kwh);
  }, py::arg("cum_month_kwh"));
  m.def("allocate_proportional", &allocate, py::arg("producers"), py::arg("consumers"),
        "Pro-rata clearing of offer and bid quantities (kWh).");
  m.def("savings_percent", &experiment::savings_percent, py::arg("baseline_cost"),
        py::arg("variant_cost"));

  py::class_<PyEnvironment>(m, "Environment")
      .def(py::init<int, int, std::uint64_t, const std::string&>(), py::arg("clusters") = 10,
           py::arg("days") = 1, py::arg("seed") = 1, py::arg("action_space") = "ut_res")
      .def("reset", &PyEnvironment::reset, py::arg("day") = 0,
           py::arg("horizon") = kIntervalsPerDay)
      .def("step", &PyEnvironment::step, py::arg("actions"),
           "Returns (state, rewards, done).")
      .def("baseline_actions", &PyEnvironment::baseline_actions)
      .def_property_readonly("clusters", &PyEnvironment::clusters)
      .def_property_readonly("state_size", &PyEnvironment::state_size)
      .def_property_readonly("action_count", &PyEnvironment::action_count)
      .def_property_readonly("done", &PyEnvironment::done)
      .def_property_readonly("episode_cost", &PyEnvironment::episode_cost)
      .def_property_readonly("episode_baseline_cost", &PyEnvironment::episode_baseline_cost);

  m.def("config_json", [](std::optional<std::string> path, std::optional<std::string> algo) {
    return experiment::to_json(config_from(path, algo, std::nullopt, std::nullopt));
  }, py::arg("config") = py::none(), py::arg("algo") = py::none());
  m.def("train", [](std::optional<std::string> path, std::optional<std::string> algo,
                    std::optional<std::uint64_t> seed, std::optional<std::string> out) {
    const auto cfg = config_from(path, algo, seed, out);
    py::gil_scoped_release release;
    auto results = experiment::run_train(cfg);
    py::gil_scoped_acquire acquire;
    return seed_results(results);
  }, py::arg("config") = py::none(), py::arg("algo") = py::none(),
        py::arg("seed") = py::none(), py::arg("out") = py::none());
}
