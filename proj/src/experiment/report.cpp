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

#include "nanogrid/experiment/report.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "nanogrid/csv.hpp"
#include "nanogrid/errors.hpp"
#include "nanogrid/experiment/svg.hpp"

namespace nanogrid::experiment {
namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kRunFiles = {"manifest.json", "config.json", "evaluation.csv"};
const std::vector<std::string> kCompareFiles = {"compare_cost.csv", "compare_consumption.csv",
                                                "compare_traded.csv", "compare_curve.csv"};

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

bool has_all(const fs::path& dir, const std::vector<std::string>& files) {
  for (const auto& f : files) {
    if (!fs::exists(dir / f)) return false;
  }
  return true;
}

[[noreturn]] void missing_artifacts(const fs::path& dir) {
  throw std::runtime_error("missing run artifacts in " + dir.string() +
                           ": expected a run directory (" + join(kRunFiles) +
                           ") or a compare directory (" + join(kCompareFiles) + ")");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

double cell(const CsvTable& t, std::size_t row, std::size_t col, const std::string& origin) {
  return parse_number(t.rows[row][col], origin);
}

std::vector<std::string> cluster_labels(const std::vector<int>& ids) {
  std::vector<std::string> out;
  for (int id : ids) out.push_back("cluster " + std::to_string(id));
  return out;
}

// Reads a per-cluster table "cluster_id, <series>..." into [series][cluster].
void read_cluster_table(const fs::path& path, std::vector<std::string>& series,
                        std::vector<int>& ids, std::vector<std::vector<double>>& values) {
  const CsvTable t = read_csv(path);
  const std::string origin = path.string();
  series.assign(t.header.begin() + 1, t.header.end());
  ids.clear();
  values.assign(series.size(), {});
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    ids.push_back(static_cast<int>(cell(t, r, 0, origin)));
    for (std::size_t s = 0; s < series.size(); ++s) values[s].push_back(cell(t, r, s + 1, origin));
  }
}

}  // namespace

double savings_percent(double baseline_cost, double variant_cost) {
  if (!std::isfinite(baseline_cost) || !std::isfinite(variant_cost)) {
    throw DomainError("savings_percent: costs must be finite");
  }
  if (baseline_cost == 0.0) throw DomainError("savings_percent: baseline cost is zero");
  return (baseline_cost - variant_cost) / baseline_cost * 100.0;
}

CompareTable make_compare_table(std::vector<int> cluster_ids, std::vector<double> baseline,
                                std::vector<std::string> variants,
                                std::vector<std::vector<double>> cost) {
  const std::size_t K = cluster_ids.size();
  if (baseline.size() != K || cost.size() != variants.size()) {
    throw ContractError("make_compare_table: inconsistent sizes");
  }
  CompareTable t;
  t.cluster_ids = std::move(cluster_ids);
  t.baseline = std::move(baseline);
  t.variants = std::move(variants);
  t.cost = std::move(cost);
  for (const auto& row : t.cost) {
    if (row.size() != K) throw ContractError("make_compare_table: inconsistent sizes");
    std::vector<double> s(K);
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      s[k] = savings_percent(t.baseline[k], row[k]);
      sum += s[k];
    }
    t.saving.push_back(std::move(s));
    t.mean_saving.push_back(K ? sum / static_cast<double>(K) : 0.0);
  }
  return t;
}

void write_compare_table(const fs::path& path, const CompareTable& t) {
  std::vector<std::string> header = {"cluster", "metric", "baseline"};
  header.insert(header.end(), t.variants.begin(), t.variants.end());
  CsvWriter out(path, header);
  for (std::size_t k = 0; k < t.cluster_ids.size(); ++k) {
    const std::string id = std::to_string(t.cluster_ids[k]);
    std::vector<std::string> cost = {id, "cost_usd", format_number(t.baseline[k])};
    std::vector<std::string> saving = {id, "saving_pct", ""};
    for (std::size_t v = 0; v < t.variants.size(); ++v) {
      cost.push_back(format_number(t.cost[v][k]));
      saving.push_back(format_number(t.saving[v][k]));
    }
    out.row(cost);
    out.row(saving);
  }
  std::vector<std::string> mean = {"mean", "saving_pct_arithmetic_mean", ""};
  for (double m : t.mean_saving) mean.push_back(format_number(m));
  out.row(mean);
}

RunSummary load_run(const fs::path& dir) {
  if (!has_all(dir, kRunFiles)) {
    throw std::runtime_error("missing run artifacts in " + dir.string() + ": expected " +
                             join(kRunFiles));
  }
  RunSummary r;
  r.dir = dir;
  r.manifest = read_manifest(dir);
  const ExperimentConfig cfg = parse_config(read_text(dir / "config.json"),
                                            (dir / "config.json").string());
  r.baseline = cfg.is_baseline();
  r.name = r.baseline ? std::string(kBaseline) : cfg.variant.name();

  const fs::path eval_path = dir / "evaluation.csv";
  const CsvTable t = read_csv(eval_path);
  const std::string origin = eval_path.string();
  const std::size_t c_id = t.column("cluster_id");
  const std::vector<std::pair<std::string, std::vector<double>*>> cols = {
      {"cost_usd", &r.cost},
      {"baseline_cost_usd", &r.baseline_cost},
      {"consumption_kwh", &r.consumption},
      {"baseline_consumption_kwh", &r.baseline_consumption},
      {"traded_kwh", &r.traded},
      {"baseline_traded_kwh", &r.baseline_traded}};
  std::map<int, std::vector<double>> sums;
  std::map<int, int> counts;
  for (std::size_t row = 0; row < t.rows.size(); ++row) {
    const int id = static_cast<int>(cell(t, row, c_id, origin));
    auto& s = sums[id];
    s.resize(cols.size(), 0.0);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      s[c] += cell(t, row, t.column(cols[c].first), origin);
    }
    ++counts[id];
  }
  if (sums.empty()) throw std::runtime_error(origin + ": no evaluation rows");
  for (const auto& [id, s] : sums) {
    r.cluster_ids.push_back(id);
    for (std::size_t c = 0; c < cols.size(); ++c) cols[c].second->push_back(s[c] / counts[id]);
  }

  if (!r.baseline) {
    std::vector<double> sum;
    std::vector<int> n;
    for (std::uint64_t seed : r.manifest.seeds) {
      const fs::path p = dir / ("seed_" + std::to_string(seed)) / "training_curve.csv";
      if (!fs::exists(p)) throw std::runtime_error("missing run artifact " + p.string());
      const CsvTable c = read_csv(p);
      const std::size_t ep = c.column("epoch");
      const std::size_t rw = c.column("avg_reward");
      for (std::size_t row = 0; row < c.rows.size(); ++row) {
        const auto e = static_cast<std::size_t>(cell(c, row, ep, p.string()));
        if (e < 1) throw ConfigError(p.string() + ": epoch must be >= 1");
        if (sum.size() < e) {
          sum.resize(e, 0.0);
          n.resize(e, 0);
        }
        sum[e - 1] += cell(c, row, rw, p.string());
        ++n[e - 1];
      }
    }
    for (std::size_t e = 0; e < sum.size(); ++e) r.curve.push_back(n[e] ? sum[e] / n[e] : NAN);
  }
  return r;
}

CompareTable run_compare(const ExperimentConfig& cfg) {
  if (cfg.compare_runs.empty()) {
    throw ConfigError("invalid config: compare needs at least one run in compare.runs");
  }
  const std::string started = utc_now();
  std::vector<RunSummary> runs;
  for (const auto& d : cfg.compare_runs) runs.push_back(load_run(d));
  const RunSummary& first = runs.front();
  std::map<std::string, int> seen;
  for (const RunSummary& r : runs) {
    if (r.manifest.scenario_hash != first.manifest.scenario_hash ||
        r.manifest.seeds != first.manifest.seeds || r.cluster_ids != first.cluster_ids) {
      throw ConfigError("mismatched scenarios: " + r.dir.string() + " and " +
                        first.dir.string() + " were not run on the same scenario and seeds");
    }
    if (seen[r.name]++) throw ConfigError("compare: variant " + r.name + " listed twice");
  }

  std::vector<double> baseline = first.baseline_cost;
  std::vector<double> baseline_consumption = first.baseline_consumption;
  std::vector<double> baseline_traded = first.baseline_traded;
  for (const RunSummary& r : runs) {
    if (r.baseline) {
      baseline = r.cost;
      baseline_consumption = r.consumption;
      baseline_traded = r.traded;
    }
  }
  std::vector<std::string> names;
  std::vector<std::vector<double>> cost;
  for (const RunSummary& r : runs) {
    if (r.baseline) continue;
    names.push_back(r.name);
    cost.push_back(r.cost);
  }
  CompareTable table = make_compare_table(first.cluster_ids, baseline, names, cost);

  const fs::path out = cfg.output_dir;
  fs::create_directories(out);
  write_compare_table(out / "compare_cost.csv", table);

  auto per_cluster = [&](const std::string& file, const std::vector<double>& base,
                         std::vector<double> RunSummary::*field) {
    std::vector<std::string> header = {"cluster_id", kBaseline};
    header.insert(header.end(), names.begin(), names.end());
    CsvWriter w(out / file, header);
    for (std::size_t k = 0; k < first.cluster_ids.size(); ++k) {
      std::vector<std::string> row = {std::to_string(first.cluster_ids[k]),
                                      format_number(base[k])};
      for (const RunSummary& r : runs) {
        if (!r.baseline) row.push_back(format_number((r.*field)[k]));
      }
      w.row(row);
    }
  };
  per_cluster("compare_consumption.csv", baseline_consumption, &RunSummary::consumption);
  per_cluster("compare_traded.csv", baseline_traded, &RunSummary::traded);

  {
    std::vector<std::string> header = {"epoch"};
    header.insert(header.end(), names.begin(), names.end());
    CsvWriter w(out / "compare_curve.csv", header);
    std::size_t epochs = 0;
    for (const RunSummary& r : runs) epochs = std::max(epochs, r.curve.size());
    for (std::size_t e = 0; e < epochs; ++e) {
      std::vector<std::string> row = {std::to_string(e + 1)};
      for (const RunSummary& r : runs) {
        if (r.baseline) continue;
        row.push_back(e < r.curve.size() ? format_number(r.curve[e]) : "");
      }
      w.row(row);
    }
  }

  nlohmann::json summary = {{"runs", nlohmann::json::array()},
                            {"mean_saving_pct", nlohmann::json::object()}};
  for (const RunSummary& r : runs) summary["runs"].push_back(r.dir.string());
  for (std::size_t v = 0; v < names.size(); ++v) {
    summary["mean_saving_pct"][names[v]] = table.mean_saving[v];
  }
  summary["mean_saving_note"] = "arithmetic mean of the per-cluster savings of each variant";
  write_text(out / "compare_summary.json", summary.dump(2) + "\n");

  RunManifest m;
  m.config_hash = config_hash(cfg);
  m.scenario_hash = first.manifest.scenario_hash;
  m.seeds = first.manifest.seeds;
  m.code_version = first.manifest.code_version;
  m.started_utc = started;
  m.files = kCompareFiles;
  m.files.push_back("compare_summary.json");
  m.finished_utc = utc_now();
  write_manifest(out, m);
  return table;
}

std::vector<fs::path> emit_report(const fs::path& dir) {
  if (!fs::is_directory(dir)) missing_artifacts(dir);
  const fs::path out = dir / "report";
  std::vector<fs::path> written;
  auto emit = [&](const std::string& file, const std::string& svg) {
    fs::create_directories(out);
    write_svg(out / file, svg);
    written.push_back(out / file);
  };

  if (has_all(dir, kCompareFiles)) {
    std::vector<std::string> series;
    std::vector<int> ids;
    std::vector<std::vector<double>> values;

    const CsvTable cost = read_csv(dir / "compare_cost.csv");
    const std::string origin = (dir / "compare_cost.csv").string();
    BarChart cost_chart{"Total cluster electricity cost", "cost ($)", {}, {}, {}};
    cost_chart.series.assign(cost.header.begin() + 2, cost.header.end());
    cost_chart.values.assign(cost_chart.series.size(), {});
    const std::size_t metric = cost.column("metric");
    for (std::size_t r = 0; r < cost.rows.size(); ++r) {
      if (cost.rows[r][metric] != "cost_usd") continue;
      cost_chart.groups.push_back("cluster " + cost.rows[r][0]);
      for (std::size_t s = 0; s < cost_chart.series.size(); ++s) {
        cost_chart.values[s].push_back(cell(cost, r, s + 2, origin));
      }
    }
    emit("cost.svg", render_svg(cost_chart));

    read_cluster_table(dir / "compare_consumption.csv", series, ids, values);
    emit("consumption.svg", render_svg(BarChart{"Total cluster power consumption",
                                                "consumption (kWh)", cluster_labels(ids),
                                                series, values}));
    read_cluster_table(dir / "compare_traded.csv", series, ids, values);
    emit("traded.svg", render_svg(BarChart{"Traded power of nanogrid cluster",
                                           "traded (kWh)", cluster_labels(ids), series,
                                           values}));

    const CsvTable curve = read_csv(dir / "compare_curve.csv");
    LineChart lc{"Average reward per training epoch", "epoch", "average reward", {}, {}};
    lc.series.assign(curve.header.begin() + 1, curve.header.end());
    lc.values.assign(lc.series.size(), {});
    for (std::size_t r = 0; r < curve.rows.size(); ++r) {
      for (std::size_t s = 0; s < lc.series.size(); ++s) {
        const std::string& c = curve.rows[r][s + 1];
        lc.values[s].push_back(c.empty() ? NAN : parse_number(c, "compare_curve.csv"));
      }
    }
    if (!lc.series.empty()) emit("reward_curve.svg", render_svg(lc));
    return written;
  }

  if (!has_all(dir, kRunFiles)) missing_artifacts(dir);
  const RunSummary r = load_run(dir);
  const auto groups = cluster_labels(r.cluster_ids);
  if (r.baseline) {
    emit("cost.svg", render_svg(BarChart{"Total cluster electricity cost", "cost ($)", groups,
                                         {r.name}, {r.cost}}));
    emit("consumption.svg",
         render_svg(BarChart{"Total cluster power consumption", "consumption (kWh)", groups,
                             {r.name}, {r.consumption}}));
  } else {
    const std::vector<std::string> series = {kBaseline, r.name};
    emit("cost.svg", render_svg(BarChart{"Total cluster electricity cost", "cost ($)", groups,
                                         series, {r.baseline_cost, r.cost}}));
    emit("consumption.svg",
         render_svg(BarChart{"Total cluster power consumption", "consumption (kWh)", groups,
                             series, {r.baseline_consumption, r.consumption}}));
    emit("traded.svg", render_svg(BarChart{"Traded power of nanogrid cluster", "traded (kWh)",
                                           groups, series, {r.baseline_traded, r.traded}}));
    emit("reward_curve.svg", render_svg(LineChart{"Average reward per training epoch", "epoch",
                                                  "average reward", {r.name}, {r.curve}}));
  }

  fs::create_directories(out);
  CsvWriter w(out / "summary.csv", {"cluster_id", "cost_usd", "baseline_cost_usd",
                                    "saving_pct", "consumption_kwh", "traded_kwh"});
  for (std::size_t k = 0; k < r.cluster_ids.size(); ++k) {
    const double saving = r.baseline_cost[k] != 0.0
                              ? savings_percent(r.baseline_cost[k], r.cost[k])
                              : 0.0;
    w.row(r.cluster_ids[k], r.cost[k], r.baseline_cost[k], saving, r.consumption[k],
          r.traded[k]);
  }
  written.push_back(out / "summary.csv");
  return written;
}

}  // namespace nanogrid::experiment
