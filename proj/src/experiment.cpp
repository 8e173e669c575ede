#include "adequacy/experiment.hpp"

#include "adequacy/composite.hpp"
#include "adequacy/format.hpp"
#include "adequacy/network.hpp"
#include "adequacy/sampling.hpp"
#include "adequacy/storage.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <set>

#ifndef ADEQUACY_VERSION
#define ADEQUACY_VERSION "unknown"
#endif
#ifndef ADEQUACY_DEFAULT_DATA_DIR
#define ADEQUACY_DEFAULT_DATA_DIR "data"
#endif

namespace adequacy {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Study s) noexcept {
  return s == Study::composite ? "composite" : "storage";
}

std::string_view to_string(EstimatorKind e) noexcept {
  switch (e) {
    case EstimatorKind::mc: return "MC";
    case EstimatorKind::mlmc: return "MLMC";
    case EstimatorKind::mlmc_expectation: return "MLMC-with-expectation";
  }
  return "unknown";
}

fs::path resolve_data_dir(const std::optional<fs::path>& explicit_dir) {
  if (explicit_dir) return *explicit_dir;
  if (const char* env = std::getenv("ADEQUACY_DATA_DIR"); env && *env) return fs::path(env);
  return fs::path(ADEQUACY_DEFAULT_DATA_DIR);
}

namespace {

// Fidelity rank of each model within its study; level-0 candidates share rank 0.
int model_rank(Study study, const std::string& id) {
  if (study == Study::composite) return id == "hl1" ? 0 : 1;
  if (id == "no_storage" || id == "average") return 0;
  return id == "greedy" ? 1 : 2;
}

bool has_closed_form(const std::string& id) {
  return id == "hl1" || id == "no_storage" || id == "average";
}

StorageModel storage_model(const std::string& id) {
  if (id == "no_storage") return StorageModel::no_storage;
  if (id == "average") return StorageModel::average;
  if (id == "greedy") return StorageModel::greedy;
  return StorageModel::optimal;
}

template <class T>
T get_field(const json& obj, const char* key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + path + key + "' has the wrong type");
  }
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  if (!obj.is_object()) throw ConfigError("config field '" + path + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown config field '" + path + key + "'");
  }
}

fs::path data_path(const json& obj, const char* key, const std::string& path, const fs::path& data_dir) {
  if (!obj.contains(key)) throw ConfigError("config field '" + path + key + "' is required");
  const fs::path p(get_field<std::string>(obj, key, path, ""));
  return p.is_absolute() ? p : data_dir / p;
}

json nan_to_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

std::string hex64(std::uint64_t v) {
  return fmt::format("{:016x}", v);
}

}  // namespace

std::string canonical_model(Study study, const std::string& id) {
  static const std::map<std::string, std::string> composite{
      {"hl1", "hl1"}, {"M0", "hl1"}, {"hl2", "hl2"}, {"M1", "hl2"}};
  static const std::map<std::string, std::string> storage{
      {"no_storage", "no_storage"}, {"M0'", "no_storage"}, {"M0prime", "no_storage"},
      {"average", "average"},       {"M0", "average"},     {"greedy", "greedy"},
      {"M1", "greedy"},             {"optimal", "optimal"}, {"M2", "optimal"}};
  const auto& table = study == Study::composite ? composite : storage;
  const auto it = table.find(id);
  if (it == table.end()) {
    throw ConfigError("config field 'models': unknown model '" + id + "' for the " + std::string(to_string(study)) +
                      " study");
  }
  return it->second;
}

ExperimentConfig parse_config(const json& j, const fs::path& data_dir) {
  reject_unknown(j, {"schema_version", "study", "models", "estimator", "n0", "runs", "t_star", "seed", "alpha",
                     "target_measure", "workers", "composite", "storage", "cost_model", "output", "description"},
                 "");
  ExperimentConfig c;
  c.source = j;
  if (get_field<int>(j, "schema_version", "", 0) != 1) {
    throw ConfigError("config field 'schema_version' must be 1");
  }
  const auto study = get_field<std::string>(j, "study", "", "");
  if (study == "composite") {
    c.study = Study::composite;
  } else if (study == "storage") {
    c.study = Study::storage;
  } else {
    throw ConfigError("config field 'study' must be 'composite' or 'storage'");
  }

  const auto models = get_field<std::vector<std::string>>(j, "models", "", {});
  if (models.empty()) throw ConfigError("config field 'models' must list at least one model");
  for (const auto& m : models) c.models.push_back(canonical_model(c.study, m));
  for (std::size_t i = 1; i < c.models.size(); ++i) {
    if (model_rank(c.study, c.models[i]) <= model_rank(c.study, c.models[i - 1])) {
      throw ConfigError("config field 'models' must be ordered from coarsest to finest, without repeats");
    }
  }

  const auto est = get_field<std::string>(j, "estimator", "", "");
  if (est == "MC") {
    c.estimator = EstimatorKind::mc;
    if (c.models.size() != 1) throw ConfigError("config field 'models': MC uses exactly one model");
  } else if (est == "MLMC") {
    c.estimator = EstimatorKind::mlmc;
    if (c.models.size() < 2) throw ConfigError("config field 'models': MLMC needs at least two models");
  } else if (est == "MLMC-with-expectation") {
    c.estimator = EstimatorKind::mlmc_expectation;
    if (c.models.size() < 2) throw ConfigError("config field 'models': MLMC needs at least two models");
    if (!has_closed_form(c.models.front())) {
      throw ConfigError("config field 'models': level 0 model '" + c.models.front() +
                        "' has no closed-form expectation");
    }
  } else {
    throw ConfigError("config field 'estimator' must be MC, MLMC or MLMC-with-expectation");
  }

  c.n0 = get_field<std::size_t>(j, "n0", "", c.n0);
  c.runs = get_field<std::size_t>(j, "runs", "", c.runs);
  c.t_star = get_field<double>(j, "t_star", "", c.t_star);
  c.seed = get_field<std::uint64_t>(j, "seed", "", c.seed);
  c.alpha = get_field<double>(j, "alpha", "", c.alpha);
  c.workers = get_field<std::size_t>(j, "workers", "", c.workers);
  if (c.n0 < 2) throw ConfigError("config field 'n0' must be at least 2");
  if (!(c.t_star > 0.0)) throw ConfigError("config field 't_star' must be positive");
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw ConfigError("config field 'alpha' must lie in (0, 1]");
  if (c.workers == 0) throw ConfigError("config field 'workers' must be at least 1");

  const std::vector<std::string> measures = c.study == Study::composite ? std::vector<std::string>{"PLC", "EPNS"}
                                                                        : std::vector<std::string>{"LOLE", "EENS"};
  c.target_measure = get_field<std::string>(j, "target_measure", "", measures[1]);
  if (std::find(measures.begin(), measures.end(), c.target_measure) == measures.end()) {
    throw ConfigError("config field 'target_measure' must be " + measures[0] + " or " + measures[1]);
  }

  if (c.study == Study::composite) {
    if (!j.contains("composite")) throw ConfigError("config field 'composite' is required for the composite study");
    const json& s = j.at("composite");
    reject_unknown(s, {"network", "rating_scale", "copt_step_mw", "lp_shortcut"}, "composite.");
    c.network = data_path(s, "network", "composite.", data_dir);
    c.rating_scale = get_field<double>(s, "rating_scale", "composite.", 1.0);
    c.copt_step_mw = get_field<double>(s, "copt_step_mw", "composite.", 1.0);
    c.lp_shortcut = get_field<bool>(s, "lp_shortcut", "composite.", true);
    if (!(c.rating_scale > 0.0)) throw ConfigError("config field 'composite.rating_scale' must be positive");
    if (!(c.copt_step_mw > 0.0)) throw ConfigError("config field 'composite.copt_step_mw' must be positive");
  } else {
    if (!j.contains("storage")) throw ConfigError("config field 'storage' is required for the storage study");
    const json& s = j.at("storage");
    reject_unknown(s, {"demand", "wind", "portfolio", "fleet"}, "storage.");
    c.demand = data_path(s, "demand", "storage.", data_dir);
    c.wind = data_path(s, "wind", "storage.", data_dir);
    c.portfolio = data_path(s, "portfolio", "storage.", data_dir);
    c.fleet = data_path(s, "fleet", "storage.", data_dir);
  }

  if (j.contains("cost_model")) {
    const json& s = j.at("cost_model");
    reject_unknown(s, {"mode", "tau", "analytic_seconds"}, "cost_model.");
    const auto mode = get_field<std::string>(s, "mode", "cost_model.", "measured");
    if (mode == "measured") {
      c.cost_model = CostModel::measured;
    } else if (mode == "nominal") {
      c.cost_model = CostModel::nominal;
      c.nominal_tau = get_field<std::vector<double>>(s, "tau", "cost_model.", {});
      c.nominal_analytic_seconds = get_field<double>(s, "analytic_seconds", "cost_model.", 0.0);
      const std::size_t sampled = c.models.size() - (c.estimator == EstimatorKind::mlmc_expectation ? 1 : 0);
      if (c.nominal_tau.size() != sampled) {
        throw ConfigError("config field 'cost_model.tau' needs one cost per sampled level (" +
                          std::to_string(sampled) + ")");
      }
      for (double t : c.nominal_tau) {
        if (!(t > 0.0)) throw ConfigError("config field 'cost_model.tau' entries must be positive");
      }
    } else {
      throw ConfigError("config field 'cost_model.mode' must be 'measured' or 'nominal'");
    }
  }

  std::string default_label = std::string(to_string(c.study)) + "-" + std::string(to_string(c.estimator));
  if (j.contains("output")) {
    const json& s = j.at("output");
    reject_unknown(s, {"directory", "label"}, "output.");
    c.label = get_field<std::string>(s, "label", "output.", default_label);
    c.output_directory = get_field<std::string>(s, "directory", "output.", "results/" + c.label);
  } else {
    c.label = default_label;
    c.output_directory = "results/" + c.label;
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path, const fs::path& data_dir) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, data_dir);
}

PreparedExperiment prepare_experiment(const ExperimentConfig& c) {
  PreparedExperiment prep;
  ModelStack& stack = prep.stack;
  stack.models = c.models;
  const bool analytic = c.estimator == EstimatorKind::mlmc_expectation;
  const std::size_t first = analytic ? 1 : 0;
  stack.pairing = c.models.size() == 1 ? Pairing::single
                                       : (c.study == Study::composite ? Pairing::pattern1 : Pairing::pattern2);
  auto tau_for = [&](std::size_t l) {
    return c.cost_model == CostModel::nominal ? c.nominal_tau.at(l - first) : 0.0;
  };
  auto record_file = [&](const fs::path& p) {
    prep.data_files.emplace_back(p.filename().string(), file_fingerprint(p));
  };

  if (c.study == Study::composite) {
    stack.measures = register_measures({"PLC", "EPNS"});
    Network net = load_network(c.network);
    net.rating_scale = c.rating_scale;
    record_file(c.network);
    auto sys = std::make_shared<const CompositeSystem>(std::move(net), c.lp_shortcut);

    for (std::size_t l = first; l < c.models.size(); ++l) {
      StackLevel level;
      level.nominal_tau = tau_for(l);
      const std::string upper = c.models[l];
      if (l == 0) {
        level.label = upper;
        if (upper == "hl1") {
          level.evaluate = [sys](RngStream& rng, std::span<double> up, std::span<double>) {
            const SystemStateHL1 s = sample_hl1_state(sys->network(), rng);
            const auto x = measure_outputs(sys->evaluate_hl1(s));
            up[0] = x[0];
            up[1] = x[1];
          };
        } else {
          level.evaluate = [sys](RngStream& rng, std::span<double> up, std::span<double>) {
            thread_local SystemStateHL2 s;
            sample_hl2_state(sys->network(), rng, s);
            const auto x = measure_outputs(sys->evaluate_hl2(s));
            up[0] = x[0];
            up[1] = x[1];
          };
        }
      } else {
        level.label = upper + "-" + c.models[l - 1];
        level.evaluate = [sys](RngStream& rng, std::span<double> up, std::span<double> lo) {
          thread_local SystemStateHL2 s;
          sample_hl2_state(sys->network(), rng, s);
          const auto x2 = measure_outputs(sys->evaluate_hl2(s));
          const auto x1 = measure_outputs(CurtailmentResult{
              hl1_curtailment(sys->network(), s.nodal_demand, s.gen_status), {}, solvers::LpStatus::optimal});
          up[0] = x2[0];
          up[1] = x2[1];
          lo[0] = x1[0];
          lo[1] = x1[1];
        };
      }
      stack.levels.push_back(std::move(level));
    }
    if (analytic) {
      const auto t0 = std::chrono::steady_clock::now();
      const SnapshotRisk r = copt_convolve(sys->network(), c.copt_step_mw);
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      stack.analytic_level0 = std::vector<double>{r.plc, r.epns};
      stack.analytic_seconds = c.cost_model == CostModel::nominal ? c.nominal_analytic_seconds : dt;
    }
  } else {
    stack.measures = register_measures({"LOLE", "EENS"});
    StorageSystem data;
    data.demand = load_trace_library(c.demand);
    data.wind = load_trace_library(c.wind);
    data.portfolio = load_portfolio(c.portfolio);
    data.fleet = load_fleet(c.fleet);
    for (const auto& p : {c.demand, c.wind, c.portfolio, c.fleet}) record_file(p);

    const auto t0 = std::chrono::steady_clock::now();
    auto study = std::make_shared<const StorageStudy>(std::move(data));
    double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (std::size_t l = first; l < c.models.size(); ++l) {
      StackLevel level;
      level.nominal_tau = tau_for(l);
      const StorageModel upper = storage_model(c.models[l]);
      if (l == 0) {
        level.label = c.models[l];
        level.evaluate = [study, upper](RngStream& rng, std::span<double> up, std::span<double>) {
          thread_local YearState y;
          sample_year_state(study->system(), rng, y);
          const AnnualRisk r = study->evaluate(upper, y);
          up[0] = r.lole;
          up[1] = r.eens;
        };
      } else {
        const StorageModel lower = storage_model(c.models[l - 1]);
        level.label = c.models[l] + "-" + c.models[l - 1];
        level.evaluate = [study, upper, lower](RngStream& rng, std::span<double> up, std::span<double> lo) {
          thread_local YearState y;
          sample_year_state(study->system(), rng, y);
          const auto [ru, rl] = study->evaluate_pair(upper, lower, y);
          up[0] = ru.lole;
          up[1] = ru.eens;
          lo[0] = rl.lole;
          lo[1] = rl.eens;
        };
      }
      stack.levels.push_back(std::move(level));
    }
    if (analytic) {
      const auto t1 = std::chrono::steady_clock::now();
      const AnnualRisk r = study->level0_expectation(storage_model(c.models[0]));
      setup += std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
      stack.analytic_level0 = std::vector<double>{r.lole, r.eens};
      stack.analytic_seconds = c.cost_model == CostModel::nominal ? c.nominal_analytic_seconds : setup;
    }
  }
  return prep;
}

json results_json(const ExperimentConfig& c, const PreparedExperiment& prep, const ControllerResult& r) {
  json out;
  out["schema_version"] = 1;
  out["label"] = c.label;
  out["code_version"] = ADEQUACY_VERSION;
  json echo = c.source;
  echo["seed"] = c.seed;
  echo["workers"] = c.workers;
  out["config"] = echo;
  json files = json::array();
  for (const auto& [name, fp] : prep.data_files) files.push_back({{"file", name}, {"fnv1a64", hex64(fp)}});
  out["data_files"] = files;
  out["study"] = to_string(c.study);
  out["estimator"] = to_string(c.estimator);
  out["models"] = c.models;
  out["pairing"] = to_string(prep.stack.pairing);
  out["cost_model"] = c.cost_model == CostModel::nominal ? "nominal" : "measured";
  out["target_measure"] = c.target_measure;
  out["elapsed_seconds"] = r.elapsed;

  const auto& ids = prep.stack.measures.ids();
  json measures = json::array();
  for (std::size_t m = 0; m < ids.size(); ++m) {
    const RiskEstimate& e = r.estimates[m];
    json jm;
    jm["id"] = ids[m];
    jm["estimate"] = e.q_hat;
    jm["variance"] = e.var_q_hat ? json(*e.var_q_hat) : json(nullptr);
    jm["std_error"] = e.var_q_hat ? json(std::sqrt(*e.var_q_hat)) : json(nullptr);
    jm["n_total"] = e.n_total;
    try {
      jm["speed"] = speed_metric(e);
    } catch (const EstimateError&) {
      jm["speed"] = nullptr;
    }
    jm["formatted"] = e.var_q_hat ? json(estimate_format(e.q_hat, std::sqrt(*e.var_q_hat))) : json(nullptr);
    measures.push_back(jm);
  }
  out["measures"] = measures;

  if (r.analytic_level0) {
    json a;
    a["model"] = c.models.front();
    a["seconds"] = prep.stack.analytic_seconds;
    json values;
    for (std::size_t m = 0; m < ids.size(); ++m) values[ids[m]] = (*r.analytic_level0)[m];
    a["values"] = values;
    out["analytic_level0"] = a;
  } else {
    out["analytic_level0"] = nullptr;
  }

  json levels = json::array();
  for (std::size_t l = 0; l < prep.stack.levels.size(); ++l) {
    json jl;
    const LevelStats& s0 = r.levels[0][l];
    jl["level"] = s0.level;
    jl["label"] = prep.stack.levels[l].label;
    jl["n"] = s0.n;
    jl["tau_seconds"] = s0.tau;
    jl["seconds"] = r.level_seconds[l];
    json per;
    for (std::size_t m = 0; m < ids.size(); ++m) {
      const LevelStats& s = r.levels[m][l];
      per[ids[m]] = {{"mean_y", s.mean_y},
                     {"var_y", nan_to_null(s.var_y)},
                     {"mean_x_upper", s.mean_x_upper},
                     {"mean_x_lower", s.mean_x_lower},
                     {"var_x_upper", nan_to_null(s.var_x_upper)},
                     {"var_x_lower", nan_to_null(s.var_x_lower)},
                     {"cov_pair", nan_to_null(s.cov_pair)}};
    }
    jl["measures"] = per;
    levels.push_back(jl);
  }
  out["levels"] = levels;

  json runs = json::array();
  for (const auto& rep : r.runs) {
    runs.push_back({{"run", rep.run},
                    {"budget_seconds", rep.budget},
                    {"counts", rep.counts},
                    {"over_budget", rep.over_budget},
                    {"equal_split", rep.equal_split},
                    {"elapsed_seconds", rep.elapsed}});
  }
  out["runs"] = runs;
  return out;
}

ResultsRecord run_experiment(const ExperimentConfig& c, const ControllerOptions* overrides) {
  const auto t0 = std::chrono::steady_clock::now();
  const PreparedExperiment prep = prepare_experiment(c);
  ControllerOptions opt;
  if (overrides) opt = *overrides;
  opt.n0 = c.n0;
  opt.runs = c.runs;
  opt.t_star = c.t_star;
  opt.seed = c.seed;
  opt.alpha = c.alpha;
  opt.target_measure = c.target_measure;
  opt.workers = c.workers;
  opt.cost_model = c.cost_model;
  ResultsRecord rec;
  rec.result = run_controller(prep.stack, opt);
  rec.json = results_json(c, prep, rec.result);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::vector<std::string> check_results(const json& res) {
  std::vector<std::string> problems;
  try {
    const bool analytic = !res.at("analytic_level0").is_null();
    for (const auto& m : res.at("measures")) {
      const std::string id = m.at("id").get<std::string>();
      double sum = analytic ? res["analytic_level0"]["values"].at(id).get<double>() : 0.0;
      for (const auto& l : res.at("levels")) sum += l.at("measures").at(id).at("mean_y").get<double>();
      const double est = m.at("estimate").get<double>();
      if (std::abs(sum - est) > 1e-12 * std::max(1.0, std::abs(est))) {
        problems.push_back(fmt::format("{}: level breakdown sums to {} but the estimate is {}", id, sum, est));
      }
      if (!res.at("levels").empty() && m.at("std_error").is_null()) {
        problems.push_back(id + ": sampled estimate has no standard error");
      }
    }
  } catch (const json::exception& e) {
    problems.push_back(std::string("malformed results: ") + e.what());
  }
  return problems;
}

namespace {

std::vector<std::string> measure_ids(const json& rec) {
  std::vector<std::string> ids;
  for (const auto& m : rec.at("measures")) ids.push_back(m.at("id").get<std::string>());
  return ids;
}

std::optional<double> opt_number(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

std::optional<double> rating_of(const json& rec) {
  const json& cfg = rec.at("config");
  if (cfg.contains("composite") && cfg["composite"].contains("rating_scale")) {
    return cfg["composite"]["rating_scale"].get<double>();
  }
  if (rec.at("study") == "composite") return 1.0;
  return std::nullopt;
}

}  // namespace

ComparisonTable compare_runs(const std::vector<json>& records, std::size_t baseline) {
  if (records.empty()) throw ConfigError("compare: no records given");
  if (baseline >= records.size()) throw ConfigError("compare: baseline index out of range");
  ComparisonTable table;
  table.measures = measure_ids(records[baseline]);
  table.baseline = baseline;
  for (const auto& rec : records) {
    if (measure_ids(rec) != table.measures) {
      throw ConfigError("compare: record '" + rec.value("label", std::string("?")) +
                        "' does not report the same measures as the baseline");
    }
  }
  for (const auto& rec : records) {
    ComparisonRow row;
    row.label = rec.value("label", std::string());
    row.estimator = rec.at("estimator").get<std::string>();
    row.models = rec.at("models").get<std::vector<std::string>>();
    row.elapsed = rec.at("elapsed_seconds").get<double>();
    row.rating_scale = rating_of(rec);
    for (const auto& m : rec.at("measures")) {
      row.estimate.push_back(m.at("estimate").get<double>());
      row.std_error.push_back(opt_number(m.at("std_error")));
      row.speed.push_back(opt_number(m.at("speed")));
    }
    table.rows.push_back(std::move(row));
  }
  const ComparisonRow& base = table.rows[baseline];
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto& row = table.rows[i];
    row.speedup.assign(table.measures.size(), std::nullopt);
    if (i == baseline) continue;
    for (std::size_t m = 0; m < table.measures.size(); ++m) {
      if (row.speed[m] && base.speed[m] && *base.speed[m] > 0.0) row.speedup[m] = *row.speed[m] / *base.speed[m];
    }
  }
  return table;
}

std::vector<SweepRow> rating_sweep(const std::vector<json>& records, std::vector<std::string>& measures) {
  if (records.empty()) throw ConfigError("sweep: no records given");
  measures = measure_ids(records.front());
  std::map<double, std::pair<const json*, const json*>> groups;  // rating -> (MC, multilevel)
  for (const auto& rec : records) {
    if (measure_ids(rec) != measures) throw ConfigError("sweep: records report different measures");
    const auto rating = rating_of(rec);
    if (!rating) throw ConfigError("sweep: record '" + rec.value("label", std::string("?")) + "' has no rating scale");
    auto& g = groups[*rating];
    if (rec.at("estimator") == "MC") {
      if (!g.first) g.first = &rec;
    } else if (!g.second) {
      g.second = &rec;
    }
  }
  std::vector<SweepRow> rows;
  for (const auto& [rating, pair] : groups) {
    SweepRow row;
    row.rating_scale = rating;
    for (std::size_t m = 0; m < measures.size(); ++m) {
      std::optional<double> zmc, zml;
      if (pair.first) zmc = opt_number(pair.first->at("measures")[m].at("speed"));
      if (pair.second) zml = opt_number(pair.second->at("measures")[m].at("speed"));
      row.z_mc.push_back(zmc);
      row.z_ml.push_back(zml);
      row.speedup.push_back(zmc && zml && *zmc > 0.0 ? std::optional<double>(*zml / *zmc) : std::nullopt);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace adequacy
