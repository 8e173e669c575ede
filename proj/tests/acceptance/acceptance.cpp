// Acceptance checks, one PASS/FAIL line per criterion. Budgets are reduced
// by default; ADEQUACY_ACCEPTANCE_FULL=1 runs the configured budgets.

#include "adequacy/composite.hpp"
#include "adequacy/copt.hpp"
#include "adequacy/estimator.hpp"
#include "adequacy/experiment.hpp"
#include "adequacy/format.hpp"
#include "adequacy/report.hpp"
#include "adequacy/solvers/lp.hpp"
#include "adequacy/solvers/qp.hpp"
#include "adequacy/storage.hpp"
#include "oracles/admm_qp.hpp"
#include "oracles/allocation_grid.hpp"
#include "oracles/enumeration.hpp"
#include "oracles/lp_vertex.hpp"
#include "unit/lp_instances.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

using namespace adequacy;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = ADEQUACY_TEST_DATA_DIR;
const fs::path kExperiments = ADEQUACY_EXPERIMENTS_DIR;

bool full_mode() {
  const char* v = std::getenv("ADEQUACY_ACCEPTANCE_FULL");
  return v && std::string(v) == "1";
}

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  fmt::print("{} {}: {}\n", pass ? "PASS" : "FAIL", id, detail);
  std::fflush(stdout);
  if (!pass) ++failures;
}

json experiment(const std::string& name) {
  std::ifstream in(kExperiments / name);
  return json::parse(in);
}

ResultsRecord run(json cfg, std::optional<double> t_star, std::optional<std::size_t> runs) {
  if (t_star) cfg["t_star"] = *t_star;
  if (runs) cfg["runs"] = *runs;
  return run_experiment(parse_config(cfg, kData));
}

struct Measure {
  double q = 0.0;
  double se = 0.0;
  double z = 0.0;
};

Measure measure(const json& res, const std::string& id) {
  for (const auto& m : res.at("measures")) {
    if (m.at("id") == id) {
      return {m.at("estimate").get<double>(), m.at("std_error").is_null() ? 0.0 : m["std_error"].get<double>(),
              m.at("speed").is_null() ? 0.0 : m["speed"].get<double>()};
    }
  }
  throw std::runtime_error("measure " + id + " not in results");
}

StorageSystem storage_system() {
  StorageSystem sys;
  sys.demand = load_trace_library(kData / "storage" / "demand_years.csv");
  sys.wind = load_trace_library(kData / "storage" / "wind_years.csv");
  sys.portfolio = load_portfolio(kData / "storage" / "conventional_portfolio.csv");
  sys.fleet = load_fleet(kData / "storage" / "storage_fleet.csv");
  return sys;
}

// Reference values with their standard errors.
struct Reference {
  double value;
  double se;
};

void composite_reference_values() {
  const bool full = full_mode();
  const std::optional<double> t = full ? std::nullopt : std::optional<double>(4.0);
  const std::optional<std::size_t> r = full ? std::nullopt : std::optional<std::size_t>(4);
  struct Case {
    const char* config;
    const char* name;
    Reference plc;
    Reference epns;
  };
  const Case cases[] = {
      {"composite_mc_r08.json", "MC", {1.71e-3, 0.13e-3}, {0.238, 0.024}},
      {"composite_mlmc_exp_r08.json", "MLMC-with-expectation", {1.48e-3, 0.06e-3}, {0.186, 0.005}},
  };
  for (const auto& c : cases) {
    const auto t0 = Clock::now();
    const auto rec = run(experiment(c.config), t, r);
    const double secs = since(t0);
    bool ok = secs <= 900.0;
    std::string detail = fmt::format("{} at rating 0.8 in {:.1f} s (limit 900 s);", c.name, secs);
    for (const auto& [id, ref] : {std::pair{"PLC", c.plc}, std::pair{"EPNS", c.epns}}) {
      const auto m = measure(rec.json, id);
      const double combined = std::sqrt(ref.se * ref.se + m.se * m.se);
      const double dev = std::abs(m.q - ref.value) / combined;
      ok = ok && dev <= 4.0;
      detail += fmt::format(" {} {} vs {} ({:.2f} combined SEs, limit 4);", id, estimate_format(m.q, m.se),
                            estimate_format(ref.value, ref.se), dev);
    }
    report("composite-reference-values", ok, detail);
  }
}

void composite_speedup_sweep() {
  const bool full = full_mode();
  const std::optional<double> t = full ? std::nullopt : std::optional<double>(3.0);
  const std::optional<std::size_t> r = full ? std::nullopt : std::optional<std::size_t>(3);
  const std::vector<std::pair<std::string, double>> ratings{{"08", 15.0}, {"09", 34.0}, {"10", 143.0}};
  std::vector<double> ratios;
  std::string detail;
  bool within = true;
  for (const auto& [tag, ref] : ratings) {
    const auto mc = run(experiment("composite_mc_r" + tag + ".json"), t, r);
    const auto ml = run(experiment("composite_mlmc_exp_r" + tag + ".json"), t, r);
    const double ratio = measure(ml.json, "EPNS").z / measure(mc.json, "EPNS").z;
    ratios.push_back(ratio);
    const bool in_band = ratio >= ref / 5.0 && ratio <= ref * 5.0;
    within = within && in_band;
    detail += fmt::format(" rating {}.{}: z ratio {:.1f} (reference {:.0f}, band [{:.1f}, {:.0f}]);", tag[0], tag[1],
                          ratio, ref, ref / 5.0, ref * 5.0);
  }
  const bool increasing = ratios[0] < ratios[1] && ratios[1] < ratios[2];
  report("composite-speedup", ratios[0] >= 3.0 && increasing && within,
         fmt::format("EPNS speed ratio >= 3 at 0.8, strictly increasing, within a factor 5;{}", detail));
}

void unbiasedness() {
  const int seeds = 20;
  struct Pair {
    const char* study;
    json mc;
    json ml;
    std::vector<std::string> measures;
  };
  auto nominal = [](json cfg, std::vector<double> tau, double analytic, double t_star) {
    cfg["cost_model"] = {{"mode", "nominal"}, {"tau", tau}, {"analytic_seconds", analytic}};
    cfg["t_star"] = t_star;
    cfg["runs"] = 2;
    cfg["n0"] = 50;
    return cfg;
  };
  const double scale = full_mode() ? 5.0 : 1.0;
  std::vector<Pair> pairs{
      {"composite", nominal(experiment("composite_mc_r08.json"), {5e-6}, 0.0, 0.4 * scale),
       nominal(experiment("composite_mlmc_exp_r08.json"), {5e-6}, 2.5e-4, 0.4 * scale),
       {"PLC", "EPNS"}},
      {"storage", nominal(experiment("storage_mc_optimal.json"), {6e-4}, 0.0, 0.4 * scale),
       nominal(experiment("storage_mlmc_3level.json"), {5e-4, 9e-4}, 0.05, 0.4 * scale),
       {"LOLE", "EENS"}},
  };
  for (auto& p : pairs) {
    std::vector<int> excursions(p.measures.size(), 0);
    double worst = 0.0;
    for (int s = 0; s < seeds; ++s) {
      p.mc["seed"] = 1000 + s;
      p.ml["seed"] = 5000 + s;
      const auto a = run_experiment(parse_config(p.mc, kData)).json;
      const auto b = run_experiment(parse_config(p.ml, kData)).json;
      for (std::size_t m = 0; m < p.measures.size(); ++m) {
        const auto x = measure(a, p.measures[m]);
        const auto y = measure(b, p.measures[m]);
        const double dev = std::abs(x.q - y.q) / std::sqrt(x.se * x.se + y.se * y.se);
        worst = std::max(worst, dev);
        excursions[m] += dev > 4.0;
      }
    }
    bool ok = true;
    std::string detail = fmt::format("{} study, {} seeds, MC vs MLMC beyond 4 combined SEs:", p.study, seeds);
    for (std::size_t m = 0; m < p.measures.size(); ++m) {
      ok = ok && excursions[m] <= 1;
      detail += fmt::format(" {} {} (limit 1);", p.measures[m], excursions[m]);
    }
    detail += fmt::format(" largest deviation {:.2f} SEs", worst);
    report("unbiasedness", ok, detail);
  }
}

void copt_exactness() {
  bool ok = true;
  double worst = 0.0;
  double slowest = 0.0;
  auto rel = [&](double a, double b) {
    const double e = b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b);
    worst = std::max(worst, e);
    return e <= 1e-12;
  };
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    RngStream r(4242, 0, trial);
    const std::size_t n = 12;
    std::vector<double> cap, avail;
    Network net;
    net.node_ids = {1};
    net.node_weight = {1.0};
    StorageSystem sys;
    double installed = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ConventionalUnit u;
      u.name = "u";
      u.capacity_mw = static_cast<double>(10 + r.uniform_index(90));
      u.mttf_h = 300.0 + 2000.0 * r.uniform();
      u.mttr_h = 20.0 + 100.0 * r.uniform();
      sys.portfolio.push_back(u);
      const double pf = 1.0 - std::exp(-1.0 / u.mttf_h);
      const double pr = 1.0 - std::exp(-1.0 / u.mttr_h);
      cap.push_back(u.capacity_mw);
      avail.push_back(pr / (pf + pr));
      net.generators.push_back({0, u.capacity_mw, avail.back()});
      installed += u.capacity_mw;
    }
    const std::size_t hours = 96;
    for (int y = 0; y < 2; ++y) {
      std::vector<double> d(hours), w(hours);
      for (std::size_t t = 0; t < hours; ++t) {
        d[t] = installed * (0.4 + 0.6 * r.uniform());
        w[t] = 0.1 * installed * r.uniform();
      }
      sys.demand.years.push_back(d);
      sys.wind.years.push_back(w);
      sys.demand.names.push_back("d");
      sys.wind.names.push_back("w");
    }
    sys.fleet.push_back({"s", 1.0, 1.0, 1.0});
    net.demand_trace = sys.demand.years[0];

    const auto states = oracle::enumerate_capacity(cap, avail);
    auto t0 = Clock::now();
    const SnapshotRisk hl1 = copt_convolve(net, 1.0);
    slowest = std::max(slowest, since(t0));
    double plc = 0.0, epns = 0.0;
    for (double d : net.demand_trace) {
      plc += oracle::prob_below(states, d - kCurtailmentTolerance);
      epns += oracle::expected_shortfall(states, d);
    }
    ok = rel(hl1.plc, plc / hours) && ok;
    ok = rel(hl1.epns, epns / hours) && ok;

    t0 = Clock::now();
    const AnnualRisk level0 = convolve_level0(sys, std::nullopt, 1.0);
    slowest = std::max(slowest, since(t0));
    double lole = 0.0, eens = 0.0;
    for (const auto& d : sys.demand.years) {
      for (const auto& w : sys.wind.years) {
        for (std::size_t t = 0; t < hours; ++t) {
          lole += oracle::prob_below(states, d[t] - w[t] - kCurtailmentTolerance);
          eens += oracle::expected_shortfall(states, d[t] - w[t]);
        }
      }
    }
    ok = rel(level0.lole, lole / 4.0) && ok;
    ok = rel(level0.eens, eens / 4.0) && ok;
  }
  report("copt-exact", ok && slowest < 1.0,
         fmt::format("HL1 and storage level-0 convolutions vs enumeration of 12 units: worst relative error {:.2e} "
                     "(limit 1e-12), slowest call {:.4f} s (limit 1 s)",
                     worst, slowest));
}

void allocation_optimality() {
  int bad = 0;
  double worst = INFINITY;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    RngStream r(9090, 0, trial);
    const std::size_t levels = 1 + r.uniform_index(4);  // L <= 3
    std::vector<double> var(levels), tau(levels);
    double weight = 0.0, min_ratio = INFINITY;
    for (std::size_t l = 0; l < levels; ++l) {
      var[l] = std::exp(std::log(1e-6) * r.uniform());
      tau[l] = std::exp(std::log(1e-6) + (std::log(1e-2) - std::log(1e-6)) * r.uniform());
      weight += std::sqrt(var[l] * tau[l]);
      min_ratio = std::min(min_ratio, std::sqrt(var[l] / tau[l]));
    }
    const double budget = 1e4 * weight / min_ratio * (1.0 + 10.0 * r.uniform());
    const auto plan = optimal_allocation(var, tau, budget);
    const auto check = oracle::perturbation_grid(var, tau, plan.counts, 1e-7);
    worst = std::min(worst, check.worst_ratio);
    bad += !check.optimal;
  }
  report("allocation-optimal", bad == 0,
         fmt::format("100 random instances with up to 4 levels, +-20% grid at equal cost: {} beaten; smallest "
                     "V(perturbed)/V(plan) {:.9f}",
                     bad, worst));
}

void solver_references() {
  int mismatches = 0;
  int solved = 0;
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    RngStream r(6060, 0, trial);
    const auto inst = random_lp(r, 6);
    const auto ref = oracle::enumerate_vertices(inst.dense);
    const auto res = solvers::solve_lp(inst.lp);
    if (!ref.feasible) {
      mismatches += res.status != solvers::LpStatus::infeasible;
      continue;
    }
    ++solved;
    const double err = std::abs(res.objective - ref.objective) / (1.0 + std::abs(ref.objective));
    worst = std::max(worst, err);
    mismatches += res.status != solvers::LpStatus::optimal || err > 1e-8;
  }
  report("lp-vertex-enumeration", mismatches == 0,
         fmt::format("50 random LPs with up to 6 variables ({} feasible): {} mismatches, worst objective error "
                     "{:.2e} (limit 1e-8)",
                     solved, mismatches, worst));

  const auto sys = storage_system();
  const auto profile = mean_daily_profile(sys.demand);
  double p = 0.0, e = 0.0;
  for (const auto& u : sys.fleet) {
    p += u.p_bar;
    e += u.e_bar;
  }
  const auto shave = peak_shave_profile(profile, p, e);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(48, 48), E = Eigen::MatrixXd::Zero(24, 48);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(48), lo(48), hi(48), rhs = Eigen::VectorXd::Zero(24);
  for (int h = 0; h < 24; ++h) {
    H(h, h) = 2.0;
    g[h] = 2.0 * profile[static_cast<std::size_t>(h)] / p;
    lo[h] = -1.0;
    hi[h] = 1.0;
    lo[24 + h] = 0.0;
    hi[24 + h] = e / p;
    E(h, 24 + (h + 1) % 24) = 1.0;
    E(h, 24 + h) = -1.0;
    E(h, h) = -1.0;
  }
  const auto ref = oracle::admm_qp(H, g, lo, hi, E, rhs, 1.0, 2'000'000, 1e-13);
  double ref_obj = 0.0, max_dev = 0.0;
  for (int h = 0; h < 24; ++h) {
    const double v = profile[static_cast<std::size_t>(h)] + p * ref.x[h];
    ref_obj += v * v;
    max_dev = std::max(max_dev, std::abs(shave.power[static_cast<std::size_t>(h)] - p * ref.x[h]) / p);
  }
  const double obj_err = std::abs(shave.objective - ref_obj) / ref_obj;
  report("qp-first-order-reference", obj_err <= 1e-6 && max_dev <= 1e-6,
         fmt::format("24-h flattening QP vs ADMM ({} iterations): objective relative error {:.2e}, largest power "
                     "deviation {:.2e} of the fleet rating (limits 1e-6)",
                     ref.iterations, obj_err, max_dev));
}

void storage_model_ordering() {
  const bool full = full_mode();
  const StorageStudy study(storage_system());
  const std::size_t years = full ? 40000 : 20000;  // annual EENS is heavily skewed
  std::size_t violations = 0;
  RunningMoments none_minus_greedy, optimal_minus_greedy, average, none;
  YearState y;
  for (std::size_t i = 0; i < years; ++i) {
    RngStream r(777, 0, i);
    sample_year_state(study.system(), r, y);
    const double x_none = study.evaluate(StorageModel::no_storage, y).eens;
    const double x_greedy = study.evaluate(StorageModel::greedy, y).eens;
    const double x_opt = study.evaluate(StorageModel::optimal, y).eens;
    const double x_avg = study.evaluate(StorageModel::average, y).eens;
    violations += x_none < x_greedy;
    none_minus_greedy.add(x_none - x_greedy);
    optimal_minus_greedy.add(x_opt - x_greedy);
    average.add(x_avg);
    none.add(x_none);
  }
  const auto se = [](const RunningMoments& m) { return std::sqrt(m.variance() / static_cast<double>(m.count())); };
  report("storage-pathwise", violations == 0,
         fmt::format("EENS without storage >= EENS with greedy dispatch on {} of {} sampled years", years - violations,
                     years));

  const bool b1 = none_minus_greedy.mean() >= 0.0;
  const bool b2 = optimal_minus_greedy.mean() <= 3.0 * se(optimal_minus_greedy);
  report("storage-expectation-order", b1 && b2,
         fmt::format("E[EENS] no storage - greedy = {} (must be >= 0); optimal - greedy = {} (must be <= 3 SEs)",
                     estimate_format(none_minus_greedy.mean(), se(none_minus_greedy)),
                     estimate_format(optimal_minus_greedy.mean(), se(optimal_minus_greedy))));

  const auto exact_avg = study.level0_expectation(StorageModel::average);
  const auto exact_none = study.level0_expectation(StorageModel::no_storage);
  const double dev_avg = std::abs(average.mean() - exact_avg.eens) / se(average);
  const double dev_none = std::abs(none.mean() - exact_none.eens) / se(none);
  report("storage-level0-convolution", dev_avg <= 3.0 && dev_none <= 3.0,
         fmt::format("average dispatch: exact {:.2f} vs MC {} ({:.2f} SEs); no storage: exact {:.2f} vs MC {} "
                     "({:.2f} SEs); limit 3",
                     exact_avg.eens, estimate_format(average.mean(), se(average)), dev_avg, exact_none.eens,
                     estimate_format(none.mean(), se(none)), dev_none));

  const std::optional<double> t = full ? std::nullopt : std::optional<double>(5.0);
  const std::optional<std::size_t> r = full ? std::nullopt : std::optional<std::size_t>(3);
  const auto mc = run(experiment("storage_mc_optimal.json"), t, r);
  const auto ml = run(experiment("storage_mlmc_3level.json"), t, r);
  const double z_mc = measure(mc.json, "EENS").z;
  const double z_ml = measure(ml.json, "EENS").z;
  report("storage-speedup", z_ml >= 10.0 * z_mc,
         fmt::format("EENS speed of the 3-level stack {:.1f} vs MC on the fleet-wide model {:.2f}: ratio {:.1f} "
                     "(limit 10)",
                     z_ml, z_mc, z_ml / z_mc));
}

void network_bounds_copper_plate() {
  Network net = load_network(kData / "rts" / "rts24.net");
  net.rating_scale = 0.8;
  const CompositeSystem sys(net);
  SystemStateHL2 s;
  std::size_t violations = 0;
  std::size_t binding = 0;
  const std::size_t states = 100000;
  double worst = INFINITY;
  for (std::uint64_t i = 0; i < states; ++i) {
    RngStream r(31337, 1, i);
    sample_hl2_state(net, r, s);
    const double c2 = sys.evaluate_hl2(s).total;
    const double c1 = hl1_curtailment(net, s.nodal_demand, s.gen_status);
    worst = std::min(worst, c2 - c1);
    violations += c2 < c1 - 1e-6;
    binding += c2 > c1 + 1e-6;
  }
  report("network-dominates-copper-plate", violations == 0,
         fmt::format("{} sampled states at rating 0.8: {} with C2 < C1 - 1e-6, {} where the network adds "
                     "curtailment; min C2 - C1 = {:.3g} MW",
                     states, violations, binding, worst));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void replay() {
  const fs::path root = fs::temp_directory_path() / "adequacy_acceptance_replay";
  fs::remove_all(root);
  bool ok = true;
  std::string detail;
  for (const char* name : {"composite_replay.json", "storage_replay.json"}) {
    auto cfg = parse_config(experiment(name), kData);
    cfg.workers = 1;
    const auto a = write_run_outputs(root / "a" / name, run_experiment(cfg));
    const auto b = write_run_outputs(root / "b" / name, run_experiment(cfg));
    const bool same = slurp(a) == slurp(b);
    ok = ok && same && !slurp(a).empty();
    detail += fmt::format(" {} {};", name, same ? "identical" : "differs");
  }
  report("bit-identical-replay", ok, "results.json written twice with one worker:" + detail);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  fmt::print("acceptance ({} budgets)\n", full_mode() ? "full" : "reduced");
  const std::vector<std::pair<const char*, std::function<void()>>> checks{
      {"composite reference values", composite_reference_values},
      {"composite speedup", composite_speedup_sweep},
      {"unbiasedness", unbiasedness},
      {"capacity tables", copt_exactness},
      {"allocation", allocation_optimality},
      {"solvers", solver_references},
      {"storage", storage_model_ordering},
      {"network bounds", network_bounds_copper_plate},
      {"replay", replay},
  };
  for (const auto& [name, fn] : checks) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(name, false, std::string("exception: ") + e.what());
    }
  }
  fmt::print("{} failing, {:.0f} s\n", failures, since(t0));
  return failures == 0 ? 0 : 1;
}
