#include "adequacy/controller.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

namespace adequacy {

std::string_view to_string(Pairing p) noexcept {
  switch (p) {
    case Pairing::single: return "single";
    case Pairing::pattern1: return "pattern1";
    case Pairing::pattern2: return "pattern2";
  }
  return "unknown";
}

void ModelStack::validate() const {
  if (measures.size() == 0) throw std::invalid_argument("model stack: no measures registered");
  if (models.empty()) throw std::invalid_argument("model stack: at least one model is required");
  const std::size_t sampled = models.size() - (analytic_level0 ? 1 : 0);
  if (levels.size() != sampled) {
    throw std::invalid_argument("model stack: expected " + std::to_string(sampled) + " sampled levels, got " +
                                std::to_string(levels.size()));
  }
  if (analytic_level0 && analytic_level0->size() != measures.size()) {
    throw std::invalid_argument("model stack: analytic level 0 needs one value per measure");
  }
  for (const auto& l : levels) {
    if (!l.evaluate) throw std::invalid_argument("model stack: level '" + l.label + "' has no evaluator");
  }
}

ModelEvaluationError::ModelEvaluationError(int level, std::uint64_t sample_index, const std::string& what)
    : std::runtime_error("model evaluation failed at level " + std::to_string(level) + ", sample " +
                         std::to_string(sample_index) + ": " + what),
      level_(level),
      sample_index_(sample_index) {}

namespace {

using Clock = std::chrono::steady_clock;

struct LevelAccumulator {
  std::vector<PairMoments> moments;  // per measure
  std::uint64_t next_index = 0;
  double seconds = 0.0;
};

// Evaluates samples [begin, end) of one level into `out` (one accumulator per measure).
void evaluate_range(const StackLevel& level, int level_index, std::uint64_t seed, std::uint64_t begin,
                    std::uint64_t end, std::size_t measures, std::vector<PairMoments>& out) {
  out.assign(measures, PairMoments{});
  std::vector<double> upper(measures);
  std::vector<double> lower(measures);
  for (std::uint64_t i = begin; i < end; ++i) {
    std::fill(upper.begin(), upper.end(), 0.0);
    std::fill(lower.begin(), lower.end(), 0.0);
    RngStream rng(seed, static_cast<std::uint32_t>(level_index), i);
    try {
      level.evaluate(rng, upper, lower);
    } catch (const std::exception& e) {
      throw ModelEvaluationError(level_index, i, e.what());
    }
    for (std::size_t m = 0; m < measures; ++m) {
      if (!std::isfinite(upper[m]) || !std::isfinite(lower[m])) {
        throw ModelEvaluationError(level_index, i, "non-finite output for measure " + std::to_string(m));
      }
      out[m].add(upper[m], lower[m]);
    }
  }
}

void run_batch(const StackLevel& level, int level_index, std::uint64_t seed, std::size_t count, std::size_t workers,
               LevelAccumulator& acc) {
  if (count == 0) return;
  const std::size_t measures = acc.moments.size();
  const std::uint64_t begin = acc.next_index;
  const std::size_t chunks = std::max<std::size_t>(1, std::min(workers, count));
  std::vector<std::vector<PairMoments>> parts(chunks);
  if (chunks == 1) {
    evaluate_range(level, level_index, seed, begin, begin + count, measures, parts[0]);
  } else {
    std::vector<std::exception_ptr> errors(chunks);
    std::vector<std::thread> threads;
    threads.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::uint64_t a = begin + count * c / chunks;
      const std::uint64_t b = begin + count * (c + 1) / chunks;
      threads.emplace_back([&, c, a, b] {
        try {
          evaluate_range(level, level_index, seed, a, b, measures, parts[c]);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  for (const auto& part : parts) {
    for (std::size_t m = 0; m < measures; ++m) acc.moments[m].merge(part[m]);
  }
  acc.next_index += count;
}

}  // namespace

ControllerResult run_controller(const ModelStack& stack, const ControllerOptions& opt) {
  stack.validate();
  if (opt.n0 < 2) throw std::invalid_argument("run_controller: n0 must be at least 2");
  if (!(opt.t_star > 0.0)) throw std::invalid_argument("run_controller: t_star must be positive");
  if (!(opt.alpha > 0.0 && opt.alpha <= 1.0)) throw std::invalid_argument("run_controller: alpha must lie in (0, 1]");
  const std::size_t target = stack.measures.index_of(opt.target_measure);
  const std::size_t measures = stack.measures.size();
  const std::size_t nlev = stack.levels.size();
  const int first = stack.first_level();
  const std::size_t workers = std::max<std::size_t>(1, opt.workers);
  if (opt.cost_model == CostModel::nominal) {
    for (const auto& l : stack.levels) {
      if (!(l.nominal_tau > 0.0)) {
        throw std::invalid_argument("run_controller: nominal cost model needs a positive cost for level '" +
                                    l.label + "'");
      }
    }
  }

  const auto wall_start = Clock::now();
  std::vector<LevelAccumulator> acc(nlev);
  for (auto& a : acc) a.moments.assign(measures, PairMoments{});

  ControllerResult result;
  result.analytic_level0 = stack.analytic_level0;
  const double analytic_cost = stack.analytic_level0 ? stack.analytic_seconds : 0.0;

  auto tau_of = [&](std::size_t l) {
    if (opt.cost_model == CostModel::nominal) return stack.levels[l].nominal_tau;
    const auto n = acc[l].moments[0].count();
    return n > 0 ? std::max(acc[l].seconds / static_cast<double>(n), 1e-9) : 0.0;
  };
  auto total_seconds = [&] {
    double s = analytic_cost;
    for (const auto& a : acc) s += a.seconds;
    return s;
  };
  auto level_stats = [&](std::size_t m) {
    std::vector<LevelStats> stats;
    for (std::size_t l = 0; l < nlev; ++l) {
      stats.push_back(LevelStats::from_moments(first + static_cast<int>(l), acc[l].moments[m], tau_of(l)));
    }
    return stats;
  };
  auto estimates = [&] {
    std::vector<RiskEstimate> out;
    const double elapsed = total_seconds();
    for (std::size_t m = 0; m < measures; ++m) {
      const auto stats = level_stats(m);
      std::optional<double> r0;
      if (stack.analytic_level0) r0 = (*stack.analytic_level0)[m];
      out.push_back(mlmc_estimate(stats, r0, elapsed, stack.measures.id(m)));
    }
    return out;
  };
  auto execute = [&](const std::vector<std::size_t>& counts) {
    double spent = 0.0;
    for (std::size_t l = 0; l < nlev; ++l) {
      const auto t0 = Clock::now();
      run_batch(stack.levels[l], first + static_cast<int>(l), opt.seed, counts[l], workers, acc[l]);
      const double dt = opt.cost_model == CostModel::nominal
                            ? stack.levels[l].nominal_tau * static_cast<double>(counts[l])
                            : std::chrono::duration<double>(Clock::now() - t0).count();
      acc[l].seconds += dt;
      spent += dt;
    }
    return spent;
  };

  RunReport explore;
  explore.run = 0;
  explore.counts.assign(nlev, opt.n0);
  explore.elapsed = execute(explore.counts) + analytic_cost;
  explore.estimates = estimates();
  if (opt.on_run) opt.on_run(explore);
  result.runs.push_back(std::move(explore));

  for (std::size_t run = 1; run <= opt.runs; ++run) {
    const auto stats = level_stats(target);
    const auto floored = variance_floor(stats, opt.alpha);
    std::vector<double> tau(nlev);
    for (std::size_t l = 0; l < nlev; ++l) tau[l] = tau_of(l);

    RunReport rep;
    rep.run = run;
    rep.budget = opt.t_star;
    if (std::all_of(floored.begin(), floored.end(), [](double v) { return v == 0.0; })) {
      // Nothing has varied yet: spread the budget evenly in time so the
      // variance estimates get a chance to become informative.
      rep.equal_split = true;
      rep.counts.resize(nlev);
      for (std::size_t l = 0; l < nlev; ++l) {
        rep.counts[l] = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(opt.t_star / (static_cast<double>(nlev) * tau[l]) + 0.5)));
      }
    } else {
      const AllocationPlan plan = optimal_allocation(floored, tau, opt.t_star);
      rep.counts = plan.counts;
      rep.over_budget = plan.over_budget;
    }
    rep.elapsed = execute(rep.counts);
    rep.estimates = estimates();
    if (opt.on_run) opt.on_run(rep);
    result.runs.push_back(std::move(rep));
  }

  result.estimates = estimates();
  for (std::size_t m = 0; m < measures; ++m) result.levels.push_back(level_stats(m));
  for (std::size_t l = 0; l < nlev; ++l) {
    result.level_seconds.push_back(acc[l].seconds);
    result.level_counts.push_back(acc[l].moments[0].count());
  }
  result.elapsed = total_seconds();
  result.wall_seconds = std::chrono::duration<double>(Clock::now() - wall_start).count();
  return result;
}

}  // namespace adequacy
