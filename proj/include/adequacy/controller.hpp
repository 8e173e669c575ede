#pragma once

#include "adequacy/estimator.hpp"
#include "adequacy/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace adequacy {

enum class Pairing {
  single,    // one level, no lower model
  pattern1,  // lower state is a projection of the upper state
  pattern2,  // both models see the same state
};

std::string_view to_string(Pairing p) noexcept;

/// Draws one state from `rng` and writes one value per measure for the upper
/// model of the pair and, except on level 0, for the lower model. On level 0
/// `lower` must be left at zero.
using PairEvaluator = std::function<void(RngStream& rng, std::span<double> upper, std::span<double> lower)>;

struct StackLevel {
  std::string label;
  PairEvaluator evaluate;
  double nominal_tau = 0.0;  // seconds per pair under the nominal cost model
};

/// Models M_0..M_L and the level pairs that are actually sampled. With an
/// analytic level 0 the sampled levels are 1..L, otherwise 0..L.
struct ModelStack {
  MeasureSet measures;
  std::vector<std::string> models;
  std::vector<StackLevel> levels;
  Pairing pairing = Pairing::single;
  std::optional<std::vector<double>> analytic_level0;  // one value per measure
  double analytic_seconds = 0.0;

  int first_level() const noexcept { return analytic_level0 ? 1 : 0; }
  void validate() const;
};

enum class CostModel {
  measured,  // wall-clock time per level
  nominal,   // configured seconds per pair; allocation and speeds become reproducible
};

struct RunReport {
  std::size_t run = 0;  // 0 is the exploratory run
  double budget = 0.0;
  std::vector<std::size_t> counts;
  bool over_budget = false;
  bool equal_split = false;  // no level had a nonzero variance estimate yet
  double elapsed = 0.0;      // cost-model seconds spent in this run
  std::vector<RiskEstimate> estimates;
};

struct ControllerOptions {
  std::size_t n0 = 100;
  std::size_t runs = 10;
  double t_star = 60.0;
  std::string target_measure;
  std::uint64_t seed = 0;
  double alpha = 0.1;
  std::size_t workers = 1;
  CostModel cost_model = CostModel::measured;
  std::function<void(const RunReport&)> on_run;
};

struct ControllerResult {
  std::vector<RiskEstimate> estimates;          // per measure
  std::vector<std::vector<LevelStats>> levels;  // [measure][sampled level]
  std::vector<RunReport> runs;
  std::optional<std::vector<double>> analytic_level0;
  std::vector<double> level_seconds;
  std::vector<std::size_t> level_counts;
  double elapsed = 0.0;       // cost-model seconds, including the analytic term
  double wall_seconds = 0.0;  // actual time spent in run_controller
};

class ModelEvaluationError : public std::runtime_error {
 public:
  ModelEvaluationError(int level, std::uint64_t sample_index, const std::string& what);
  int level() const noexcept { return level_; }
  std::uint64_t sample_index() const noexcept { return sample_index_; }

 private:
  int level_;
  std::uint64_t sample_index_;
};

/// Exploratory run of n0 pairs per sampled level, then `runs` runs with a
/// budget of t_star each, allocated on the target measure after the variance
/// floor. Sample i of level l always uses RngStream(seed, l, i), and worker
/// chunks are merged in index order, so results depend only on the seed and
/// the worker count.
ControllerResult run_controller(const ModelStack& stack, const ControllerOptions& options);

}  // namespace adequacy
