#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace adequacy {

class EstimateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Welford accumulator. merge() uses the pairwise update of Chan et al., so
/// accumulating in chunks and merging matches a single pass up to rounding.
class RunningMoments {
 public:
  void add(double x) noexcept;
  void merge(const RunningMoments& other) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double sum_sq_dev() const noexcept { return m2_; }
  /// Unbiased variance; NaN for fewer than two samples.
  double variance() const noexcept;

  static RunningMoments from_raw(std::size_t n, double mean, double m2) noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Joint moments of a level pair (upper, lower). The difference Y = upper -
/// lower gets its own accumulator rather than being derived from the
/// marginals, which would cancel badly when the pair is highly correlated.
class PairMoments {
 public:
  void add(double upper, double lower) noexcept;
  void merge(const PairMoments& other) noexcept;

  std::size_t count() const noexcept { return y_.count(); }
  const RunningMoments& y() const noexcept { return y_; }
  const RunningMoments& upper() const noexcept { return upper_; }
  const RunningMoments& lower() const noexcept { return lower_; }
  /// Unbiased covariance of (lower, upper); NaN for fewer than two samples.
  double covariance() const noexcept;

 private:
  RunningMoments y_;
  RunningMoments upper_;
  RunningMoments lower_;
  double c2_ = 0.0;
};

struct LevelStats {
  int level = 0;
  std::size_t n = 0;
  double mean_y = 0.0;
  double var_y = 0.0;
  double mean_x_upper = 0.0;
  double mean_x_lower = 0.0;
  double var_x_upper = 0.0;
  double var_x_lower = 0.0;
  double cov_pair = 0.0;
  double tau = 0.0;  // seconds per pair evaluation

  static LevelStats from_moments(int level, const PairMoments& m, double tau);
};

struct RiskEstimate {
  std::string measure_id;
  double q_hat = 0.0;
  std::optional<double> var_q_hat;  // empty when some level has n < 2
  std::size_t n_total = 0;
  double elapsed = 0.0;

  std::optional<double> std_error() const;
};

/// Plain MC: sample mean and s^2/n.
RiskEstimate mc_estimate(std::span<const double> values, double elapsed, std::string measure_id = {});

/// Sum of level means plus the optional analytic level-0 value. Levels must be
/// consecutive, starting at 1 when analytic_r0 is given and at 0 otherwise.
RiskEstimate mlmc_estimate(std::span<const LevelStats> stats, std::optional<double> analytic_r0,
                           double elapsed = 0.0, std::string measure_id = {});

struct AllocationPlan {
  double budget = 0.0;
  std::vector<std::size_t> counts;
  std::string target_measure;
  bool over_budget = false;  // budget could not cover one evaluation per level
};

/// Counts n_l proportional to sigma_l / sqrt(tau_l), scaled to the budget and
/// rounded half-up. Zero-variance levels are charged one sample up front.
AllocationPlan optimal_allocation(std::span<const double> var_y, std::span<const double> tau, double budget);
AllocationPlan optimal_allocation(std::span<const LevelStats> stats, double budget);

/// Variance of the MLMC estimator for given counts, sum var_l / n_l.
double allocation_variance(std::span<const double> var_y, std::span<const std::size_t> counts);

/// Lower bound on the achievable variance for time t: (sum sigma_l sqrt(tau_l))^2 / t.
double optimal_variance(std::span<const double> var_y, std::span<const double> tau, double budget);

/// max(var_y[l], alpha^level * max_l var_x), using the larger of the two
/// marginal variances of each level. NaN inputs count as zero.
std::vector<double> variance_floor(std::span<const LevelStats> stats, double alpha);

/// z = q^2 / (t var). Throws EstimateError when undefined.
double speed_metric(double q_hat, double var_q_hat, double elapsed);
double speed_metric(const RiskEstimate& estimate);

/// Run time needed for coefficient of variation cv at speed z.
double required_time(double speed, double cv);

double speedup(double z_ml, double z_mc);

class MeasureSet {
 public:
  MeasureSet() = default;

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  /// Throws std::out_of_range for unknown identifiers.
  std::size_t index_of(const std::string& id) const;
  bool contains(const std::string& id) const noexcept;

 private:
  friend MeasureSet register_measures(std::vector<std::string> ids);
  std::vector<std::string> ids_;
};

/// Throws std::invalid_argument for an empty list or duplicate identifiers.
MeasureSet register_measures(std::vector<std::string> ids);

}  // namespace adequacy
