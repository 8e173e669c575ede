#include "adequacy/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace adequacy {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void RunningMoments::add(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& o) noexcept {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  mean_ += delta * (nb / n);
  m2_ += o.m2_ + delta * delta * (na * nb / n);
  n_ += o.n_;
}

double RunningMoments::variance() const noexcept {
  if (n_ < 2) return kNaN;
  return std::max(0.0, m2_ / static_cast<double>(n_ - 1));
}

RunningMoments RunningMoments::from_raw(std::size_t n, double mean, double m2) noexcept {
  RunningMoments r;
  r.n_ = n;
  r.mean_ = mean;
  r.m2_ = m2;
  return r;
}

void PairMoments::add(double upper, double lower) noexcept {
  const double d_lower = lower - lower_.mean();
  y_.add(upper - lower);
  upper_.add(upper);
  lower_.add(lower);
  // co-moment update with the pre-update lower mean and post-update upper mean
  c2_ += d_lower * (upper - upper_.mean());
}

void PairMoments::merge(const PairMoments& o) noexcept {
  if (o.count() == 0) return;
  if (count() == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(count());
  const double nb = static_cast<double>(o.count());
  const double n = na + nb;
  c2_ += o.c2_ + (o.lower_.mean() - lower_.mean()) * (o.upper_.mean() - upper_.mean()) * (na * nb / n);
  y_.merge(o.y_);
  upper_.merge(o.upper_);
  lower_.merge(o.lower_);
}

double PairMoments::covariance() const noexcept {
  if (count() < 2) return kNaN;
  return c2_ / static_cast<double>(count() - 1);
}

LevelStats LevelStats::from_moments(int level, const PairMoments& m, double tau) {
  LevelStats s;
  s.level = level;
  s.n = m.count();
  s.mean_y = m.y().mean();
  s.var_y = m.y().variance();
  s.mean_x_upper = m.upper().mean();
  s.mean_x_lower = m.lower().mean();
  s.var_x_upper = m.upper().variance();
  s.var_x_lower = m.lower().variance();
  s.cov_pair = m.covariance();
  s.tau = tau;
  return s;
}

std::optional<double> RiskEstimate::std_error() const {
  if (!var_q_hat) return std::nullopt;
  return std::sqrt(*var_q_hat);
}

RiskEstimate mc_estimate(std::span<const double> values, double elapsed, std::string measure_id) {
  if (values.empty()) throw EstimateError("mc_estimate: no samples, estimate undefined");
  RunningMoments m;
  for (double v : values) m.add(v);
  RiskEstimate r;
  r.measure_id = std::move(measure_id);
  r.q_hat = m.mean();
  if (m.count() >= 2) r.var_q_hat = m.variance() / static_cast<double>(m.count());
  r.n_total = m.count();
  r.elapsed = elapsed;
  return r;
}

RiskEstimate mlmc_estimate(std::span<const LevelStats> stats, std::optional<double> analytic_r0, double elapsed,
                           std::string measure_id) {
  if (stats.empty() && !analytic_r0) throw EstimateError("mlmc_estimate: no levels and no analytic term");
  const int first = analytic_r0 ? 1 : 0;
  RiskEstimate r;
  r.measure_id = std::move(measure_id);
  r.elapsed = elapsed;
  r.q_hat = analytic_r0.value_or(0.0);
  double var = 0.0;
  bool var_ok = true;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const LevelStats& s = stats[i];
    if (s.level != first + static_cast<int>(i)) {
      throw EstimateError("mlmc_estimate: missing or out-of-order level " + std::to_string(first + static_cast<int>(i)));
    }
    if (s.n == 0) throw EstimateError("mlmc_estimate: level " + std::to_string(s.level) + " has no samples");
    r.q_hat += s.mean_y;
    r.n_total += s.n;
    if (s.n < 2 || std::isnan(s.var_y)) {
      var_ok = false;
    } else {
      var += s.var_y / static_cast<double>(s.n);
    }
  }
  if (var_ok) r.var_q_hat = var;
  return r;
}

AllocationPlan optimal_allocation(std::span<const double> var_y, std::span<const double> tau, double budget) {
  if (var_y.size() != tau.size() || var_y.empty()) {
    throw std::invalid_argument("optimal_allocation: need one variance and one cost per level");
  }
  if (!(budget > 0.0)) throw std::invalid_argument("optimal_allocation: budget must be positive");
  const std::size_t levels = var_y.size();
  AllocationPlan plan;
  plan.budget = budget;
  plan.counts.assign(levels, 1);

  double remaining = budget;
  double floor_cost = 0.0;
  double weight = 0.0;
  for (std::size_t l = 0; l < levels; ++l) {
    if (!(tau[l] > 0.0)) throw std::invalid_argument("optimal_allocation: evaluation costs must be positive");
    if (var_y[l] < 0.0 || std::isnan(var_y[l])) throw std::invalid_argument("optimal_allocation: invalid variance");
    if (var_y[l] == 0.0) {
      remaining -= tau[l];
    } else {
      floor_cost += tau[l];
      weight += std::sqrt(var_y[l] * tau[l]);
    }
  }
  if (weight == 0.0) throw EstimateError("optimal_allocation: every level has zero variance, nothing to sample");
  if (remaining < floor_cost) {
    plan.over_budget = true;
    return plan;
  }
  for (std::size_t l = 0; l < levels; ++l) {
    if (var_y[l] == 0.0) continue;
    const double n_star = remaining * std::sqrt(var_y[l] / tau[l]) / weight;
    plan.counts[l] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(n_star + 0.5)));
  }
  return plan;
}

AllocationPlan optimal_allocation(std::span<const LevelStats> stats, double budget) {
  std::vector<double> var(stats.size());
  std::vector<double> tau(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    var[i] = stats[i].var_y;
    tau[i] = stats[i].tau;
  }
  return optimal_allocation(var, tau, budget);
}

double allocation_variance(std::span<const double> var_y, std::span<const std::size_t> counts) {
  double v = 0.0;
  for (std::size_t l = 0; l < var_y.size(); ++l) {
    if (counts[l] == 0) return std::numeric_limits<double>::infinity();
    v += var_y[l] / static_cast<double>(counts[l]);
  }
  return v;
}

double optimal_variance(std::span<const double> var_y, std::span<const double> tau, double budget) {
  double s = 0.0;
  for (std::size_t l = 0; l < var_y.size(); ++l) s += std::sqrt(var_y[l] * tau[l]);
  return s * s / budget;
}

std::vector<double> variance_floor(std::span<const LevelStats> stats, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("variance_floor: alpha must lie in (0, 1]");
  auto clean = [](double v) { return std::isnan(v) ? 0.0 : v; };
  double var_x = 0.0;
  for (const auto& s : stats) var_x = std::max({var_x, clean(s.var_x_upper), clean(s.var_x_lower)});
  std::vector<double> out(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    out[i] = std::max(clean(stats[i].var_y), std::pow(alpha, stats[i].level) * var_x);
  }
  return out;
}

double speed_metric(double q_hat, double var_q_hat, double elapsed) {
  if (q_hat == 0.0) throw EstimateError("speed undefined: estimate is zero");
  if (!(var_q_hat > 0.0)) throw EstimateError("speed undefined: estimator variance is not positive");
  if (!(elapsed > 0.0)) throw EstimateError("speed undefined: elapsed time is not positive");
  return q_hat * q_hat / (elapsed * var_q_hat);
}

double speed_metric(const RiskEstimate& e) {
  if (!e.var_q_hat) throw EstimateError("speed undefined: estimator variance unavailable");
  return speed_metric(e.q_hat, *e.var_q_hat, e.elapsed);
}

double required_time(double speed, double cv) {
  if (!(speed > 0.0) || !(cv > 0.0)) throw EstimateError("required_time: speed and cv must be positive");
  return 1.0 / (speed * cv * cv);
}

double speedup(double z_ml, double z_mc) {
  if (!(z_mc > 0.0) || !std::isfinite(z_ml) || !std::isfinite(z_mc)) {
    throw EstimateError("speedup undefined: invalid speeds");
  }
  return z_ml / z_mc;
}

std::size_t MeasureSet::index_of(const std::string& id) const {
  const auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) throw std::out_of_range("unknown measure '" + id + "'");
  return static_cast<std::size_t>(it - ids_.begin());
}

bool MeasureSet::contains(const std::string& id) const noexcept {
  return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

MeasureSet register_measures(std::vector<std::string> ids) {
  if (ids.empty()) throw std::invalid_argument("register_measures: at least one measure is required");
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (id.empty()) throw std::invalid_argument("register_measures: empty measure identifier");
    if (!seen.insert(id).second) throw std::invalid_argument("register_measures: duplicate measure '" + id + "'");
  }
  MeasureSet set;
  set.ids_ = std::move(ids);
  return set;
}

}  // namespace adequacy
