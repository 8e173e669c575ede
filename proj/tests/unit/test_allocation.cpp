#include "adequacy/estimator.hpp"
#include "adequacy/rng.hpp"
#include "oracles/allocation_grid.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace adequacy;

namespace {

double log_uniform(RngStream& r, double lo, double hi) {
  return std::exp(std::log(lo) + r.uniform() * (std::log(hi) - std::log(lo)));
}

}  // namespace

TEST_CASE("allocation beats every perturbation of equal cost (property)") {
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    RngStream r(2024, 0, trial);
    const std::size_t levels = 1 + r.uniform_index(4);
    std::vector<double> var(levels), tau(levels);
    double weight = 0.0;
    double min_ratio = INFINITY;
    for (std::size_t l = 0; l < levels; ++l) {
      var[l] = log_uniform(r, 1e-6, 1.0);
      tau[l] = log_uniform(r, 1e-6, 1e-2);
      weight += std::sqrt(var[l] * tau[l]);
      min_ratio = std::min(min_ratio, std::sqrt(var[l] / tau[l]));
    }
    const double budget = 1e4 * weight / min_ratio * (1.0 + 10.0 * r.uniform());
    const auto plan = optimal_allocation(var, tau, budget);
    REQUIRE_FALSE(plan.over_budget);
    const auto check = oracle::perturbation_grid(var, tau, plan.counts, 1e-7);
    CAPTURE(trial);
    CHECK(check.optimal);
    double spent = 0.0;
    double slack = 0.0;
    for (std::size_t l = 0; l < levels; ++l) {
      spent += tau[l] * static_cast<double>(plan.counts[l]);
      slack += 0.5 * tau[l];
    }
    CHECK(spent <= budget + slack);
    CHECK(allocation_variance(var, plan.counts) <= optimal_variance(var, tau, budget) * (1.0 + 1e-3));
  }
}

TEST_CASE("zero-variance levels get one sample, charged first") {
  const std::vector<double> var{0.0, 4.0, 1.0};
  const std::vector<double> tau{1.0, 1.0, 4.0};
  const auto plan = optimal_allocation(var, tau, 101.0);
  CHECK(plan.counts[0] == 1);
  // remaining 100, weights sqrt(4*1)=2 and sqrt(1*4)=2: n1 = 100*2/4 = 50, n2 = 100*0.5/4 = 12.5 -> 13
  CHECK(plan.counts[1] == 50);
  CHECK(plan.counts[2] == 13);
  CHECK_FALSE(plan.over_budget);
}

TEST_CASE("budget too small for one sample per level") {
  const std::vector<double> var{1.0, 1.0};
  const std::vector<double> tau{1.0, 1.0};
  const auto plan = optimal_allocation(var, tau, 1.5);
  CHECK(plan.over_budget);
  CHECK(plan.counts == std::vector<std::size_t>{1, 1});
}

TEST_CASE("allocation rejects degenerate input") {
  const std::vector<double> zero{0.0, 0.0};
  const std::vector<double> tau{1.0, 1.0};
  CHECK_THROWS_AS(optimal_allocation(zero, tau, 10.0), EstimateError);
  const std::vector<double> var{1.0};
  CHECK_THROWS_AS(optimal_allocation(var, tau, 10.0), std::invalid_argument);
  const std::vector<double> one_tau{1.0};
  CHECK_THROWS_AS(optimal_allocation(var, one_tau, 0.0), std::invalid_argument);
  const std::vector<double> bad_tau{0.0};
  CHECK_THROWS_AS(optimal_allocation(var, bad_tau, 1.0), std::invalid_argument);
}
