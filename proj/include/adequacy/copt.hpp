#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adequacy {

/// Capacity outage probability table: the distribution of total available
/// capacity G of independent two-state units, on a grid of `step` MW.
/// Unit capacities are rounded to the nearest grid point.
class Copt {
 public:
  Copt(std::span<const double> capacities, std::span<const double> availabilities, double step);

  double step() const noexcept { return step_; }
  /// Number of grid points, 0 .. max capacity.
  std::size_t size() const noexcept { return pmf_.size(); }
  double max_capacity() const noexcept { return step_ * static_cast<double>(pmf_.size() - 1); }
  double mean() const noexcept { return mean_; }
  /// P(G = k step)
  std::span<const double> pmf() const noexcept { return pmf_; }

  /// P(G < x)
  double prob_below(double x) const noexcept;
  /// E[max(0, x - G)], exact for any real x because G lives on the grid.
  double expected_shortfall(double x) const noexcept;

 private:
  double step_;
  double mean_ = 0.0;
  std::vector<double> pmf_;
  std::vector<double> cdf_;        // P(G <= k step)
  std::vector<double> shortfall_;  // E[(k step - G)+]
};

}  // namespace adequacy
