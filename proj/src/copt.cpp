#include "adequacy/copt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adequacy {

Copt::Copt(std::span<const double> capacities, std::span<const double> availabilities, double step) : step_(step) {
  if (!(step > 0.0)) throw std::invalid_argument("Copt: step must be positive");
  if (capacities.size() != availabilities.size()) {
    throw std::invalid_argument("Copt: one availability per unit is required");
  }
  std::vector<std::size_t> units(capacities.size());
  std::size_t total = 0;
  for (std::size_t j = 0; j < capacities.size(); ++j) {
    if (!(capacities[j] >= 0.0)) throw std::invalid_argument("Copt: negative capacity");
    if (!(availabilities[j] >= 0.0 && availabilities[j] <= 1.0)) {
      throw std::invalid_argument("Copt: availability outside [0, 1]");
    }
    units[j] = static_cast<std::size_t>(std::llround(capacities[j] / step));
    total += units[j];
  }

  pmf_.assign(total + 1, 0.0);
  pmf_[0] = 1.0;
  std::size_t reach = 0;
  for (std::size_t j = 0; j < units.size(); ++j) {
    const std::size_t c = units[j];
    const double a = availabilities[j];
    if (c == 0) continue;
    reach += c;
    for (std::size_t k = reach + 1; k-- > 0;) {
      const double up = k >= c ? pmf_[k - c] : 0.0;
      pmf_[k] = (1.0 - a) * pmf_[k] + a * up;
    }
  }

  cdf_.resize(pmf_.size());
  shortfall_.resize(pmf_.size());
  double acc = 0.0;
  double h = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    shortfall_[k] = h;
    acc += pmf_[k];
    cdf_[k] = std::min(acc, 1.0);
    h += step_ * cdf_[k];
    mean_ += step_ * static_cast<double>(k) * pmf_[k];
  }
}

double Copt::prob_below(double x) const noexcept {
  if (x <= 0.0) return 0.0;
  const double u = std::ceil(x / step_) - 1.0;  // largest k with k step < x
  if (u >= static_cast<double>(cdf_.size() - 1)) return 1.0;
  return cdf_[static_cast<std::size_t>(u)];
}

double Copt::expected_shortfall(double x) const noexcept {
  if (x <= 0.0) return 0.0;
  const double u = std::floor(x / step_);
  if (u >= static_cast<double>(cdf_.size() - 1)) return x - mean_;
  const auto k = static_cast<std::size_t>(u);
  return shortfall_[k] + (x - step_ * u) * cdf_[k];
}

}  // namespace adequacy
