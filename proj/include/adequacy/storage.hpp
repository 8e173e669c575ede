#pragma once

#include "adequacy/sampling.hpp"
#include "adequacy/storage_data.hpp"

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace adequacy {

/// Per-unit power traces (consumption positive), units in fleet order.
using UnitDispatch = std::vector<std::vector<double>>;

/// M_t = g_t + w_t - d_t
std::vector<double> net_margin(const YearState& year);
void net_margin(std::span<const double> conventional, std::span<const double> wind, std::span<const double> demand,
                std::vector<double>& out);

std::vector<double> dispatch_none(std::span<const double> margin);

/// Units in order of decreasing e_bar / p_bar (ties by fleet index), each
/// making one hourly pass against the margin left by the units before it:
/// discharge only to cover a shortfall, charge from any surplus.
std::vector<double> dispatch_greedy(std::span<const double> margin, const std::vector<StorageUnit>& fleet,
                                    UnitDispatch* per_unit = nullptr);

/// Fleet-wide hourly allocation. A shortfall is covered by discharging the
/// units with the most hours of energy left first, drawing them down to a
/// common time-to-go level; a surplus charges the units with the fewest
/// hours left first, filling them up to a common level. Never discharges
/// beyond the shortfall or charges beyond the surplus.
std::vector<double> dispatch_optimal(std::span<const double> margin, const std::vector<StorageUnit>& fleet,
                                     UnitDispatch* per_unit = nullptr);

/// S_t = profile[t mod 24] with t counted from 0.
std::vector<double> dispatch_average(std::size_t hours, std::span<const double> profile);

/// C_t = max(0, S_t - M_t)
std::vector<double> curtail_trace(std::span<const double> margin, std::span<const double> dispatch);

struct AnnualRisk {
  double lole = 0.0;  // hours with C_t above the curtailment tolerance
  double eens = 0.0;  // MWh
};

AnnualRisk measure_outputs_annual(std::span<const double> curtailment);

/// Hour-of-day mean over every day of every year in the library.
std::array<double, 24> mean_daily_profile(const TraceLibrary& demand);

struct PeakShave {
  std::array<double, 24> power{};   // s_h, consumption positive
  std::array<double, 24> energy{};  // e_h
  double objective = 0.0;           // sum_h (d_h + s_h)^2
  double kkt_residual = 0.0;
};

/// Flattest daily profile reachable by one aggregate unit with the given
/// ratings, under a periodic state of charge.
PeakShave peak_shave_profile(std::span<const double> mean_daily_demand, double p_bar_total, double e_bar_total);

/// Exact expectation of the no-storage (no profile) or average-dispatch
/// model: the conventional capacity table against d_t - w_t + S_t for every
/// hour of every (demand year, wind year) pair, pairs equally likely.
AnnualRisk convolve_level0(const StorageSystem& sys, std::optional<std::span<const double>> profile,
                           double step_mw = 1.0);

enum class StorageModel { no_storage, average, greedy, optimal };

std::string_view to_string(StorageModel m) noexcept;

/// Dispatch models over one storage system. Setup computes the average
/// dispatch profile once; evaluation is thread-safe.
class StorageStudy {
 public:
  explicit StorageStudy(StorageSystem sys);

  const StorageSystem& system() const noexcept { return sys_; }
  const PeakShave& peak_shave() const noexcept { return shave_; }

  AnnualRisk evaluate(StorageModel model, const YearState& year) const;
  /// Evaluates both models on the same year and the same margin trace.
  std::pair<AnnualRisk, AnnualRisk> evaluate_pair(StorageModel upper, StorageModel lower,
                                                  const YearState& year) const;
  AnnualRisk level0_expectation(StorageModel model, double step_mw = 1.0) const;

 private:
  AnnualRisk evaluate_margin(StorageModel model, std::span<const double> margin) const;

  StorageSystem sys_;
  PeakShave shave_;
};

}  // namespace adequacy
