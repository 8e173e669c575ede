#pragma once

#include "adequacy/network.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace adequacy {

inline constexpr std::size_t kHoursPerYear = 8760;

/// Set of annual hourly traces, one per column of a CSV file.
struct TraceLibrary {
  std::vector<std::string> names;
  std::vector<std::vector<double>> years;

  std::size_t size() const noexcept { return years.size(); }
};

/// Columns are years; every column must have exactly `hours` rows.
TraceLibrary load_trace_library(const std::filesystem::path& path, std::size_t hours = kHoursPerYear);

/// Two-state unit whose up and down times are geometric on an hourly grid.
struct ConventionalUnit {
  std::string name;
  double capacity_mw = 0.0;
  double mttf_h = 0.0;  // infinite: never fails
  double mttr_h = 0.0;  // infinite: never repaired

  double fail_probability() const;    // per hour, 1 - exp(-1/MTTF)
  double repair_probability() const;  // per hour, 1 - exp(-1/MTTR)
  /// Stationary probability of the up state of the hourly chain.
  double availability() const;
};

std::vector<ConventionalUnit> load_portfolio(const std::filesystem::path& path);

struct StorageUnit {
  std::string name;
  double p_bar = 0.0;        // MW, charge and discharge
  double e_bar = 0.0;        // MWh
  double initial_soc = 0.0;  // MWh

  double time_to_go() const noexcept { return e_bar / p_bar; }
};

/// name,power_mw,energy_mwh; units start full.
std::vector<StorageUnit> load_fleet(const std::filesystem::path& path);
void validate_fleet(const std::vector<StorageUnit>& fleet);

struct StorageSystem {
  TraceLibrary demand;
  TraceLibrary wind;
  std::vector<ConventionalUnit> portfolio;
  std::vector<StorageUnit> fleet;

  void validate() const;
};

}  // namespace adequacy
