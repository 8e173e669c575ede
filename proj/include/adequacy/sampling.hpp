#pragma once

#include "adequacy/network.hpp"
#include "adequacy/rng.hpp"
#include "adequacy/storage_data.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace adequacy {

struct SystemStateHL1 {
  std::vector<double> nodal_demand;     // MW
  std::vector<std::uint8_t> gen_status;  // 1 = available
  std::size_t hour_index = 0;            // 1-based hour of the demand trace
};

struct SystemStateHL2 {
  std::vector<double> nodal_demand;
  std::vector<std::uint8_t> gen_status;
  std::vector<std::uint8_t> line_status;
  std::size_t hour_index = 0;
};

/// 1 with probability `availability`. Throws std::invalid_argument outside [0, 1].
bool sample_component_state(double availability, RngStream& rng);

/// Draws the hour, then every generator, then every line, in file order.
void sample_hl2_state(const Network& net, RngStream& rng, SystemStateHL2& out);
SystemStateHL2 sample_hl2_state(const Network& net, RngStream& rng);

/// Direct HL1 draw: hour and generators only.
SystemStateHL1 sample_hl1_state(const Network& net, RngStream& rng);

/// Drops the line statuses.
SystemStateHL1 project_pattern1(const SystemStateHL2& upper);

struct YearState {
  std::size_t demand_year = 0;
  std::size_t wind_year = 0;
  std::span<const double> demand;  // views into the trace libraries
  std::span<const double> wind;
  std::vector<double> conventional;  // available conventional capacity, MW

  std::size_t hours() const noexcept { return demand.size(); }
};

/// Hourly up/down sequence of one unit (1 = up). The initial state is drawn
/// from the stationary law unless given.
std::vector<std::uint8_t> simulate_unit(const ConventionalUnit& unit, std::size_t hours, RngStream& rng,
                                        std::optional<bool> initially_up = std::nullopt);

/// Independent uniform demand and wind years, then one chain per unit.
void sample_year_state(const StorageSystem& sys, RngStream& rng, YearState& out);
YearState sample_year_state(const StorageSystem& sys, RngStream& rng);

/// Both models see the very same year; nothing is redrawn in between.
template <class LowerModel, class UpperModel>
auto pattern2_pair(const YearState& year, const LowerModel& lower, const UpperModel& upper) {
  return std::pair{lower(year), upper(year)};
}

}  // namespace adequacy
