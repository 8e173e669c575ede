#include "adequacy/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adequacy {

bool sample_component_state(double availability, RngStream& rng) {
  if (!(availability >= 0.0 && availability <= 1.0)) {
    throw std::invalid_argument("sample_component_state: availability outside [0, 1]");
  }
  return rng.bernoulli(availability);
}

void sample_hl2_state(const Network& net, RngStream& rng, SystemStateHL2& out) {
  const std::size_t hours = net.demand_trace.size();
  const std::size_t h = static_cast<std::size_t>(rng.uniform_index(hours));
  out.hour_index = h + 1;
  const double total = net.demand_trace[h];
  out.nodal_demand.resize(net.num_nodes());
  for (std::size_t n = 0; n < net.num_nodes(); ++n) out.nodal_demand[n] = total * net.node_weight[n];
  out.gen_status.resize(net.generators.size());
  for (std::size_t j = 0; j < net.generators.size(); ++j) {
    out.gen_status[j] = rng.bernoulli(net.generators[j].availability) ? 1 : 0;
  }
  out.line_status.resize(net.lines.size());
  for (std::size_t k = 0; k < net.lines.size(); ++k) {
    out.line_status[k] = rng.bernoulli(net.lines[k].availability) ? 1 : 0;
  }
}

SystemStateHL2 sample_hl2_state(const Network& net, RngStream& rng) {
  SystemStateHL2 s;
  sample_hl2_state(net, rng, s);
  return s;
}

SystemStateHL1 sample_hl1_state(const Network& net, RngStream& rng) {
  SystemStateHL1 s;
  const std::size_t h = static_cast<std::size_t>(rng.uniform_index(net.demand_trace.size()));
  s.hour_index = h + 1;
  s.nodal_demand.resize(net.num_nodes());
  for (std::size_t n = 0; n < net.num_nodes(); ++n) s.nodal_demand[n] = net.demand_trace[h] * net.node_weight[n];
  s.gen_status.resize(net.generators.size());
  for (std::size_t j = 0; j < net.generators.size(); ++j) {
    s.gen_status[j] = rng.bernoulli(net.generators[j].availability) ? 1 : 0;
  }
  return s;
}

SystemStateHL1 project_pattern1(const SystemStateHL2& upper) {
  return SystemStateHL1{upper.nodal_demand, upper.gen_status, upper.hour_index};
}

namespace {

// Sojourn length K >= 1 of a state left with probability p per hour,
// capped at `cap`. p == 0 means the state is never left.
std::size_t geometric_sojourn(double p, std::size_t cap, RngStream& rng) {
  if (p <= 0.0) return cap;
  const double k = 1.0 + std::floor(std::log(rng.uniform_pos()) / std::log1p(-p));
  if (!(k < static_cast<double>(cap))) return cap;
  return static_cast<std::size_t>(k);
}

// Calls down(first, last) for every maximal down interval [first, last).
template <class OnDown>
void unit_down_intervals(const ConventionalUnit& unit, std::size_t hours, RngStream& rng,
                         std::optional<bool> initially_up, OnDown&& down) {
  const double pf = unit.fail_probability();
  const double pr = unit.repair_probability();
  bool up = initially_up ? *initially_up : rng.bernoulli(unit.availability());
  std::size_t t = 0;
  while (t < hours) {
    const std::size_t len = geometric_sojourn(up ? pf : pr, hours - t, rng);
    if (!up) down(t, t + len);
    t += len;
    up = !up;
  }
}

}  // namespace

std::vector<std::uint8_t> simulate_unit(const ConventionalUnit& unit, std::size_t hours, RngStream& rng,
                                        std::optional<bool> initially_up) {
  std::vector<std::uint8_t> status(hours, 1);
  unit_down_intervals(unit, hours, rng, initially_up, [&](std::size_t a, std::size_t b) {
    std::fill(status.begin() + static_cast<std::ptrdiff_t>(a), status.begin() + static_cast<std::ptrdiff_t>(b), 0);
  });
  return status;
}

void sample_year_state(const StorageSystem& sys, RngStream& rng, YearState& out) {
  out.demand_year = static_cast<std::size_t>(rng.uniform_index(sys.demand.size()));
  out.wind_year = static_cast<std::size_t>(rng.uniform_index(sys.wind.size()));
  out.demand = sys.demand.years[out.demand_year];
  out.wind = sys.wind.years[out.wind_year];
  const std::size_t hours = out.demand.size();

  // Capacity lost per hour accumulated as a difference array.
  std::vector<double>& g = out.conventional;
  g.assign(hours + 1, 0.0);
  double installed = 0.0;
  for (const auto& unit : sys.portfolio) {
    installed += unit.capacity_mw;
    unit_down_intervals(unit, hours, rng, std::nullopt, [&](std::size_t a, std::size_t b) {
      g[a] += unit.capacity_mw;
      g[b] -= unit.capacity_mw;
    });
  }
  double lost = 0.0;
  for (std::size_t t = 0; t < hours; ++t) {
    lost += g[t];
    g[t] = std::max(0.0, installed - lost);
  }
  g.resize(hours);
}

YearState sample_year_state(const StorageSystem& sys, RngStream& rng) {
  YearState y;
  sample_year_state(sys, rng, y);
  return y;
}

}  // namespace adequacy
