#include "adequacy/storage.hpp"

#include "adequacy/composite.hpp"
#include "adequacy/copt.hpp"
#include "adequacy/solvers/qp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adequacy {

namespace {

void check_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": trace lengths differ");
}

void init_per_unit(UnitDispatch* per_unit, std::size_t units, std::size_t hours) {
  if (per_unit) per_unit->assign(units, std::vector<double>(hours, 0.0));
}

// Amounts x_i = clamp(a_i - T p_i, 0, cap_i) with the common level T chosen
// so that sum x_i = target. Requires 0 < target < sum cap_i. The sum is
// piecewise linear and nonincreasing in T, so T is found exactly by walking
// the breakpoints from the top.
void water_fill(std::span<const double> a, std::span<const double> p, std::span<const double> cap, double target,
                std::span<double> x, std::vector<double>& breaks) {
  const std::size_t n = a.size();
  breaks.clear();
  for (std::size_t i = 0; i < n; ++i) {
    if (cap[i] <= 0.0) continue;
    breaks.push_back(a[i] / p[i]);
    breaks.push_back((a[i] - cap[i]) / p[i]);
  }
  std::sort(breaks.begin(), breaks.end(), std::greater<>());
  auto total = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (cap[i] > 0.0) s += std::clamp(a[i] - t * p[i], 0.0, cap[i]);
    }
    return s;
  };
  double level = breaks.back();
  double prev_t = breaks.front();
  double prev_v = 0.0;
  for (std::size_t k = 1; k < breaks.size(); ++k) {
    const double t = breaks[k];
    if (t == prev_t) continue;
    const double v = total(t);
    if (v >= target) {
      level = prev_t - (target - prev_v) * (prev_t - t) / (v - prev_v);
      break;
    }
    prev_t = t;
    prev_v = v;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = cap[i] > 0.0 ? std::clamp(a[i] - level * p[i], 0.0, cap[i]) : 0.0;
    sum += x[i];
  }
  // put the rounding residual on a unit strictly inside its range
  const double residual = target - sum;
  for (std::size_t i = 0; i < n && residual != 0.0; ++i) {
    if (x[i] > 0.0 && x[i] < cap[i]) {
      x[i] = std::clamp(x[i] + residual, 0.0, cap[i]);
      break;
    }
  }
}

}  // namespace

void net_margin(std::span<const double> conventional, std::span<const double> wind, std::span<const double> demand,
                std::vector<double>& out) {
  check_same_length(conventional.size(), demand.size(), "net_margin");
  check_same_length(wind.size(), demand.size(), "net_margin");
  out.resize(demand.size());
  for (std::size_t t = 0; t < demand.size(); ++t) out[t] = conventional[t] + wind[t] - demand[t];
}

std::vector<double> net_margin(const YearState& year) {
  std::vector<double> m;
  net_margin(year.conventional, year.wind, year.demand, m);
  return m;
}

std::vector<double> dispatch_none(std::span<const double> margin) {
  return std::vector<double>(margin.size(), 0.0);
}

std::vector<double> dispatch_greedy(std::span<const double> margin, const std::vector<StorageUnit>& fleet,
                                    UnitDispatch* per_unit) {
  const std::size_t hours = margin.size();
  std::vector<std::size_t> order(fleet.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fleet[a].time_to_go() > fleet[b].time_to_go(); });
  init_per_unit(per_unit, fleet.size(), hours);

  std::vector<double> residual(margin.begin(), margin.end());
  std::vector<double> s(hours, 0.0);
  // A full unit can only act in deficit hours, so it jumps between them.
  std::vector<std::size_t> deficit;
  for (std::size_t u : order) {
    const StorageUnit& unit = fleet[u];
    deficit.clear();
    for (std::size_t t = 0; t < hours; ++t) {
      if (residual[t] < 0.0) deficit.push_back(t);
    }
    auto next_deficit = deficit.begin();
    double soc = unit.initial_soc;
    for (std::size_t t = 0; t < hours; ++t) {
      if (soc >= unit.e_bar) {
        next_deficit = std::lower_bound(next_deficit, deficit.end(), t);
        if (next_deficit == deficit.end()) break;
        t = *next_deficit;
      }
      double power = 0.0;
      if (residual[t] < 0.0) {
        power = -std::min({unit.p_bar, soc, -residual[t]});
      } else if (residual[t] > 0.0) {
        power = std::min({unit.p_bar, unit.e_bar - soc, residual[t]});
      }
      if (power == 0.0) continue;
      soc = power == unit.e_bar - soc ? unit.e_bar : std::clamp(soc + power, 0.0, unit.e_bar);
      residual[t] -= power;
      s[t] += power;
      if (per_unit) (*per_unit)[u][t] = power;
    }
  }
  return s;
}

std::vector<double> dispatch_optimal(std::span<const double> margin, const std::vector<StorageUnit>& fleet,
                                     UnitDispatch* per_unit) {
  const std::size_t hours = margin.size();
  const std::size_t n = fleet.size();
  init_per_unit(per_unit, n, hours);
  std::vector<double> soc(n), p(n), a(n), cap(n), x(n), breaks;
  for (std::size_t i = 0; i < n; ++i) {
    soc[i] = fleet[i].initial_soc;
    p[i] = fleet[i].p_bar;
  }
  std::vector<double> s(hours, 0.0);
  for (std::size_t t = 0; t < hours; ++t) {
    const double m = margin[t];
    if (m == 0.0) continue;
    const bool discharge = m < 0.0;
    double room = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (discharge) {
        cap[i] = std::min(p[i], soc[i]);
        a[i] = soc[i];
      } else {
        cap[i] = std::min(p[i], fleet[i].e_bar - soc[i]);
        a[i] = -soc[i];
      }
      cap[i] = std::max(cap[i], 0.0);
      room += cap[i];
    }
    if (room <= 0.0) continue;
    const double need = std::abs(m);
    if (need >= room) {
      std::copy(cap.begin(), cap.end(), x.begin());
    } else {
      water_fill(a, p, cap, need, x, breaks);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0.0) continue;
      const double power = discharge ? -x[i] : x[i];
      soc[i] = std::clamp(soc[i] + power, 0.0, fleet[i].e_bar);
      total += power;
      if (per_unit) (*per_unit)[i][t] = power;
    }
    s[t] = total;
  }
  return s;
}

std::vector<double> dispatch_average(std::size_t hours, std::span<const double> profile) {
  if (profile.size() != 24) throw std::invalid_argument("dispatch_average: profile must have 24 entries");
  std::vector<double> s(hours);
  for (std::size_t t = 0; t < hours; ++t) s[t] = profile[t % 24];
  return s;
}

std::vector<double> curtail_trace(std::span<const double> margin, std::span<const double> dispatch) {
  check_same_length(margin.size(), dispatch.size(), "curtail_trace");
  std::vector<double> c(margin.size());
  for (std::size_t t = 0; t < margin.size(); ++t) c[t] = std::max(0.0, dispatch[t] - margin[t]);
  return c;
}

AnnualRisk measure_outputs_annual(std::span<const double> curtailment) {
  AnnualRisk r;
  for (double c : curtailment) {
    if (c > kCurtailmentTolerance) r.lole += 1.0;
    if (c > 0.0) r.eens += c;
  }
  return r;
}

std::array<double, 24> mean_daily_profile(const TraceLibrary& demand) {
  std::array<double, 24> sum{};
  std::array<std::size_t, 24> count{};
  for (const auto& year : demand.years) {
    for (std::size_t t = 0; t < year.size(); ++t) {
      sum[t % 24] += year[t];
      ++count[t % 24];
    }
  }
  for (std::size_t h = 0; h < 24; ++h) {
    if (count[h] == 0) throw std::invalid_argument("mean_daily_profile: empty demand library");
    sum[h] /= static_cast<double>(count[h]);
  }
  return sum;
}

PeakShave peak_shave_profile(std::span<const double> d, double p_bar, double e_bar) {
  if (d.size() != 24) throw std::invalid_argument("peak_shave_profile: need 24 hourly demands");
  if (!(p_bar > 0.0) || !(e_bar > 0.0)) throw std::invalid_argument("peak_shave_profile: ratings must be positive");

  // x = (s_1..s_24, e_1..e_24); sum (d_h + s_h)^2 = s's + 2 d's + const
  solvers::BoxQP qp;
  qp.hessian = Eigen::MatrixXd::Zero(48, 48);
  qp.linear = Eigen::VectorXd::Zero(48);
  qp.lower.resize(48);
  qp.upper.resize(48);
  for (int h = 0; h < 24; ++h) {
    qp.hessian(h, h) = 2.0;
    qp.linear[h] = 2.0 * d[static_cast<std::size_t>(h)];
    qp.lower[h] = -p_bar;
    qp.upper[h] = p_bar;
    qp.lower[24 + h] = 0.0;
    qp.upper[24 + h] = e_bar;
  }
  qp.eq_matrix = Eigen::MatrixXd::Zero(24, 48);
  qp.eq_rhs = Eigen::VectorXd::Zero(24);
  for (int h = 0; h < 24; ++h) {
    const int next = (h + 1) % 24;  // e_{h+1} = e_h + s_h, wrapping to e_1 = e_24 + s_24
    qp.eq_matrix(h, 24 + next) = 1.0;
    qp.eq_matrix(h, 24 + h) = -1.0;
    qp.eq_matrix(h, h) = -1.0;
  }
  const solvers::QpResult r = solvers::solve_qp(qp);
  if (r.status != solvers::QpStatus::optimal) {
    throw std::runtime_error("peak_shave_profile: QP " + std::string(solvers::to_string(r.status)));
  }
  PeakShave out;
  for (int h = 0; h < 24; ++h) {
    out.power[static_cast<std::size_t>(h)] = r.x[h];
    out.energy[static_cast<std::size_t>(h)] = r.x[24 + h];
    const double v = d[static_cast<std::size_t>(h)] + r.x[h];
    out.objective += v * v;
  }
  out.kkt_residual = solvers::qp_kkt_residual(qp, r);
  return out;
}

AnnualRisk convolve_level0(const StorageSystem& sys, std::optional<std::span<const double>> profile, double step_mw) {
  if (profile && profile->size() != 24) throw std::invalid_argument("convolve_level0: profile must have 24 entries");
  std::vector<double> cap;
  std::vector<double> avail;
  for (const auto& u : sys.portfolio) {
    cap.push_back(u.capacity_mw);
    avail.push_back(u.availability());
  }
  const Copt copt(cap, avail, step_mw);
  AnnualRisk r;
  for (const auto& d : sys.demand.years) {
    for (const auto& w : sys.wind.years) {
      check_same_length(d.size(), w.size(), "convolve_level0");
      for (std::size_t t = 0; t < d.size(); ++t) {
        const double need = d[t] - w[t] + (profile ? (*profile)[t % 24] : 0.0);
        r.lole += copt.prob_below(need - kCurtailmentTolerance);
        r.eens += copt.expected_shortfall(need);
      }
    }
  }
  const auto pairs = static_cast<double>(sys.demand.size() * sys.wind.size());
  r.lole /= pairs;
  r.eens /= pairs;
  return r;
}

std::string_view to_string(StorageModel m) noexcept {
  switch (m) {
    case StorageModel::no_storage: return "no_storage";
    case StorageModel::average: return "average";
    case StorageModel::greedy: return "greedy";
    case StorageModel::optimal: return "optimal";
  }
  return "unknown";
}

StorageStudy::StorageStudy(StorageSystem sys) : sys_(std::move(sys)) {
  sys_.validate();
  double p = 0.0;
  double e = 0.0;
  for (const auto& u : sys_.fleet) {
    p += u.p_bar;
    e += u.e_bar;
  }
  const auto profile = mean_daily_profile(sys_.demand);
  shave_ = peak_shave_profile(profile, p, e);
}

AnnualRisk StorageStudy::evaluate_margin(StorageModel model, std::span<const double> margin) const {
  thread_local std::vector<double> curtailment;
  const std::size_t hours = margin.size();
  curtailment.resize(hours);
  switch (model) {
    case StorageModel::no_storage:
      for (std::size_t t = 0; t < hours; ++t) curtailment[t] = std::max(0.0, -margin[t]);
      break;
    case StorageModel::average:
      for (std::size_t t = 0; t < hours; ++t) curtailment[t] = std::max(0.0, shave_.power[t % 24] - margin[t]);
      break;
    case StorageModel::greedy: {
      const auto s = dispatch_greedy(margin, sys_.fleet);
      for (std::size_t t = 0; t < hours; ++t) curtailment[t] = std::max(0.0, s[t] - margin[t]);
      break;
    }
    case StorageModel::optimal: {
      const auto s = dispatch_optimal(margin, sys_.fleet);
      for (std::size_t t = 0; t < hours; ++t) curtailment[t] = std::max(0.0, s[t] - margin[t]);
      break;
    }
  }
  return measure_outputs_annual(curtailment);
}

AnnualRisk StorageStudy::evaluate(StorageModel model, const YearState& year) const {
  thread_local std::vector<double> margin;
  net_margin(year.conventional, year.wind, year.demand, margin);
  return evaluate_margin(model, margin);
}

std::pair<AnnualRisk, AnnualRisk> StorageStudy::evaluate_pair(StorageModel upper, StorageModel lower,
                                                              const YearState& year) const {
  thread_local std::vector<double> margin;
  net_margin(year.conventional, year.wind, year.demand, margin);
  return {evaluate_margin(upper, margin), evaluate_margin(lower, margin)};
}

AnnualRisk StorageStudy::level0_expectation(StorageModel model, double step_mw) const {
  switch (model) {
    case StorageModel::no_storage: return convolve_level0(sys_, std::nullopt, step_mw);
    case StorageModel::average: return convolve_level0(sys_, std::span<const double>(shave_.power), step_mw);
    default: throw std::invalid_argument("level0_expectation: only no_storage and average have a closed form");
  }
}

}  // namespace adequacy
