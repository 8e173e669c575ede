#include "adequacy/composite.hpp"

#include "adequacy/copt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace adequacy {

using solvers::BoundedLP;
using solvers::LpStatus;

namespace {

constexpr double kLpNoise = 1e-7;  // MW; LP round-off below this is reported as zero
constexpr double kFlowSlack = 1e-9;

bool all_up(std::span<const std::uint8_t> s) {
  return std::all_of(s.begin(), s.end(), [](std::uint8_t v) { return v != 0; });
}

}  // namespace

std::vector<std::vector<std::size_t>> island_decomposition(const Network& net,
                                                           std::span<const std::uint8_t> line_status) {
  const std::size_t n = net.num_nodes();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t k = 0; k < net.lines.size(); ++k) {
    if (!line_status[k]) continue;
    const std::size_t a = find(net.lines[k].from);
    const std::size_t b = find(net.lines[k].to);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<std::size_t>> islands;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(islands.size());
      islands.emplace_back();
    }
    islands[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return islands;
}

InjectionMatrix build_injection_matrix(const Network& net, std::span<const std::uint8_t> line_status,
                                       std::span<const std::size_t> island) {
  InjectionMatrix out;
  out.nodes.assign(island.begin(), island.end());
  const auto nn = static_cast<Eigen::Index>(island.size());
  if (nn <= 1) {
    out.m.resize(0, nn);
    return out;
  }
  std::vector<std::ptrdiff_t> col(net.num_nodes(), -1);
  for (Eigen::Index i = 0; i < nn; ++i) col[island[static_cast<std::size_t>(i)]] = i;
  for (std::size_t k = 0; k < net.lines.size(); ++k) {
    if (line_status[k] && col[net.lines[k].from] >= 0 && col[net.lines[k].to] >= 0) out.lines.push_back(k);
  }
  const auto nl = static_cast<Eigen::Index>(out.lines.size());

  // D A has row k = (+1 at from, -1 at to) / x_k
  Eigen::MatrixXd da = Eigen::MatrixXd::Zero(nl, nn);
  Eigen::MatrixXd b = Eigen::MatrixXd::Constant(nn, nn, 1.0 / static_cast<double>(nn));
  for (Eigen::Index r = 0; r < nl; ++r) {
    const Line& line = net.lines[out.lines[static_cast<std::size_t>(r)]];
    const double y = 1.0 / line.reactance_pu;
    const Eigen::Index i = col[line.from];
    const Eigen::Index j = col[line.to];
    da(r, i) = y;
    da(r, j) = -y;
    b(i, i) += y;
    b(j, j) += y;
    b(i, j) -= y;
    b(j, i) -= y;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success) {
    throw CompositeEvaluationError("build_injection_matrix: regularised susceptance matrix is singular");
  }
  // M = DA B^-1, i.e. M' = B^-1 (DA)' since B is symmetric
  out.m = llt.solve(da.transpose()).transpose();
  return out;
}

double hl1_curtailment(const Network& net, std::span<const double> nodal_demand,
                       std::span<const std::uint8_t> gen_status) {
  double shortfall = 0.0;
  for (double d : nodal_demand) shortfall += d;
  for (std::size_t j = 0; j < net.generators.size(); ++j) {
    if (gen_status[j]) shortfall -= net.generators[j].capacity_mw;
  }
  return std::max(0.0, shortfall);
}

CurtailmentResult evaluate_hl1(const Network& net, const SystemStateHL1& state) {
  CurtailmentResult r;
  r.total = hl1_curtailment(net, state.nodal_demand, state.gen_status);
  r.per_island = {r.total};
  return r;
}

CompositeSystem::CompositeSystem(Network net, bool feasibility_shortcut)
    : net_(std::move(net)), shortcut_(feasibility_shortcut) {
  net_.validate();
  const std::vector<std::uint8_t> up(net_.lines.size(), 1);
  std::vector<std::size_t> everything(net_.num_nodes());
  std::iota(everything.begin(), everything.end(), 0);
  full_ = build_injection_matrix(net_, up, everything);
}

BoundedLP CompositeSystem::island_lp(const SystemStateHL2& state, const InjectionMatrix& inj) const {
  const std::size_t nn = inj.nodes.size();
  std::vector<double> gen_cap(net_.num_nodes(), 0.0);
  for (std::size_t j = 0; j < net_.generators.size(); ++j) {
    if (state.gen_status[j]) gen_cap[net_.generators[j].node] += net_.generators[j].capacity_mw;
  }

  // Columns: aggregated generation per bus with capacity, then curtailment
  // per bus with demand. Buses without either contribute only constants.
  std::vector<std::ptrdiff_t> g_col(nn, -1);
  std::vector<std::ptrdiff_t> c_col(nn, -1);
  std::size_t cols = 0;
  for (std::size_t i = 0; i < nn; ++i) {
    if (gen_cap[inj.nodes[i]] > 0.0) g_col[i] = static_cast<std::ptrdiff_t>(cols++);
  }
  for (std::size_t i = 0; i < nn; ++i) {
    if (state.nodal_demand[inj.nodes[i]] > 0.0) c_col[i] = static_cast<std::ptrdiff_t>(cols++);
  }

  BoundedLP lp(cols);
  double demand = 0.0;
  for (std::size_t i = 0; i < nn; ++i) {
    const double d = state.nodal_demand[inj.nodes[i]];
    demand += d;
    if (g_col[i] >= 0) lp.set_bounds(static_cast<std::size_t>(g_col[i]), 0.0, gen_cap[inj.nodes[i]]);
    if (c_col[i] >= 0) {
      lp.set_bounds(static_cast<std::size_t>(c_col[i]), 0.0, d);
      lp.cost[static_cast<std::size_t>(c_col[i])] = 1.0;
    }
  }

  std::vector<double> row(cols, 1.0);
  lp.add_row(row, demand, demand);
  for (std::size_t r = 0; r < inj.lines.size(); ++r) {
    std::fill(row.begin(), row.end(), 0.0);
    double offset = 0.0;  // flow caused by the demand alone
    for (std::size_t i = 0; i < nn; ++i) {
      const double mk = inj.m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i));
      if (g_col[i] >= 0) row[static_cast<std::size_t>(g_col[i])] = mk;
      if (c_col[i] >= 0) row[static_cast<std::size_t>(c_col[i])] = mk;
      offset += mk * state.nodal_demand[inj.nodes[i]];
    }
    const double f = net_.scaled_rating(inj.lines[r]);
    lp.add_row(row, offset - f, offset + f);
  }
  return lp;
}

double CompositeSystem::solve_island(const SystemStateHL2& state, const InjectionMatrix& inj,
                                     LpStatus& status) const {
  double demand = 0.0;
  double cap = 0.0;
  for (std::size_t n : inj.nodes) demand += state.nodal_demand[n];
  for (std::size_t j = 0; j < net_.generators.size(); ++j) {
    if (!state.gen_status[j]) continue;
    const std::size_t node = net_.generators[j].node;
    if (std::binary_search(inj.nodes.begin(), inj.nodes.end(), node)) cap += net_.generators[j].capacity_mw;
  }
  if (inj.nodes.size() == 1 || demand <= 0.0) return std::max(0.0, demand - cap);

  if (shortcut_ && cap >= demand) {
    // Proportional dispatch: if it respects every line limit the optimum is 0.
    thread_local Eigen::VectorXd injection;
    thread_local std::vector<double> node_cap;
    node_cap.assign(net_.num_nodes(), 0.0);
    for (std::size_t j = 0; j < net_.generators.size(); ++j) {
      if (state.gen_status[j]) node_cap[net_.generators[j].node] += net_.generators[j].capacity_mw;
    }
    const double share = demand / cap;
    injection.resize(static_cast<Eigen::Index>(inj.nodes.size()));
    for (std::size_t i = 0; i < inj.nodes.size(); ++i) {
      injection[static_cast<Eigen::Index>(i)] = node_cap[inj.nodes[i]] * share - state.nodal_demand[inj.nodes[i]];
    }
    bool ok = true;
    for (std::size_t r = 0; r < inj.lines.size() && ok; ++r) {
      const double flow = inj.m.row(static_cast<Eigen::Index>(r)).dot(injection);
      ok = std::abs(flow) <= net_.scaled_rating(inj.lines[r]) + kFlowSlack;
    }
    if (ok) return 0.0;
  }

  const BoundedLP lp = island_lp(state, inj);
  thread_local solvers::LpWorkspace workspace;
  const solvers::LpResult res = solvers::solve_lp(lp, workspace);
  status = res.status;
  if (res.status != LpStatus::optimal) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.cost[j] != 0.0) total += res.x[j];
  }
  total = std::max(total, demand - cap);  // never below the island's generation deficit
  return total < kLpNoise ? 0.0 : total;
}

CurtailmentResult CompositeSystem::evaluate_hl2(const SystemStateHL2& state) const {
  if (state.nodal_demand.size() != net_.num_nodes() || state.gen_status.size() != net_.generators.size() ||
      state.line_status.size() != net_.lines.size()) {
    throw CompositeEvaluationError("evaluate_hl2: state does not match the network; " + dump_state(state));
  }
  CurtailmentResult out;
  auto run = [&](const InjectionMatrix& inj) {
    LpStatus status = LpStatus::optimal;
    const double c = solve_island(state, inj, status);
    if (status != LpStatus::optimal) {
      out.lp_status = status;
      throw CompositeEvaluationError("evaluate_hl2: island LP " + std::string(solvers::to_string(status)) + "; " +
                                     dump_state(state));
    }
    out.per_island.push_back(c);
    out.total += c;
  };
  if (all_up(state.line_status)) {
    run(full_);
    return out;
  }
  for (const auto& island : island_decomposition(net_, state.line_status)) {
    run(build_injection_matrix(net_, state.line_status, island));
  }
  return out;
}

std::array<double, 2> measure_outputs(const CurtailmentResult& c) {
  return {c.total > kCurtailmentTolerance ? 1.0 : 0.0, std::max(0.0, c.total)};
}

SnapshotRisk copt_convolve(const Network& net, double step_mw) {
  std::vector<double> cap;
  std::vector<double> avail;
  for (const auto& g : net.generators) {
    cap.push_back(g.capacity_mw);
    avail.push_back(g.availability);
  }
  const Copt copt(cap, avail, step_mw);
  SnapshotRisk r;
  for (double d : net.demand_trace) {
    r.plc += copt.prob_below(d - kCurtailmentTolerance);
    r.epns += copt.expected_shortfall(d);
  }
  const auto hours = static_cast<double>(net.demand_trace.size());
  r.plc /= hours;
  r.epns /= hours;
  return r;
}

std::string dump_state(const SystemStateHL2& state) {
  std::ostringstream os;
  os << "state{hour=" << state.hour_index << ", gen_status=";
  for (auto s : state.gen_status) os << static_cast<int>(s);
  os << ", line_status=";
  for (auto s : state.line_status) os << static_cast<int>(s);
  os << "}";
  return os.str();
}

}  // namespace adequacy
