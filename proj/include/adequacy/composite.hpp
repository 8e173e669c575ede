#pragma once

#include "adequacy/network.hpp"
#include "adequacy/sampling.hpp"
#include "adequacy/solvers/lp.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace adequacy {

/// Curtailment at or below this many MW counts as no curtailment.
inline constexpr double kCurtailmentTolerance = 1e-6;

class CompositeEvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CurtailmentResult {
  double total = 0.0;               // MW
  std::vector<double> per_island;  // in island_decomposition order
  solvers::LpStatus lp_status = solvers::LpStatus::optimal;
};

/// Connected components over in-service lines. Nodes are ascending within
/// an island and islands are ordered by their smallest node.
std::vector<std::vector<std::size_t>> island_decomposition(const Network& net,
                                                           std::span<const std::uint8_t> line_status);

struct InjectionMatrix {
  std::vector<std::size_t> nodes;  // island nodes, column order
  std::vector<std::size_t> lines;  // in-service lines inside the island, row order
  Eigen::MatrixXd m;               // flows = m * injections
};

/// M = D A (A'DA + 1/|N|)^-1 on one island, with |N| the island size and
/// 1/|N| added to every entry. Empty for a single-node island.
InjectionMatrix build_injection_matrix(const Network& net, std::span<const std::uint8_t> line_status,
                                       std::span<const std::size_t> island);

/// max(0, total demand - available capacity)
CurtailmentResult evaluate_hl1(const Network& net, const SystemStateHL1& state);
double hl1_curtailment(const Network& net, std::span<const double> nodal_demand,
                       std::span<const std::uint8_t> gen_status);

/// Evaluates HL2 states against one network. Holds the all-lines-up
/// injection matrix; scratch buffers are per thread, so one instance can be
/// shared by concurrent workers.
class CompositeSystem {
 public:
  explicit CompositeSystem(Network net, bool feasibility_shortcut = true);

  const Network& network() const noexcept { return net_; }

  /// Minimal total curtailment, island by island. Throws
  /// CompositeEvaluationError with a state dump if an LP does not solve.
  CurtailmentResult evaluate_hl2(const SystemStateHL2& state) const;
  CurtailmentResult evaluate_hl1(const SystemStateHL1& state) const { return adequacy::evaluate_hl1(net_, state); }

  /// The LP for one island, as solved by evaluate_hl2 (no shortcut).
  solvers::BoundedLP island_lp(const SystemStateHL2& state, const InjectionMatrix& inj) const;

 private:
  double solve_island(const SystemStateHL2& state, const InjectionMatrix& inj, solvers::LpStatus& status) const;

  Network net_;
  bool shortcut_;
  InjectionMatrix full_;
};

/// {X_PLC, X_EPNS}
std::array<double, 2> measure_outputs(const CurtailmentResult& c);

struct SnapshotRisk {
  double plc = 0.0;
  double epns = 0.0;  // MW
};

/// Exact HL1 risk: capacity table of all generators against every hour of
/// the demand trace, each hour equally likely.
SnapshotRisk copt_convolve(const Network& net, double step_mw = 1.0);

std::string dump_state(const SystemStateHL2& state);

}  // namespace adequacy
