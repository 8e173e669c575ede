#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace adequacy::solvers {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dense linear program with bounded variables and two-sided rows:
///
///   minimise  cost' x
///   subject to lower <= x <= upper,  row_lower <= A x <= row_upper.
///
/// A row with row_lower == row_upper is an equality. Bounds may be infinite.
struct BoundedLP {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> matrix;  // row-major, num_rows() x num_vars()
  std::vector<double> row_lower;
  std::vector<double> row_upper;

  BoundedLP() = default;
  explicit BoundedLP(std::size_t num_vars);

  std::size_t num_vars() const noexcept { return cost.size(); }
  std::size_t num_rows() const noexcept { return row_lower.size(); }

  double coeff(std::size_t row, std::size_t col) const { return matrix[row * num_vars() + col]; }
  std::span<const double> row(std::size_t r) const {
    return {matrix.data() + r * num_vars(), num_vars()};
  }

  void set_bounds(std::size_t j, double lo, double hi);
  std::size_t add_row(std::span<const double> coeffs, double lo, double hi);

  /// Throws std::invalid_argument on inconsistent dimensions or bounds.
  void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

std::string_view to_string(LpStatus status) noexcept;

enum class PivotRule {
  bland,    // smallest eligible index, always
  dantzig,  // largest reduced cost; falls back to Bland on degenerate stalls
};

struct LpOptions {
  PivotRule rule = PivotRule::dantzig;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  std::size_t max_iterations = 0;  // 0: automatic, scales with problem size
  std::size_t degenerate_switch = 30;
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> row_activity;
  std::vector<double> row_duals;      // y, with reduced cost d = c - A'y
  std::vector<double> reduced_costs;  // d for structural variables
  std::size_t iterations = 0;
};

/// Scratch buffers for the tableau. Reusing one workspace across solves of
/// similar size avoids reallocations; a workspace must not be shared between
/// threads.
class LpWorkspace {
 public:
  LpWorkspace() = default;

 private:
  friend class TableauSimplex;
  std::vector<double> tableau_;
  std::vector<double> reduced_;
  std::vector<double> values_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> cost_;
  std::vector<int> status_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> artificial_row_;
};

LpResult solve_lp(const BoundedLP& problem, LpWorkspace& workspace, const LpOptions& options = {});
LpResult solve_lp(const BoundedLP& problem, const LpOptions& options = {});

/// Optimality certificate computed from (x, y) alone, independent of the
/// tableau: primal bound/row violations, dual sign violations of d = c - A'y,
/// and the gap between c'x and the Lagrangian dual bound.
struct LpCertificate {
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double duality_gap = 0.0;  // c'x - dual bound, >= 0 up to rounding
};

LpCertificate certify_lp(const BoundedLP& problem, const LpResult& result, double active_tol = 1e-7);

}  // namespace adequacy::solvers
