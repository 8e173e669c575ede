#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>

namespace adequacy::solvers {

/// Convex quadratic program with box bounds and equality rows:
///
///   minimise  0.5 x'Hx + g'x
///   subject to lower <= x <= upper,  E x = e.
struct BoxQP {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::MatrixXd eq_matrix;  // may have zero rows
  Eigen::VectorXd eq_rhs;

  Eigen::Index num_vars() const { return linear.size(); }
  Eigen::Index num_eq() const { return eq_matrix.rows(); }

  /// Throws std::invalid_argument on bad dimensions, inverted bounds or a
  /// Hessian that is not symmetric positive semidefinite.
  void validate() const;
  double objective(const Eigen::VectorXd& x) const;
};

enum class QpStatus { optimal, infeasible, unbounded, iteration_limit };

std::string_view to_string(QpStatus status) noexcept;

struct QpOptions {
  double tolerance = 1e-10;
  int max_iterations = 0;  // 0: automatic
};

struct QpResult {
  QpStatus status = QpStatus::infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd eq_multipliers;     // lambda, with Hx + g = E'lambda + mu
  Eigen::VectorXd bound_multipliers;  // mu: >= 0 at lower, <= 0 at upper
  int iterations = 0;
};

/// Primal active-set method. Equalities are handled in the null space of the
/// rows restricted to the free variables, so redundant rows are harmless.
QpResult solve_qp(const BoxQP& problem, const QpOptions& options = {});

/// Largest of stationarity, primal infeasibility, multiplier sign and
/// complementarity violations, each scaled by 1 + the size of the data it
/// involves.
double qp_kkt_residual(const BoxQP& problem, const QpResult& result);

}  // namespace adequacy::solvers
