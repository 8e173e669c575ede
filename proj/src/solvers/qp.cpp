#include "adequacy/solvers/qp.hpp"

#include "adequacy/solvers/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace adequacy::solvers {

void BoxQP::validate() const {
  const Eigen::Index n = num_vars();
  if (hessian.rows() != n || hessian.cols() != n || lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("BoxQP: dimensions do not match the variable count");
  }
  if (eq_matrix.rows() != eq_rhs.size() || (eq_matrix.rows() > 0 && eq_matrix.cols() != n)) {
    throw std::invalid_argument("BoxQP: equality rows do not match");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(lower[j] <= upper[j])) throw std::invalid_argument("BoxQP: lower bound above upper bound");
  }
  if (!hessian.allFinite() || !linear.allFinite() || !eq_matrix.allFinite() || !eq_rhs.allFinite()) {
    throw std::invalid_argument("BoxQP: non-finite data");
  }
  const double scale = std::max(1.0, hessian.cwiseAbs().maxCoeff());
  if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("BoxQP: Hessian is not symmetric");
  }
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
      throw std::invalid_argument("BoxQP: Hessian is not positive semidefinite");
    }
  }
}

double BoxQP::objective(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(hessian * x) + linear.dot(x);
}

std::string_view to_string(QpStatus status) noexcept {
  switch (status) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::infeasible: return "infeasible";
    case QpStatus::unbounded: return "unbounded";
    case QpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

enum class Bound { free, lower, upper, fixed };

Eigen::VectorXd feasible_start(const BoxQP& p, bool& ok) {
  const auto n = static_cast<std::size_t>(p.num_vars());
  BoundedLP lp(n);
  for (std::size_t j = 0; j < n; ++j) lp.set_bounds(j, p.lower[j], p.upper[j]);
  std::vector<double> row(n);
  for (Eigen::Index i = 0; i < p.num_eq(); ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = p.eq_matrix(i, static_cast<Eigen::Index>(j));
    lp.add_row(row, p.eq_rhs[i], p.eq_rhs[i]);
  }
  const LpResult r = solve_lp(lp);
  ok = r.status == LpStatus::optimal;
  Eigen::VectorXd x(p.num_vars());
  for (std::size_t j = 0; j < n; ++j) x[static_cast<Eigen::Index>(j)] = r.x[j];
  return x;
}

Eigen::MatrixXd columns(const Eigen::MatrixXd& a, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
  return out;
}

}  // namespace

QpResult solve_qp(const BoxQP& p, const QpOptions& options) {
  p.validate();
  const Eigen::Index n = p.num_vars();
  const Eigen::Index m = p.num_eq();
  QpResult result;

  bool ok = false;
  Eigen::VectorXd x = feasible_start(p, ok);
  if (!ok) {
    result.x = x;
    result.status = QpStatus::infeasible;
    return result;
  }

  const double tol = options.tolerance;
  std::vector<Bound> state(static_cast<std::size_t>(n), Bound::free);
  for (Eigen::Index j = 0; j < n; ++j) {
    auto& s = state[static_cast<std::size_t>(j)];
    if (p.lower[j] == p.upper[j]) {
      s = Bound::fixed;
      x[j] = p.lower[j];
    } else if (std::isfinite(p.lower[j]) && std::abs(x[j] - p.lower[j]) <= tol * (1.0 + std::abs(p.lower[j]))) {
      s = Bound::lower;
      x[j] = p.lower[j];
    } else if (std::isfinite(p.upper[j]) && std::abs(x[j] - p.upper[j]) <= tol * (1.0 + std::abs(p.upper[j]))) {
      s = Bound::upper;
      x[j] = p.upper[j];
    }
  }

  const int max_iter = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(50 * (n + m) + 100);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Index> free_idx;

  for (int iter = 0;; ++iter) {
    if (iter >= max_iter) {
      result.status = QpStatus::iteration_limit;
      break;
    }
    result.iterations = iter + 1;

    free_idx.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (state[static_cast<std::size_t>(j)] == Bound::free) free_idx.push_back(j);
    }
    const auto f = static_cast<Eigen::Index>(free_idx.size());
    const Eigen::VectorXd grad = p.hessian * x + p.linear;
    const double grad_scale = 1.0 + grad.cwiseAbs().maxCoeff();

    // Null space of the equality rows restricted to the free variables.
    Eigen::MatrixXd z;
    Eigen::MatrixXd ef;
    if (m > 0 && f > 0) {
      ef = columns(p.eq_matrix, free_idx);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(ef, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      const double smax = sv.size() > 0 ? sv[0] : 0.0;
      Eigen::Index rank = 0;
      for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv[k] > 1e-12 * std::max<double>(1.0, smax) * static_cast<double>(std::max(m, f))) ++rank;
      }
      z = svd.matrixV().rightCols(f - rank);
    } else {
      z = Eigen::MatrixXd::Identity(f, f);
    }

    Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
    bool ray = false;
    if (z.cols() > 0) {
      Eigen::VectorXd grad_f(f);
      for (Eigen::Index k = 0; k < f; ++k) grad_f[k] = grad[free_idx[static_cast<std::size_t>(k)]];
      const Eigen::MatrixXd hf = columns(columns(p.hessian, free_idx).transpose(), free_idx);
      const Eigen::MatrixXd hr = z.transpose() * hf * z;
      const Eigen::VectorXd gz = z.transpose() * grad_f;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (hr + hr.transpose()));
      const auto& ev = eig.eigenvalues();
      const auto& u = eig.eigenvectors();
      const double etol = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
      Eigen::VectorXd pz = Eigen::VectorXd::Zero(z.cols());
      Eigen::VectorXd flat = Eigen::VectorXd::Zero(z.cols());
      for (Eigen::Index k = 0; k < ev.size(); ++k) {
        const double c = u.col(k).dot(gz);
        if (ev[k] > etol) {
          pz -= u.col(k) * (c / ev[k]);
        } else {
          flat += u.col(k) * c;
        }
      }
      if (flat.cwiseAbs().maxCoeff() > tol * grad_scale) {
        // zero-curvature descent direction: move along it until a bound blocks
        pz = -flat;
        ray = true;
      }
      const Eigen::VectorXd pf = z * pz;
      for (Eigen::Index k = 0; k < f; ++k) step[free_idx[static_cast<std::size_t>(k)]] = pf[k];
    }

    const double x_scale = 1.0 + x.cwiseAbs().maxCoeff();
    if (!ray && step.cwiseAbs().maxCoeff() <= tol * x_scale) {
      // Stationary on the working set: check multiplier signs.
      if (m > 0) {
        if (f > 0) {
          Eigen::VectorXd grad_f(f);
          for (Eigen::Index k = 0; k < f; ++k) grad_f[k] = grad[free_idx[static_cast<std::size_t>(k)]];
          lambda = ef.transpose().completeOrthogonalDecomposition().solve(grad_f);
        } else {
          lambda.setZero();
        }
      }
      mu = grad - (m > 0 ? Eigen::VectorXd(p.eq_matrix.transpose() * lambda) : Eigen::VectorXd::Zero(n));
      for (Eigen::Index j : free_idx) mu[j] = 0.0;
      std::ptrdiff_t release = -1;
      double worst = 1e-9 * grad_scale;
      for (Eigen::Index j = 0; j < n; ++j) {
        const Bound s = state[static_cast<std::size_t>(j)];
        double viol = 0.0;
        if (s == Bound::lower) viol = -mu[j];
        if (s == Bound::upper) viol = mu[j];
        if (viol > worst) {
          worst = viol;
          release = j;
        }
      }
      if (release < 0) {
        result.status = QpStatus::optimal;
        break;
      }
      state[static_cast<std::size_t>(release)] = Bound::free;
      continue;
    }

    double alpha = ray ? std::numeric_limits<double>::infinity() : 1.0;
    std::ptrdiff_t block = -1;
    for (Eigen::Index j : free_idx) {
      const double d = step[j];
      double lim = std::numeric_limits<double>::infinity();
      if (d < 0.0 && std::isfinite(p.lower[j])) lim = (x[j] - p.lower[j]) / -d;
      if (d > 0.0 && std::isfinite(p.upper[j])) lim = (p.upper[j] - x[j]) / d;
      lim = std::max(lim, 0.0);
      if (lim < alpha) {
        alpha = lim;
        block = j;
      }
    }
    if (!std::isfinite(alpha)) {
      result.status = QpStatus::unbounded;
      break;
    }
    x += alpha * step;
    if (block >= 0) {
      const bool at_lower = step[block] < 0.0;
      state[static_cast<std::size_t>(block)] = at_lower ? Bound::lower : Bound::upper;
      x[block] = at_lower ? p.lower[block] : p.upper[block];
    }
  }

  // Remove the equality residual left by the LP start and accumulated steps,
  // using the free variables only.
  if (m > 0 && !free_idx.empty()) {
    const Eigen::VectorXd r = p.eq_rhs - p.eq_matrix * x;
    const Eigen::MatrixXd ef = columns(p.eq_matrix, free_idx);
    const Eigen::VectorXd dx = ef.completeOrthogonalDecomposition().solve(r);
    for (std::size_t k = 0; k < free_idx.size(); ++k) {
      const Eigen::Index j = free_idx[k];
      x[j] = std::clamp(x[j] + dx[static_cast<Eigen::Index>(k)], p.lower[j], p.upper[j]);
    }
  }

  result.x = x;
  result.objective = p.objective(x);
  result.eq_multipliers = lambda;
  result.bound_multipliers = mu;
  return result;
}

double qp_kkt_residual(const BoxQP& p, const QpResult& r) {
  const Eigen::Index n = p.num_vars();
  const Eigen::VectorXd& x = r.x;
  const double x_inf = n > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
  const double h_inf = n > 0 ? p.hessian.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  const double g_inf = n > 0 ? p.linear.cwiseAbs().maxCoeff() : 0.0;
  const double grad_scale = 1.0 + g_inf + h_inf * x_inf;

  Eigen::VectorXd resid = p.hessian * x + p.linear - r.bound_multipliers;
  if (p.num_eq() > 0) resid -= p.eq_matrix.transpose() * r.eq_multipliers;
  double worst = n > 0 ? resid.cwiseAbs().maxCoeff() / grad_scale : 0.0;

  if (p.num_eq() > 0) {
    const double e_scale = 1.0 + p.eq_rhs.cwiseAbs().maxCoeff() + p.eq_matrix.cwiseAbs().maxCoeff() * x_inf;
    worst = std::max(worst, (p.eq_matrix * x - p.eq_rhs).cwiseAbs().maxCoeff() / e_scale);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lo = p.lower[j];
    const double hi = p.upper[j];
    worst = std::max({worst, (lo - x[j]) / (1.0 + std::abs(lo)), (x[j] - hi) / (1.0 + std::abs(hi))});
    const bool at_lo = std::isfinite(lo) && std::abs(x[j] - lo) <= 1e-9 * (1.0 + std::abs(lo));
    const bool at_hi = std::isfinite(hi) && std::abs(x[j] - hi) <= 1e-9 * (1.0 + std::abs(hi));
    const double m = r.bound_multipliers[j];
    double viol = 0.0;
    if (at_lo && at_hi) {
      viol = 0.0;
    } else if (at_lo) {
      viol = std::max(0.0, -m);
    } else if (at_hi) {
      viol = std::max(0.0, m);
    } else {
      viol = std::abs(m);
    }
    worst = std::max(worst, viol / grad_scale);
  }
  return worst;
}

}  // namespace adequacy::solvers
