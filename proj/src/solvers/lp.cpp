#include "adequacy/solvers/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace adequacy::solvers {

BoundedLP::BoundedLP(std::size_t num_vars)
    : cost(num_vars, 0.0), lower(num_vars, 0.0), upper(num_vars, kInfinity) {}

void BoundedLP::set_bounds(std::size_t j, double lo, double hi) {
  lower.at(j) = lo;
  upper.at(j) = hi;
}

std::size_t BoundedLP::add_row(std::span<const double> coeffs, double lo, double hi) {
  if (coeffs.size() != num_vars()) {
    throw std::invalid_argument("BoundedLP::add_row: coefficient count does not match variable count");
  }
  matrix.insert(matrix.end(), coeffs.begin(), coeffs.end());
  row_lower.push_back(lo);
  row_upper.push_back(hi);
  return row_lower.size() - 1;
}

void BoundedLP::validate() const {
  const std::size_t n = num_vars();
  if (lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("BoundedLP: bound vectors do not match variable count");
  }
  if (row_upper.size() != row_lower.size() || matrix.size() != n * row_lower.size()) {
    throw std::invalid_argument("BoundedLP: row dimensions do not match");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] || lower[j] == kInfinity ||
        upper[j] == -kInfinity) {
      throw std::invalid_argument("BoundedLP: inconsistent bounds on variable " + std::to_string(j));
    }
    if (!std::isfinite(cost[j])) {
      throw std::invalid_argument("BoundedLP: non-finite cost on variable " + std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < row_lower.size(); ++i) {
    if (std::isnan(row_lower[i]) || std::isnan(row_upper[i]) || row_lower[i] > row_upper[i] ||
        row_lower[i] == kInfinity || row_upper[i] == -kInfinity) {
      throw std::invalid_argument("BoundedLP: inconsistent bounds on row " + std::to_string(i));
    }
  }
  for (double a : matrix) {
    if (!std::isfinite(a)) throw std::invalid_argument("BoundedLP: non-finite matrix entry");
  }
}

std::string_view to_string(LpStatus status) noexcept {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

enum : int { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFree = 3 };

constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;

}  // namespace

// Bounded-variable primal simplex on a dense tableau. Columns are the
// structural variables, one activity variable per row (A x - s = 0), and one
// artificial per row whose initial activity falls outside its bounds.
class TableauSimplex {
 public:
  TableauSimplex(const BoundedLP& p, LpWorkspace& ws, const LpOptions& opt)
      : p_(p), ws_(ws), opt_(opt), n_(p.num_vars()), m_(p.num_rows()) {}

  LpResult run() {
    setup();
    LpResult result;
    result.x.assign(n_, 0.0);

    if (num_artificial_ > 0) {
      std::fill(ws_.cost_.begin(), ws_.cost_.end(), 0.0);
      for (std::size_t k = 0; k < num_artificial_; ++k) ws_.cost_[n_ + m_ + k] = 1.0;
      compute_reduced_costs();
      const LpStatus s1 = iterate();
      if (s1 == LpStatus::iteration_limit) return finish(result, s1);
      recompute_basic_values();
      double infeas = 0.0;
      for (std::size_t k = 0; k < num_artificial_; ++k) infeas += ws_.values_[n_ + m_ + k];
      if (infeas > opt_.feasibility_tol * (1.0 + rhs_scale_)) return finish(result, LpStatus::infeasible);
      retire_artificials();
    }

    std::fill(ws_.cost_.begin(), ws_.cost_.end(), 0.0);
    std::copy(p_.cost.begin(), p_.cost.end(), ws_.cost_.begin());
    compute_reduced_costs();
    const LpStatus s2 = iterate();
    recompute_basic_values();
    return finish(result, s2);
  }

 private:
  double& T(std::size_t i, std::size_t j) { return ws_.tableau_[i * cols_ + j]; }

  void setup() {
    // Nonbasic starting values for the structural columns.
    std::vector<double> x0(n_, 0.0);
    std::vector<int> st0(n_, kFree);
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(p_.lower[j])) {
        x0[j] = p_.lower[j];
        st0[j] = kAtLower;
      } else if (std::isfinite(p_.upper[j])) {
        x0[j] = p_.upper[j];
        st0[j] = kAtUpper;
      }
    }

    rhs_scale_ = 0.0;
    std::vector<double> activity(m_, 0.0);
    ws_.artificial_row_.clear();
    std::vector<double> target(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < n_; ++j) v += p_.coeff(i, j) * x0[j];
      activity[i] = v;
      rhs_scale_ = std::max(rhs_scale_, std::abs(v));
      if (std::isfinite(p_.row_lower[i])) rhs_scale_ = std::max(rhs_scale_, std::abs(p_.row_lower[i]));
      if (std::isfinite(p_.row_upper[i])) rhs_scale_ = std::max(rhs_scale_, std::abs(p_.row_upper[i]));
      if (v < p_.row_lower[i] - opt_.feasibility_tol) {
        target[i] = p_.row_lower[i];
        ws_.artificial_row_.push_back(i);
      } else if (v > p_.row_upper[i] + opt_.feasibility_tol) {
        target[i] = p_.row_upper[i];
        ws_.artificial_row_.push_back(i);
      }
    }
    num_artificial_ = ws_.artificial_row_.size();
    cols_ = n_ + m_ + num_artificial_;

    ws_.tableau_.assign(m_ * cols_, 0.0);
    ws_.reduced_.assign(cols_, 0.0);
    ws_.values_.assign(cols_, 0.0);
    ws_.lo_.assign(cols_, 0.0);
    ws_.hi_.assign(cols_, 0.0);
    ws_.cost_.assign(cols_, 0.0);
    ws_.status_.assign(cols_, kAtLower);
    ws_.basis_.assign(m_, 0);

    for (std::size_t j = 0; j < n_; ++j) {
      ws_.lo_[j] = p_.lower[j];
      ws_.hi_[j] = p_.upper[j];
      ws_.values_[j] = x0[j];
      ws_.status_[j] = st0[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      ws_.lo_[n_ + i] = p_.row_lower[i];
      ws_.hi_[n_ + i] = p_.row_upper[i];
    }

    std::vector<std::ptrdiff_t> art_of_row(m_, -1);
    for (std::size_t k = 0; k < num_artificial_; ++k) {
      art_of_row[ws_.artificial_row_[k]] = static_cast<std::ptrdiff_t>(k);
      ws_.lo_[n_ + m_ + k] = 0.0;
      ws_.hi_[n_ + m_ + k] = kInfinity;
    }

    for (std::size_t i = 0; i < m_; ++i) {
      double* row = &T(i, 0);
      for (std::size_t j = 0; j < n_; ++j) row[j] = p_.coeff(i, j);
      row[n_ + i] = -1.0;
      const std::size_t slack = n_ + i;
      if (art_of_row[i] < 0) {
        // activity variable basic; divide the row by its coefficient -1
        for (std::size_t j = 0; j < cols_; ++j) row[j] = -row[j];
        ws_.basis_[i] = slack;
        ws_.status_[slack] = kBasic;
        ws_.values_[slack] = activity[i];
      } else {
        const std::size_t art = n_ + m_ + static_cast<std::size_t>(art_of_row[i]);
        const double sigma = target[i] >= activity[i] ? 1.0 : -1.0;
        row[art] = sigma;
        for (std::size_t j = 0; j < cols_; ++j) row[j] /= sigma;
        ws_.basis_[i] = art;
        ws_.status_[art] = kBasic;
        ws_.values_[art] = std::abs(target[i] - activity[i]);
        ws_.values_[slack] = target[i];
        ws_.status_[slack] = (target[i] == p_.row_lower[i]) ? kAtLower : kAtUpper;
      }
    }

    max_iterations_ = opt_.max_iterations > 0 ? opt_.max_iterations : 100 * (n_ + m_) + 1000;
    iterations_ = 0;
  }

  void compute_reduced_costs() {
    auto& d = ws_.reduced_;
    std::copy(ws_.cost_.begin(), ws_.cost_.end(), d.begin());
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = ws_.cost_[ws_.basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &T(i, 0);
      for (std::size_t j = 0; j < cols_; ++j) d[j] -= cb * row[j];
    }
    for (std::size_t i = 0; i < m_; ++i) d[ws_.basis_[i]] = 0.0;
  }

  void recompute_basic_values() {
    // A_full x = 0, so each basic value is minus the tableau row applied to
    // the nonbasic values.
    for (std::size_t i = 0; i < m_; ++i) {
      const double* row = &T(i, 0);
      double v = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (ws_.status_[j] != kBasic && ws_.values_[j] != 0.0) v -= row[j] * ws_.values_[j];
      }
      ws_.values_[ws_.basis_[i]] = v;
    }
  }

  bool fixed(std::size_t j) const { return ws_.lo_[j] == ws_.hi_[j]; }

  std::ptrdiff_t choose_entering(bool bland) const {
    std::ptrdiff_t best = -1;
    double best_score = 0.0;
    const double tol = opt_.optimality_tol;
    for (std::size_t j = 0; j < cols_; ++j) {
      const int st = ws_.status_[j];
      if (st == kBasic || fixed(j)) continue;
      const double dj = ws_.reduced_[j];
      const bool eligible = (st == kAtLower && dj < -tol) || (st == kAtUpper && dj > tol) ||
                            (st == kFree && std::abs(dj) > tol);
      if (!eligible) continue;
      if (bland) return static_cast<std::ptrdiff_t>(j);
      if (std::abs(dj) > best_score) {
        best_score = std::abs(dj);
        best = static_cast<std::ptrdiff_t>(j);
      }
    }
    return best;
  }

  LpStatus iterate() {
    std::size_t degenerate = 0;
    while (true) {
      if (iterations_ >= max_iterations_) return LpStatus::iteration_limit;
      const bool bland = opt_.rule == PivotRule::bland || degenerate >= opt_.degenerate_switch;
      const std::ptrdiff_t qs = choose_entering(bland);
      if (qs < 0) return LpStatus::optimal;
      const auto q = static_cast<std::size_t>(qs);
      ++iterations_;
      const double dir = ws_.reduced_[q] < 0.0 ? 1.0 : -1.0;

      // Harris two-pass ratio test.
      const double ftol = opt_.feasibility_tol;
      double theta_max = kInfinity;
      for (std::size_t i = 0; i < m_; ++i) {
        const double t = T(i, q);
        if (std::abs(t) < kPivotTol) continue;
        const double rate = -dir * t;
        const std::size_t b = ws_.basis_[i];
        double lim = kInfinity;
        if (rate < 0.0 && std::isfinite(ws_.lo_[b])) {
          lim = (ws_.values_[b] - ws_.lo_[b] + ftol) / -rate;
        } else if (rate > 0.0 && std::isfinite(ws_.hi_[b])) {
          lim = (ws_.hi_[b] - ws_.values_[b] + ftol) / rate;
        }
        theta_max = std::min(theta_max, lim);
      }
      std::ptrdiff_t leave = -1;
      double theta = kInfinity;
      double best_pivot = 0.0;
      std::size_t best_index = 0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double t = T(i, q);
        if (std::abs(t) < kPivotTol) continue;
        const double rate = -dir * t;
        const std::size_t b = ws_.basis_[i];
        double lim = kInfinity;
        if (rate < 0.0 && std::isfinite(ws_.lo_[b])) {
          lim = (ws_.values_[b] - ws_.lo_[b]) / -rate;
        } else if (rate > 0.0 && std::isfinite(ws_.hi_[b])) {
          lim = (ws_.hi_[b] - ws_.values_[b]) / rate;
        }
        if (!std::isfinite(lim) || !(lim <= theta_max)) continue;
        lim = std::max(lim, 0.0);
        bool take = false;
        if (leave < 0) {
          take = true;
        } else if (bland) {
          take = lim < theta - kDegenerateStep || (lim <= theta + kDegenerateStep && b < best_index);
        } else {
          take = std::abs(t) > best_pivot;
        }
        if (take) {
          leave = static_cast<std::ptrdiff_t>(i);
          theta = lim;
          best_pivot = std::abs(t);
          best_index = b;
        }
      }

      const double own = (std::isfinite(ws_.lo_[q]) && std::isfinite(ws_.hi_[q])) ? ws_.hi_[q] - ws_.lo_[q]
                                                                                  : kInfinity;
      if (leave < 0 && !std::isfinite(own)) return LpStatus::unbounded;

      if (leave < 0 || own <= theta) {
        // bound flip, basis unchanged
        step(q, dir, own);
        ws_.status_[q] = dir > 0.0 ? kAtUpper : kAtLower;
        ws_.values_[q] = dir > 0.0 ? ws_.hi_[q] : ws_.lo_[q];
        degenerate = 0;
        continue;
      }

      const auto r = static_cast<std::size_t>(leave);
      const std::size_t out = ws_.basis_[r];
      const double out_rate = -dir * T(r, q);
      step(q, dir, theta);
      ws_.status_[out] = out_rate < 0.0 ? kAtLower : kAtUpper;
      ws_.values_[out] = out_rate < 0.0 ? ws_.lo_[out] : ws_.hi_[out];
      pivot(r, q);
      degenerate = theta <= kDegenerateStep ? degenerate + 1 : 0;
      if (iterations_ % 64 == 0) recompute_basic_values();
    }
  }

  void step(std::size_t q, double dir, double theta) {
    if (theta == 0.0) return;
    for (std::size_t i = 0; i < m_; ++i) {
      const double t = T(i, q);
      if (t != 0.0) ws_.values_[ws_.basis_[i]] -= dir * t * theta;
    }
    ws_.values_[q] += dir * theta;
  }

  void pivot(std::size_t r, std::size_t q) {
    double* prow = &T(r, 0);
    const double inv = 1.0 / prow[q];
    for (std::size_t j = 0; j < cols_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &T(i, 0);
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double fd = ws_.reduced_[q];
    if (fd != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) ws_.reduced_[j] -= fd * prow[j];
    }
    ws_.reduced_[q] = 0.0;
    ws_.basis_[r] = q;
    ws_.status_[q] = kBasic;
  }

  void retire_artificials() {
    const std::size_t first_art = n_ + m_;
    for (std::size_t k = 0; k < num_artificial_; ++k) {
      const std::size_t col = first_art + k;
      ws_.hi_[col] = 0.0;
      if (ws_.status_[col] != kBasic) {
        ws_.status_[col] = kAtLower;
        ws_.values_[col] = 0.0;
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = ws_.basis_[i];
      if (b < first_art) continue;
      std::ptrdiff_t best = -1;
      double best_abs = 1e-7;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (ws_.status_[j] == kBasic) continue;
        const double a = std::abs(T(i, j));
        if (a > best_abs) {
          best_abs = a;
          best = static_cast<std::ptrdiff_t>(j);
        }
      }
      ws_.values_[b] = 0.0;
      if (best >= 0) {
        ws_.status_[b] = kAtLower;
        pivot(i, static_cast<std::size_t>(best));
      }
      // otherwise the row is redundant; the artificial stays basic, pinned at 0
    }
    recompute_basic_values();
  }

  LpResult& finish(LpResult& result, LpStatus status) {
    result.status = status;
    result.iterations = iterations_;
    for (std::size_t j = 0; j < n_; ++j) {
      result.x[j] = std::clamp(ws_.values_[j], p_.lower[j], p_.upper[j]);
    }
    result.row_activity.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < n_; ++j) v += p_.coeff(i, j) * result.x[j];
      result.row_activity[i] = v;
    }
    result.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) result.objective += p_.cost[j] * result.x[j];
    result.row_duals.assign(m_, 0.0);
    result.reduced_costs.assign(n_, 0.0);
    if (status == LpStatus::optimal) {
      for (std::size_t i = 0; i < m_; ++i) result.row_duals[i] = ws_.reduced_[n_ + i];
      for (std::size_t j = 0; j < n_; ++j) result.reduced_costs[j] = ws_.reduced_[j];
    }
    return result;
  }

  const BoundedLP& p_;
  LpWorkspace& ws_;
  const LpOptions& opt_;
  std::size_t n_;
  std::size_t m_;
  std::size_t cols_ = 0;
  std::size_t num_artificial_ = 0;
  std::size_t max_iterations_ = 0;
  std::size_t iterations_ = 0;
  double rhs_scale_ = 0.0;
};

LpResult solve_lp(const BoundedLP& problem, LpWorkspace& workspace, const LpOptions& options) {
  problem.validate();
  TableauSimplex simplex(problem, workspace, options);
  return simplex.run();
}

LpResult solve_lp(const BoundedLP& problem, const LpOptions& options) {
  LpWorkspace workspace;
  return solve_lp(problem, workspace, options);
}

LpCertificate certify_lp(const BoundedLP& problem, const LpResult& result, double active_tol) {
  const std::size_t n = problem.num_vars();
  const std::size_t m = problem.num_rows();
  LpCertificate cert;

  std::vector<double> activity(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) activity[i] += problem.coeff(i, j) * result.x[j];
    cert.primal_infeasibility = std::max(
        {cert.primal_infeasibility, problem.row_lower[i] - activity[i], activity[i] - problem.row_upper[i]});
  }
  for (std::size_t j = 0; j < n; ++j) {
    cert.primal_infeasibility = std::max(
        {cert.primal_infeasibility, problem.lower[j] - result.x[j], result.x[j] - problem.upper[j]});
  }

  // d = c - A'y recomputed from the row multipliers alone
  std::vector<double> d(problem.cost);
  for (std::size_t i = 0; i < m; ++i) {
    const double y = result.row_duals[i];
    if (y == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) d[j] -= y * problem.coeff(i, j);
  }

  // Sign conditions and the Lagrangian bound  sum_j min_x d_j x_j + sum_i min_s y_i s_i.
  double bound = 0.0;
  auto term = [&](double mult, double value, double lo, double hi) {
    const bool at_lo = std::isfinite(lo) && std::abs(value - lo) <= active_tol * (1.0 + std::abs(lo));
    const bool at_hi = std::isfinite(hi) && std::abs(value - hi) <= active_tol * (1.0 + std::abs(hi));
    double viol = 0.0;
    if (at_lo && at_hi) {
      viol = 0.0;
    } else if (at_lo) {
      viol = std::max(0.0, -mult);
    } else if (at_hi) {
      viol = std::max(0.0, mult);
    } else {
      viol = std::abs(mult);
    }
    cert.dual_infeasibility = std::max(cert.dual_infeasibility, viol);
    if (mult > 0.0) {
      bound += std::isfinite(lo) ? mult * lo : mult * value;
    } else if (mult < 0.0) {
      bound += std::isfinite(hi) ? mult * hi : mult * value;
    }
  };
  for (std::size_t j = 0; j < n; ++j) term(d[j], result.x[j], problem.lower[j], problem.upper[j]);
  for (std::size_t i = 0; i < m; ++i) {
    term(result.row_duals[i], activity[i], problem.row_lower[i], problem.row_upper[i]);
  }
  double primal = 0.0;
  for (std::size_t j = 0; j < n; ++j) primal += problem.cost[j] * result.x[j];
  cert.duality_gap = primal - bound;
  return cert;
}

}  // namespace adequacy::solvers
