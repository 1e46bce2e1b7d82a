/*
 * Copyright 2026 The fedenv Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fedenv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fedenv/signal.hpp"

namespace fedenv {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kRankDeficient: return "RankDeficient";
    case SolveStatus::kUnbounded: return "Unbounded";
    case SolveStatus::kMaxIterations: return "MaxIterations";
    case SolveStatus::kInfeasible: return "Infeasible";
  }
  return "Unknown";
}

void LinearConstraints::validate() const {
  if (A.rows() < 1 || A.cols() < 1) {
    throw std::invalid_argument("constraint matrix must be non-empty");
  }
  if (g.size() != A.rows()) {
    throw std::invalid_argument("rhs length must equal constraint row count");
  }
  if (!A.allFinite() || !g.allFinite()) {
    throw std::invalid_argument("constraint data must be finite");
  }
}

double SolverTolerances::feasibility(const LinearConstraints& c) const {
  return feasibility_rel * (1.0 + c.g.lpNorm<Eigen::Infinity>());
}

int SolverTolerances::iteration_cap(const LinearConstraints& c) const {
  return max_iterations > 0 ? max_iterations : 50 * (c.rows() + c.cols());
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_violation(const LinearConstraints& cons, const Eigen::VectorXd& x) {
  const Eigen::VectorXd slack = cons.A * x - cons.g;
  return std::max(0.0, -slack.minCoeff());
}

// ---------------------------------------------------------------------------
// Dense tableau simplex for  min cost^T y  s.t.  M y = b, y >= 0.
// ---------------------------------------------------------------------------

enum class PhaseResult { kOptimal, kUnbounded, kIterationLimit };

class Tableau {
 public:
  // Builds [M | I] with rows flipped so that b >= 0; artificials start basic.
  Tableau(const Eigen::MatrixXd& M, const Eigen::VectorXd& b)
      : rows_(static_cast<int>(M.rows())),
        structural_(static_cast<int>(M.cols())),
        T_(rows_, structural_ + rows_),
        rhs_(b),
        sign_(rows_),
        basis_(rows_),
        redundant_(rows_, false) {
    T_.setZero();
    for (int i = 0; i < rows_; ++i) {
      sign_[i] = b[i] < 0.0 ? -1.0 : 1.0;
      T_.row(i).head(structural_) = sign_[i] * M.row(i);
      T_(i, structural_ + i) = 1.0;
      rhs_[i] = sign_[i] * b[i];
      basis_[i] = structural_ + i;
    }
  }

  int rows() const { return rows_; }
  int structural() const { return structural_; }
  bool is_artificial(int col) const { return col >= structural_; }
  const std::vector<int>& basis() const { return basis_; }
  const std::vector<bool>& redundant() const { return redundant_; }
  double sign(int row) const { return sign_[row]; }
  const Eigen::VectorXd& rhs() const { return rhs_; }

  // Runs the simplex on `cost` (length structural + rows). Columns for which
  // `allowed` is false never enter.
  PhaseResult run(const Eigen::VectorXd& cost, const std::vector<bool>& allowed,
                  int& iterations, int cap, int& unbounded_col) {
    const int cols = static_cast<int>(T_.cols());
    const double rc_tol = 1e-9 * std::max(1.0, cost.lpNorm<Eigen::Infinity>());
    Eigen::VectorXd z = reduced_costs(cost);
    int degenerate_run = 0;
    while (true) {
      // Dantzig pricing; Bland's lowest-index rule once the objective has
      // stalled for a while, which rules out cycling.
      const bool bland = degenerate_run >= kBlandAfter;
      int enter = -1;
      for (int j = 0; j < cols; ++j) {
        if (!allowed[j] || z[j] >= -rc_tol) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (enter < 0 || z[j] < z[enter]) enter = j;
      }
      if (enter < 0) return PhaseResult::kOptimal;
      if (iterations >= cap) return PhaseResult::kIterationLimit;

      double best = kInf;
      for (int i = 0; i < rows_; ++i) {
        const double a = T_(i, enter);
        if (a > kPivotTol) best = std::min(best, rhs_[i] / a);
      }
      // Ties on the minimum ratio go to the lowest basic index.
      degenerate_run = best <= 1e-12 ? degenerate_run + 1 : 0;
      int leave = -1;
      const double tie = best + 1e-12 * (1.0 + std::abs(best));
      for (int i = 0; i < rows_; ++i) {
        const double a = T_(i, enter);
        if (a > kPivotTol && rhs_[i] / a <= tie &&
            (leave < 0 || basis_[i] < basis_[leave])) {
          leave = i;
        }
      }
      if (leave < 0) {
        unbounded_col = enter;
        return PhaseResult::kUnbounded;
      }
      pivot(leave, enter);
      ++iterations;
      // Refresh periodically to contain drift in the reduced costs.
      if (iterations % 64 == 0) {
        z = reduced_costs(cost);
      } else {
        z -= z[enter] * T_.row(leave).transpose();
      }
    }
  }

  // Lifts every basic value by a distinct positive amount so that no vertex
  // visited afterwards is degenerate; the basis stays primal feasible.
  void perturb(double scale, Rng& rng) {
    for (int i = 0; i < rows_; ++i) rhs_[i] += scale * (1.0 + rng.uniform());
  }

  // Recomputes the basic values for the unperturbed right-hand side b from
  // the artificial block, which holds B^{-1}.
  void restore(const Eigen::VectorXd& b) {
    Eigen::VectorXd flipped = b.cwiseProduct(sign_);
    rhs_ = T_.rightCols(rows_) * flipped;
  }

  // Dual simplex pivots from a dual-feasible basis until the basic values are
  // nonnegative again. Returns false if a row admits no pivot.
  bool dual_cleanup(const Eigen::VectorXd& cost, const std::vector<bool>& allowed,
                    double feas_tol, int& iterations, int cap) {
    const int cols = static_cast<int>(T_.cols());
    while (iterations < cap) {
      int r = -1;
      for (int i = 0; i < rows_; ++i) {
        if (rhs_[i] < -feas_tol && (r < 0 || rhs_[i] < rhs_[r])) r = i;
      }
      if (r < 0) return true;
      const Eigen::VectorXd z = reduced_costs(cost);
      int enter = -1;
      double best = kInf;
      for (int j = 0; j < cols; ++j) {
        const double a = T_(r, j);
        if (!allowed[j] || a >= -kPivotTol) continue;
        const double ratio = std::max(z[j], 0.0) / -a;
        if (ratio < best) {
          best = ratio;
          enter = j;
        }
      }
      if (enter < 0) return false;
      pivot(r, enter);
      ++iterations;
    }
    return false;
  }

  void pivot(int r, int c) {
    const double p = T_(r, c);
    T_.row(r) /= p;
    rhs_[r] /= p;
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = T_(i, c);
      if (f == 0.0) continue;
      T_.row(i) -= f * T_.row(r);
      rhs_[i] -= f * rhs_[r];
    }
    basis_[r] = c;
  }

  // After phase 1: pivot basic artificials out where possible; rows where
  // every structural entry vanishes are linearly dependent and get flagged.
  void drive_out_artificials() {
    for (int i = 0; i < rows_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      int best = -1;
      double mag = kPivotTol;
      for (int j = 0; j < structural_; ++j) {
        if (std::abs(T_(i, j)) > mag) {
          mag = std::abs(T_(i, j));
          best = j;
        }
      }
      if (best >= 0) {
        rhs_[i] = 0.0;
        pivot(i, best);
      } else {
        redundant_[i] = true;
      }
    }
  }

  double column_entry(int row, int col) const { return T_(row, col); }

 private:
  static constexpr double kPivotTol = 1e-9;
  static constexpr int kBlandAfter = 50;

  Eigen::VectorXd reduced_costs(const Eigen::VectorXd& cost) const {
    Eigen::VectorXd cb(rows_);
    for (int i = 0; i < rows_; ++i) cb[i] = cost[basis_[i]];
    Eigen::VectorXd z = cost;
    z.noalias() -= T_.transpose() * cb;
    return z;
  }

  int rows_;
  int structural_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> T_;
  Eigen::VectorXd rhs_;
  Eigen::VectorXd sign_;
  std::vector<int> basis_;
  std::vector<bool> redundant_;
};

struct StandardFormResult {
  PhaseResult phase1 = PhaseResult::kOptimal;
  PhaseResult phase2 = PhaseResult::kOptimal;
  bool feasible = false;
  bool rank_deficient = false;
  Eigen::VectorXd y;         // structural values
  Eigen::VectorXd pi;        // multipliers of the final phase (original rows)
  Eigen::VectorXd ray;       // phase-2 unbounded direction in y
  double rcond = 1.0;
  int iterations = 0;
};

// Multipliers pi with B^T pi = cost_B for the current basis, in the original
// (unflipped) row orientation.
Eigen::VectorXd basis_multipliers(const Tableau& tab, const Eigen::MatrixXd& M,
                                  const Eigen::VectorXd& cost, double& rcond) {
  const int r = tab.rows();
  Eigen::MatrixXd B(r, r);
  Eigen::VectorXd cb(r);
  for (int i = 0; i < r; ++i) {
    const int col = tab.basis()[i];
    if (tab.is_artificial(col)) {
      B.col(i).setZero();
      B(col - tab.structural(), i) = tab.sign(col - tab.structural());
    } else {
      B.col(i) = M.col(col);
    }
    cb[i] = cost[col];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B.transpose());
  rcond = lu.rcond();
  return lu.solve(cb);
}

// Relative size of the anti-degeneracy lift applied to the basic values.
constexpr double kPerturbation = 1e-7;
constexpr std::uint64_t kPerturbationSeed = 0x5eed;

StandardFormResult solve_standard(const Eigen::MatrixXd& M,
                                  const Eigen::VectorXd& b,
                                  const Eigen::VectorXd& cost, int cap) {
  const int r = static_cast<int>(M.rows());
  const int n = static_cast<int>(M.cols());
  StandardFormResult out;
  Tableau tab(M, b);

  const double b_scale = 1.0 + b.lpNorm<Eigen::Infinity>();
  const double perturbation = kPerturbation * b_scale;
  const double feas_tol = 1e-11 * b_scale;
  Rng rng(kPerturbationSeed);

  Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(n + r);
  cost1.tail(r).setOnes();
  std::vector<bool> allowed(n + r, true);
  int unbounded_col = -1;
  tab.perturb(perturbation, rng);
  out.phase1 = tab.run(cost1, allowed, out.iterations, cap, unbounded_col);
  if (out.phase1 == PhaseResult::kIterationLimit) return out;
  tab.restore(b);
  if (!tab.dual_cleanup(cost1, allowed, feas_tol, out.iterations, cap)) {
    out.phase1 = PhaseResult::kIterationLimit;
    return out;
  }

  double infeas = 0.0;
  for (int i = 0; i < r; ++i) {
    if (tab.is_artificial(tab.basis()[i])) infeas += tab.rhs()[i];
  }
  if (infeas > 1e-9 * b_scale) {
    out.pi = basis_multipliers(tab, M, cost1, out.rcond);
    return out;
  }
  out.feasible = true;

  tab.drive_out_artificials();
  for (int i = 0; i < r; ++i) out.rank_deficient |= tab.redundant()[i];
  for (int j = n; j < n + r; ++j) allowed[j] = false;

  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(n + r);
  cost2.head(n) = cost;
  tab.perturb(perturbation, rng);
  out.phase2 = tab.run(cost2, allowed, out.iterations, cap, unbounded_col);
  if (out.phase2 == PhaseResult::kOptimal) {
    tab.restore(b);
    if (!tab.dual_cleanup(cost2, allowed, feas_tol, out.iterations, cap)) {
      out.phase2 = PhaseResult::kIterationLimit;
      return out;
    }
  }

  out.y = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < r; ++i) {
    const int col = tab.basis()[i];
    if (!tab.is_artificial(col)) out.y[col] = std::max(0.0, tab.rhs()[i]);
  }
  if (out.phase2 == PhaseResult::kUnbounded) {
    out.ray = Eigen::VectorXd::Zero(n);
    out.ray[unbounded_col] = 1.0;
    for (int i = 0; i < r; ++i) {
      const int col = tab.basis()[i];
      if (!tab.is_artificial(col)) {
        out.ray[col] = -tab.column_entry(i, unbounded_col);
      }
    }
    return out;
  }
  out.pi = basis_multipliers(tab, M, cost2, out.rcond);
  return out;
}

}  // namespace

SolverReport solve_lp(const Eigen::VectorXd& c, const LinearConstraints& cons,
                      const SolverTolerances& tol) {
  cons.validate();
  if (c.size() != cons.cols()) {
    throw std::invalid_argument("objective length must equal variable count");
  }
  if (!c.allFinite()) throw std::invalid_argument("objective must be finite");

  const int cap = tol.iteration_cap(cons);
  const double feas_tol = tol.feasibility(cons);
  const Eigen::MatrixXd At = cons.A.transpose();
  // Dual: min -g^T y  s.t.  A^T y = c, y >= 0.
  StandardFormResult dual = solve_standard(At, c, -cons.g, cap);

  SolverReport rep;
  rep.iterations = dual.iterations;
  if (dual.phase1 == PhaseResult::kIterationLimit ||
      dual.phase2 == PhaseResult::kIterationLimit) {
    rep.status = SolveStatus::kMaxIterations;
    rep.x = Eigen::VectorXd::Zero(cons.cols());
    return rep;
  }

  if (!dual.feasible) {
    // Farkas: r = -pi satisfies A r >= 0 and c^T r < 0. The primal is then
    // unbounded if it is feasible at all, which the zero-objective dual
    // decides (it is unbounded exactly when A x >= g has no solution).
    Eigen::VectorXd ray = -dual.pi;
    StandardFormResult probe = solve_standard(
        At, Eigen::VectorXd::Zero(cons.cols()), -cons.g, cap);
    rep.iterations += probe.iterations;
    if (probe.phase2 == PhaseResult::kUnbounded) {
      rep.status = SolveStatus::kInfeasible;
      rep.x = Eigen::VectorXd::Zero(cons.cols());
      return rep;
    }
    rep.status = SolveStatus::kUnbounded;
    rep.x = ray;
    rep.objective = -std::numeric_limits<double>::infinity();
    return rep;
  }

  if (dual.phase2 == PhaseResult::kUnbounded) {
    rep.status = SolveStatus::kInfeasible;
    rep.x = Eigen::VectorXd::Zero(cons.cols());
    return rep;
  }

  // The phase-2 multipliers of min -g^T y satisfy -g - A pi >= 0.
  rep.x = -dual.pi;
  rep.objective = c.dot(rep.x);
  rep.max_constraint_violation = max_violation(cons, rep.x);

  const Eigen::VectorXd slack = cons.A * rep.x - cons.g;
  const double scale = 1.0 + cons.g.lpNorm<Eigen::Infinity>() +
                       c.lpNorm<Eigen::Infinity>();
  const double stationarity = (At * dual.y - c).lpNorm<Eigen::Infinity>();
  double complementarity = 0.0;
  for (int i = 0; i < cons.rows(); ++i) {
    complementarity = std::max(complementarity, std::abs(dual.y[i] * slack[i]));
  }
  rep.kkt_residual = std::max(stationarity, complementarity) / scale;

  if (dual.rank_deficient || dual.rcond < tol.min_rcond) {
    rep.status = SolveStatus::kRankDeficient;
  } else if (rep.max_constraint_violation <= feas_tol &&
             rep.kkt_residual <= tol.optimality) {
    rep.status = SolveStatus::kOptimal;
  } else {
    rep.status = SolveStatus::kMaxIterations;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Goldfarb-Idnani, G = I.
// ---------------------------------------------------------------------------

namespace {

class ActiveSetFactor {
 public:
  explicit ActiveSetFactor(int d) : J_(Eigen::MatrixXd::Identity(d, d)), R_(d, d) {
    R_.setZero();
  }

  int active() const { return q_; }
  int dim() const { return static_cast<int>(J_.rows()); }

  // d = J^T n
  Eigen::VectorXd project(const Eigen::VectorXd& n) const {
    return J_.transpose() * n;
  }

  // Primal direction z = J2 d2 (component of n outside the active span).
  Eigen::VectorXd primal_step(const Eigen::VectorXd& d) const {
    const int rest = dim() - q_;
    if (rest == 0) return Eigen::VectorXd::Zero(dim());
    return J_.rightCols(rest) * d.tail(rest);
  }

  // r = R^{-1} d1.
  Eigen::VectorXd dual_step(const Eigen::VectorXd& d) const {
    if (q_ == 0) return Eigen::VectorXd();
    return R_.topLeftCorner(q_, q_).triangularView<Eigen::Upper>().solve(
        d.head(q_));
  }

  // Appends the constraint whose projection is d. Returns false when the
  // new normal is numerically dependent on the active set.
  bool add(Eigen::VectorXd d) {
    const int n = dim();
    if (q_ >= n) return false;
    for (int i = n - 1; i > q_; --i) {
      double c = 0.0;
      double s = 0.0;
      if (!givens(d[i - 1], d[i], c, s)) continue;
      const double h = std::hypot(d[i - 1], d[i]);
      d[i - 1] = h;
      d[i] = 0.0;
      rotate_cols(i - 1, i, c, s);
    }
    R_.col(q_).head(q_ + 1) = d.head(q_ + 1);
    ++q_;
    return std::abs(d[q_ - 1]) > 0.0;
  }

  void drop(int k) {
    for (int j = k; j < q_ - 1; ++j) R_.col(j).head(q_) = R_.col(j + 1).head(q_);
    R_.col(q_ - 1).setZero();
    for (int i = k; i < q_ - 1; ++i) {
      double c = 0.0;
      double s = 0.0;
      if (!givens(R_(i, i), R_(i + 1, i), c, s)) continue;
      for (int j = i; j < q_ - 1; ++j) {
        const double a = R_(i, j);
        const double b = R_(i + 1, j);
        R_(i, j) = c * a + s * b;
        R_(i + 1, j) = -s * a + c * b;
      }
      R_(i + 1, i) = 0.0;
      rotate_cols(i, i + 1, c, s);
    }
    --q_;
  }

 private:
  static bool givens(double a, double b, double& c, double& s) {
    if (b == 0.0) return false;
    const double h = std::hypot(a, b);
    c = a / h;
    s = b / h;
    return true;
  }

  void rotate_cols(int i, int j, double c, double s) {
    const Eigen::VectorXd ci = J_.col(i);
    J_.col(i) = c * ci + s * J_.col(j);
    J_.col(j) = -s * ci + c * J_.col(j);
  }

  Eigen::MatrixXd J_;
  Eigen::MatrixXd R_;
  int q_ = 0;
};

}  // namespace

SolverReport solve_qp_identity(const Eigen::VectorXd& target,
                               const LinearConstraints& cons,
                               const SolverTolerances& tol) {
  cons.validate();
  if (target.size() != cons.cols()) {
    throw std::invalid_argument("target length must equal variable count");
  }
  if (!target.allFinite()) throw std::invalid_argument("target must be finite");

  const int m = cons.rows();
  const int d = cons.cols();
  const int cap = tol.iteration_cap(cons);
  const double feas_tol = tol.feasibility(cons);
  const Eigen::VectorXd row_norm = cons.A.rowwise().norm();

  SolverReport rep;
  Eigen::VectorXd x = target;
  ActiveSetFactor factor(d);
  std::vector<int> active;
  std::vector<double> u;
  std::vector<bool> is_active(m, false);
  bool infeasible = false;
  int iter = 0;

  while (true) {
    const Eigen::VectorXd slack = cons.A * x - cons.g;
    int p = -1;
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      if (is_active[i] || slack[i] >= -feas_tol || row_norm[i] == 0.0) continue;
      const double scaled = slack[i] / row_norm[i];
      if (p < 0 || scaled < worst) {
        worst = scaled;
        p = i;
      }
    }
    if (p < 0) break;
    if (iter >= cap) break;

    const Eigen::VectorXd np = cons.A.row(p).transpose();
    double u_new = 0.0;
    while (true) {
      ++iter;
      const Eigen::VectorXd dv = factor.project(np);
      const Eigen::VectorXd z = factor.primal_step(dv);
      const Eigen::VectorXd r = factor.dual_step(dv);

      double t1 = kInf;
      int k_drop = -1;
      for (int j = 0; j < factor.active(); ++j) {
        if (r[j] > 1e-14) {
          const double ratio = u[j] / r[j];
          if (ratio < t1) {
            t1 = ratio;
            k_drop = j;
          }
        }
      }
      double t2 = kInf;
      const double zn = z.dot(np);
      if (z.norm() > 1e-12 * row_norm[p] && zn > 0.0) {
        t2 = -(np.dot(x) - cons.g[p]) / zn;
      }
      if (t1 == kInf && t2 == kInf) {
        infeasible = true;
        break;
      }
      const double t = std::min(t1, t2);
      for (int j = 0; j < factor.active(); ++j) u[j] -= t * r[j];
      u_new += t;
      if (t2 < kInf) x += t * z;

      if (t2 <= t1) {
        factor.add(dv);
        active.push_back(p);
        u.push_back(u_new);
        is_active[p] = true;
        break;
      }
      is_active[active[k_drop]] = false;
      active.erase(active.begin() + k_drop);
      u.erase(u.begin() + k_drop);
      factor.drop(k_drop);
      if (iter >= cap) break;
    }
    if (infeasible || iter >= cap) break;
  }

  rep.x = x;
  rep.iterations = iter;
  rep.objective = (x - target).squaredNorm();
  rep.max_constraint_violation = max_violation(cons, x);

  const Eigen::VectorXd slack = cons.A * x - cons.g;
  Eigen::VectorXd stationarity = x - target;
  double dual_sign = 0.0;
  double complementarity = 0.0;
  for (std::size_t j = 0; j < active.size(); ++j) {
    stationarity -= u[j] * cons.A.row(active[j]).transpose();
    dual_sign = std::max(dual_sign, -u[j]);
    complementarity = std::max(complementarity, std::abs(u[j] * slack[active[j]]));
  }
  const double scale = 1.0 + cons.g.lpNorm<Eigen::Infinity>() +
                       target.lpNorm<Eigen::Infinity>();
  rep.kkt_residual =
      std::max({stationarity.lpNorm<Eigen::Infinity>(), dual_sign,
                complementarity}) /
      scale;

  if (infeasible) {
    rep.status = SolveStatus::kInfeasible;
  } else if (rep.max_constraint_violation <= feas_tol &&
             rep.kkt_residual <= tol.optimality) {
    rep.status = SolveStatus::kOptimal;
  } else {
    rep.status = SolveStatus::kMaxIterations;
  }
  return rep;
}

}  // namespace fedenv
