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

#ifndef FEDENV_SOLVER_HPP_
#define FEDENV_SOLVER_HPP_

#include <string_view>

#include <Eigen/Dense>

namespace fedenv {

enum class SolveStatus {
  kOptimal,
  kRankDeficient,
  kUnbounded,
  kMaxIterations,
  kInfeasible,
};

std::string_view to_string(SolveStatus status);

// Constraint set A x >= g, dense. Rows are constraint evaluations.
struct LinearConstraints {
  Eigen::MatrixXd A;
  Eigen::VectorXd g;

  int rows() const { return static_cast<int>(A.rows()); }
  int cols() const { return static_cast<int>(A.cols()); }

  // Throws std::invalid_argument on empty, mismatched or non-finite data.
  void validate() const;
};

struct SolverTolerances {
  // Feasibility tolerance is feasibility_rel * (1 + |g|_inf).
  double feasibility_rel = 1e-8;
  // Bound on the scaled KKT residual reported for Optimal results.
  double optimality = 1e-7;
  // 0 means 50 * (d + m).
  int max_iterations = 0;
  // Reciprocal condition estimate below which a basis is rank deficient.
  double min_rcond = 1e-12;

  double feasibility(const LinearConstraints& c) const;
  int iteration_cap(const LinearConstraints& c) const;
};

struct SolverReport {
  // Solution, or for kUnbounded a ray r with A r >= 0 and c^T r < 0.
  Eigen::VectorXd x;
  SolveStatus status = SolveStatus::kMaxIterations;
  double objective = 0.0;
  double max_constraint_violation = 0.0;
  // Largest of the stationarity, dual-sign and complementarity residuals,
  // divided by 1 + |g|_inf + |objective data|_inf.
  double kkt_residual = 0.0;
  int iterations = 0;
};

// minimize c^T x subject to A x >= g, x free.
//
// Two-phase dense tableau simplex on the dual (max g^T y, A^T y = c, y >= 0),
// so the tableau has d rows. Pricing is Dantzig, switching to Bland's rule
// after a run of degenerate pivots. x is read off as the dual multipliers of
// the final basis and re-solved with a partial-pivot LU for accuracy.
SolverReport solve_lp(const Eigen::VectorXd& c, const LinearConstraints& cons,
                      const SolverTolerances& tol = {});

// minimize |x - target|^2 subject to A x >= g.
//
// Goldfarb-Idnani dual active set specialised to the identity Hessian: starts
// at the unconstrained minimiser and adds the most violated constraint until
// primal feasibility, keeping the dual iterates nonnegative throughout.
SolverReport solve_qp_identity(const Eigen::VectorXd& target,
                               const LinearConstraints& cons,
                               const SolverTolerances& tol = {});

}  // namespace fedenv

#endif  // FEDENV_SOLVER_HPP_
