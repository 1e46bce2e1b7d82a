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

#include "fedenv/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fedenv/grid_basis.hpp"

namespace fedenv {

ConstraintGrid::ConstraintGrid(int n, int stride) : n_(n), stride_(stride) {
  if (n < 1) throw std::invalid_argument("grid needs at least one sample");
  if (stride < 1) throw std::invalid_argument("subsampling stride must be >= 1");
}

std::vector<int> ConstraintGrid::active_indices() const {
  std::vector<int> out;
  out.reserve(active_count());
  for (int j = 0; j < n_; j += stride_) out.push_back(j);
  return out;
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kL1Opt: return "L1Opt";
    case Scheme::kL2Opt: return "L2Opt";
    case Scheme::kNaive: return "Naive";
    case Scheme::kMseBaseline: return "MseBaseline";
  }
  return "Unknown";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "L1Opt" || name == "l1") return Scheme::kL1Opt;
  if (name == "L2Opt" || name == "l2") return Scheme::kL2Opt;
  if (name == "Naive" || name == "naive") return Scheme::kNaive;
  if (name == "MseBaseline" || name == "mse") return Scheme::kMseBaseline;
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

double envelope_tolerance(const SampledSignal& signal) {
  return 1e-6 * (1.0 + signal.sup_norm());
}

double head_cost(const FourierSeries& b, const FourierSeries& a) {
  if (b.bandwidth() != a.bandwidth()) {
    throw std::invalid_argument("head cost needs equal bandwidths");
  }
  const double d0 = b.dc() - a.dc();
  double acc = 0.0;
  for (int k = 1; k <= b.bandwidth(); ++k) {
    const double dc = b.cos_at(k) - a.cos_at(k);
    const double ds = b.sin_at(k) - a.sin_at(k);
    acc += dc * dc + ds * ds;
  }
  return d0 * d0 + 0.5 * acc;
}

double tail_energy(const SampledSignal& signal, const FourierSeries& projection) {
  return std::max(0.0, signal.mean_square() - energy(projection));
}

double grid_violation(const SampledSignal& signal, const FourierSeries& b,
                      const std::vector<int>& indices) {
  const GridTrig trig(signal.size());
  const int L = b.bandwidth();
  auto value_at = [&](int j) {
    double acc = b.dc();
    for (int k = 1; k <= L; ++k) {
      acc += b.cos_at(k) * trig.cos(k, j) + b.sin_at(k) * trig.sin(k, j);
    }
    return acc;
  };
  double worst = 0.0;
  if (indices.empty()) {
    for (int j = 0; j < signal.size(); ++j) {
      worst = std::max(worst, signal[j] - value_at(j));
    }
  } else {
    for (int j : indices) worst = std::max(worst, signal[j] - value_at(j));
  }
  return worst;
}

SaCosts sa_costs(const SampledSignal& signal, const EnvelopeSolution& solution,
                 int bandwidth) {
  if (solution.coeffs.bandwidth() != bandwidth) {
    throw std::invalid_argument("solution bandwidth does not match L");
  }
  const FourierSeries a = project(signal, bandwidth);
  return {solution.coeffs.dc() - a.dc(),
          head_cost(solution.coeffs, a) + tail_energy(signal, a)};
}

namespace {

const double kSqrt2 = std::numbers::sqrt2;

// Rows of the envelope constraint block in coordinates y where
// |y - y_a|^2 equals the head cost: y_0 = b_0, y_k = b_k / sqrt(2).
LinearConstraints scaled_constraints(const SampledSignal& signal, int L,
                                     const std::vector<int>& rows) {
  const GridTrig trig(signal.size());
  LinearConstraints cons;
  cons.A.resize(static_cast<Eigen::Index>(rows.size()), 2 * L + 1);
  cons.g.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int j = rows[r];
    cons.A(r, 0) = 1.0;
    for (int k = 1; k <= L; ++k) {
      cons.A(r, k) = kSqrt2 * trig.cos(k, j);
      cons.A(r, L + k) = kSqrt2 * trig.sin(k, j);
    }
    cons.g[r] = signal[j];
  }
  return cons;
}

Eigen::VectorXd to_scaled(const FourierSeries& s) {
  const auto packed = s.packed();
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
      packed.data(), static_cast<Eigen::Index>(packed.size()));
  y.tail(y.size() - 1) /= kSqrt2;
  return y;
}

FourierSeries from_scaled(const Eigen::VectorXd& y) {
  Eigen::VectorXd b = y;
  b.tail(b.size() - 1) *= kSqrt2;
  return FourierSeries::from_packed(std::span<const double>(b.data(), b.size()));
}

EnvelopeSolution failed(Scheme scheme, int L, SolveStatus status) {
  EnvelopeSolution s;
  s.coeffs = FourierSeries::zeros(L);
  s.scheme = scheme;
  s.status = status;
  return s;
}

void fill_costs(EnvelopeSolution& sol, const SampledSignal& signal,
                const FourierSeries& a, const std::vector<int>& rows) {
  sol.sa1 = sol.coeffs.dc() - a.dc();
  sol.sa2 = head_cost(sol.coeffs, a) + tail_energy(signal, a);
  sol.max_violation_on_grid = grid_violation(signal, sol.coeffs, rows);
}

bool rank_ok(int L, const ConstraintGrid& grid) {
  return 2 * L + 1 <= grid.active_count();
}

void check_grid(const SampledSignal& signal, int L, const ConstraintGrid& grid) {
  if (L < 0) throw std::invalid_argument("bandwidth must be >= 0");
  if (grid.n() != signal.size()) {
    throw std::invalid_argument("constraint grid size differs from the signal");
  }
}

}  // namespace

EnvelopeSolution envelope_l1(const SampledSignal& signal, int bandwidth,
                             const ConstraintGrid& grid,
                             const EnvelopeOptions& opts) {
  check_grid(signal, bandwidth, grid);
  if (!rank_ok(bandwidth, grid)) {
    return failed(Scheme::kL1Opt, bandwidth, SolveStatus::kRankDeficient);
  }
  const int L = bandwidth;
  const FourierSeries a = project(signal, L);
  const auto rows = grid.active_indices();
  LinearConstraints cons = scaled_constraints(signal, L, rows);

  // The dc objective is unaffected by the column scaling.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * L + 1);
  c[0] = 1.0;
  const SolverReport lp = solve_lp(c, cons, opts.solver);
  if (lp.status != SolveStatus::kOptimal) {
    return failed(Scheme::kL1Opt, L, lp.status);
  }

  // Tie-break on the optimal face: closest point to the projection with
  // b[0] <= a[0] + v* + slack.
  const double v_star = lp.x[0] - a.dc();
  const double slack = opts.l1_face_slack_rel * (1.0 + signal.sup_norm());
  LinearConstraints face = cons;
  face.A.conservativeResize(cons.rows() + 1, Eigen::NoChange);
  face.g.conservativeResize(cons.rows() + 1);
  face.A.row(cons.rows()).setZero();
  face.A(cons.rows(), 0) = -1.0;
  face.g[cons.rows()] = -(a.dc() + v_star + slack);
  const SolverReport qp = solve_qp_identity(to_scaled(a), face, opts.solver);

  EnvelopeSolution sol;
  sol.scheme = Scheme::kL1Opt;
  sol.status = SolveStatus::kOptimal;
  sol.coeffs = from_scaled(qp.status == SolveStatus::kOptimal ? qp.x : lp.x);
  fill_costs(sol, signal, a, rows);
  return sol;
}

EnvelopeSolution envelope_l2(const SampledSignal& signal, int bandwidth,
                             const ConstraintGrid& grid,
                             const EnvelopeOptions& opts) {
  check_grid(signal, bandwidth, grid);
  if (!rank_ok(bandwidth, grid)) {
    return failed(Scheme::kL2Opt, bandwidth, SolveStatus::kRankDeficient);
  }
  const int L = bandwidth;
  const FourierSeries a = project(signal, L);
  const auto rows = grid.active_indices();
  const LinearConstraints cons = scaled_constraints(signal, L, rows);
  const SolverReport qp = solve_qp_identity(to_scaled(a), cons, opts.solver);
  if (qp.status != SolveStatus::kOptimal) {
    return failed(Scheme::kL2Opt, L, qp.status);
  }
  EnvelopeSolution sol;
  sol.scheme = Scheme::kL2Opt;
  sol.status = SolveStatus::kOptimal;
  sol.coeffs = from_scaled(qp.x);
  fill_costs(sol, signal, a, rows);
  return sol;
}

EnvelopeSolution naive_envelope(const SampledSignal& signal, int bandwidth) {
  if (bandwidth < 0) throw std::invalid_argument("bandwidth must be >= 0");
  if (2 * bandwidth + 1 > signal.size()) {
    return failed(Scheme::kNaive, bandwidth, SolveStatus::kRankDeficient);
  }
  const FourierSeries a = project(signal, bandwidth);
  const double c0 = grid_violation(signal, a);
  EnvelopeSolution sol;
  sol.scheme = Scheme::kNaive;
  sol.coeffs = a.with_dc(a.dc() + c0);
  fill_costs(sol, signal, a, {});
  return sol;
}

EnvelopeSolution mse_baseline(const SampledSignal& signal, int bandwidth) {
  if (bandwidth < 0) throw std::invalid_argument("bandwidth must be >= 0");
  if (2 * bandwidth + 1 > signal.size()) {
    return failed(Scheme::kMseBaseline, bandwidth, SolveStatus::kRankDeficient);
  }
  const FourierSeries a = project(signal, bandwidth);
  EnvelopeSolution sol;
  sol.scheme = Scheme::kMseBaseline;
  sol.coeffs = a;
  fill_costs(sol, signal, a, {});
  return sol;
}

EnvelopeSolution solve_envelope(Scheme scheme, const SampledSignal& signal,
                                int bandwidth, const ConstraintGrid& grid,
                                const EnvelopeOptions& opts) {
  switch (scheme) {
    case Scheme::kL1Opt: return envelope_l1(signal, bandwidth, grid, opts);
    case Scheme::kL2Opt: return envelope_l2(signal, bandwidth, grid, opts);
    case Scheme::kNaive: return naive_envelope(signal, bandwidth);
    case Scheme::kMseBaseline: return mse_baseline(signal, bandwidth);
  }
  throw std::invalid_argument("unknown scheme");
}

}  // namespace fedenv
