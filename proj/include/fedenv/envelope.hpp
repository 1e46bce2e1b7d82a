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

#ifndef FEDENV_ENVELOPE_HPP_
#define FEDENV_ENVELOPE_HPP_

#include <string_view>
#include <vector>

#include "fedenv/signal.hpp"
#include "fedenv/solver.hpp"

namespace fedenv {

// Which samples carry an overprediction constraint: every stride-th one,
// starting at index 0.
class ConstraintGrid {
 public:
  // Throws std::invalid_argument unless n >= 1 and stride >= 1.
  ConstraintGrid(int n, int stride = 1);

  int n() const { return n_; }
  int stride() const { return stride_; }
  int active_count() const { return (n_ + stride_ - 1) / stride_; }
  std::vector<int> active_indices() const;

 private:
  int n_;
  int stride_;
};

enum class Scheme { kL1Opt, kL2Opt, kNaive, kMseBaseline };

std::string_view to_string(Scheme scheme);
// Accepts the to_string names and the short forms l1, l2, naive, mse.
Scheme scheme_from_string(std::string_view name);

struct EnvelopeSolution {
  FourierSeries coeffs;
  Scheme scheme = Scheme::kMseBaseline;
  // b[0] - a[0] against the projection a of the signal.
  double sa1 = 0.0;
  // Head error sum_{|k|<=L} |b[k]-a[k]|^2 plus the grid tail energy.
  double sa2 = 0.0;
  SolveStatus status = SolveStatus::kOptimal;
  // max over the constraint grid of f(t_j) - b(t_j), clamped at 0.
  double max_violation_on_grid = 0.0;

  bool ok() const { return status == SolveStatus::kOptimal; }
};

struct EnvelopeOptions {
  SolverTolerances solver;
  // The L1 tie-break QP caps b[0] - a[0] at v* + slack_rel * (1 + |f|_inf).
  double l1_face_slack_rel = 1e-12;
};

// Envelope feasibility tolerance 1e-6 * (1 + |f|_inf).
double envelope_tolerance(const SampledSignal& signal);

// Optimal L1 envelope: minimise b[0] - a[0] subject to b(t_j) >= f(t_j) on the
// active grid. Among optimal solutions returns the one closest to the
// projection (LP for the value, then an identity QP on the optimal face).
EnvelopeSolution envelope_l1(const SampledSignal& signal, int bandwidth,
                             const ConstraintGrid& grid,
                             const EnvelopeOptions& opts = {});

// Optimal L2 envelope: the unique feasible series closest to the projection in
// coefficient energy.
EnvelopeSolution envelope_l2(const SampledSignal& signal, int bandwidth,
                             const ConstraintGrid& grid,
                             const EnvelopeOptions& opts = {});

// Projection lifted by C0 = max_j (f(t_j) - proj(t_j)) over every sample.
EnvelopeSolution naive_envelope(const SampledSignal& signal, int bandwidth);

// Plain projection; reports its grid violation but does not constrain it.
EnvelopeSolution mse_baseline(const SampledSignal& signal, int bandwidth);

// Dispatches on scheme; naive and MSE ignore the grid stride.
EnvelopeSolution solve_envelope(Scheme scheme, const SampledSignal& signal,
                                int bandwidth, const ConstraintGrid& grid,
                                const EnvelopeOptions& opts = {});

struct SaCosts {
  double sa1 = 0.0;
  double sa2 = 0.0;
};

// Head cost (b0-a0)^2 + 1/2 sum((dcos)^2 + (dsin)^2).
double head_cost(const FourierSeries& b, const FourierSeries& a);
// (1/n) sum f^2 minus the energy of the bandwidth-L projection, clamped at 0.
double tail_energy(const SampledSignal& signal, const FourierSeries& projection);

// Throws std::invalid_argument if the solution bandwidth differs from L.
SaCosts sa_costs(const SampledSignal& signal, const EnvelopeSolution& solution,
                 int bandwidth);

// max_j (f(t_j) - b(t_j)) over the given indices (all samples when empty),
// clamped at 0.
double grid_violation(const SampledSignal& signal, const FourierSeries& b,
                      const std::vector<int>& indices = {});

}  // namespace fedenv

#endif  // FEDENV_ENVELOPE_HPP_
