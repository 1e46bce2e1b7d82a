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


#ifndef FEDENV_BOUNDS_HPP_
#define FEDENV_BOUNDS_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fedenv/analytics.hpp"
#include "fedenv/signal.hpp"

namespace fedenv {

// 2 * sum_{k=L+1}^{k_max} C / k^p, the naive shift for a series truncated at
// k_max. Zero when L >= k_max.
double naive_c0_tail(double C, double p, int bandwidth, int k_max);

// Remainder of the tail sum past k_max: C / ((p-1) k_max^(p-1)), p > 1.
double truncation_error(double C, double p, int k_max);

struct Sa2Bounds {
  double lower = 0.0;
  double upper = 0.0;
};

// lower = 2/((2p-1)(L+1)^(2p-1)), upper = 2/((2p-1)L^(2p-1)); p > 0.5, L >= 1.
Sa2Bounds sa2_theory_bounds(double p, int bandwidth);

// (1 + 1/L)^(2p-1); accepts p >= 0.5.
double ratio_bound(double p, int bandwidth);

// C / L^((2p-1)/3) with C = (4^(1/3) + 2 * 4^(-2/3)) f_max^(2/3) / (2p-1)^(1/3).
double cdf_gap_bound(double p, int bandwidth, double f_max);

struct SubsampleBoundParams {
  double p = 2.0;
  int L = 1;
  int n = 1;
  double mu = 0.0;       // mean dc lift b[0] - a[0]
  double c = 0.0;        // max slope of the signal
  double c_prime = 0.0;  // max slope of the envelope
  double f_max = 1.0;    // max density of the signal value distribution

  // Throws std::invalid_argument when a field is out of range or not finite.
  void validate() const;
};

// (2^(1/3) + 2^(-2/3)) f_max^(2/3) * (4/((2p-1)L^(2p-1)) + 8 mu (c+c')/n)^(1/3).
// The asymptotic o(1/n) remainder is dropped.
double subsampled_cdf_bound(const SubsampleBoundParams& params);

// 2 pi L sup|f|.
double cprime_bound(int bandwidth, double sup_norm);

// Largest (w/N) / (x_{i+w} - x_i) over sorted samples, a moving-window
// density estimate. Windows of zero width are skipped; throws
// std::invalid_argument if every window is degenerate or N <= w.
double estimate_f_max(const EmpiricalCdf& cdf, int window = 5);

// max_j |f(t_{j+1}) - f(t_j)| * n over the periodic grid.
double estimate_max_slope(const SampledSignal& signal);

// One measured quantity against its admissible interval.
struct BoundCheck {
  std::string check;
  int trial = 0;
  std::uint64_t seed = 0;
  int L = 0;
  double measured = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  // Soft checks describe trends; they never count as violations.
  bool hard = true;
  bool ok = true;

  // Distance to the nearest end of the interval, negative when outside.
  double slack() const;
};

struct VerificationReport {
  std::string theorem;
  double p = 0.0;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<int> L_values;
  // Largest tail remainder dropped by truncating the synthetic series.
  double truncation_error = 0.0;
  std::vector<BoundCheck> checks;

  int hard_violations() const;
  int count(const std::string& check) const;
  std::string to_json(int indent = 2) const;
};

struct VerifyOptions {
  // Relative tolerance on the equality and the ratio interval.
  double tol = 2e-2;
  // Relative tolerance on the naive SA2 bracket.
  double bracket_tol = 5e-2;
  // Worker threads across trials; 0 uses the hardware concurrency.
  int threads = 0;
};

// Per trial and L (k_max = 20L, n = 8 k_max):
//  "ratio": SA2(naive)/SA2(L2Opt), signed class, in [1 - tol, ratio_bound + tol];
//  "equality": SA1(L1Opt) against 2 sum_{k>L} a[k], nonneg-symmetric class,
//     relative error <= tol;
//  "l1_le_naive": SA1(L1Opt) <= SA1(naive) + 1e-9;
//  "naive_sa2_bracket": SA2(naive), signed class, within the theory bracket.
// Throws std::runtime_error naming the trial if a solve fails.
VerificationReport verify_theorem1(int trials, double p, const std::vector<int>& L_values,
                                   std::uint64_t seed, const VerifyOptions& opts = {});

// Per trial one signed power-law signal (k_max = 20 max(L), n = 8 k_max) and
// for each L the L2Opt envelope:
//  "cdf_gap": sup_x (F_X - F_env) <= cdf_gap_bound(p, L, f_max);
//  "dominance": sup_x (F_env - F_X) <= 1/N;
//  "gap_trend" (soft): gap nonincreasing over L with at most one inversion.
// f_max defaults to estimate_f_max of each trial's samples.
VerificationReport verify_theorem2(int trials, double p, const std::vector<int>& L_values,
                                   std::optional<double> f_max_estimate, std::uint64_t seed,
                                   const VerifyOptions& opts = {});

// Subsampled L2Opt envelopes (same signal family as verify_theorem2, grid
// stride S) against subsampled_cdf_bound. mu is the trial mean of b[0] - a[0]
// per (L, S); c and c' are max-slope estimates of the signal and envelope.
// The asymptotic remainder is dropped from the bound, so "subsampled_cdf_gap"
// checks are soft. Cells past the rank limit are skipped.
VerificationReport verify_theorem3(int trials, double p, const std::vector<int>& L_values,
                                   const std::vector<int>& S_values, std::uint64_t seed,
                                   const VerifyOptions& opts = {});

// Seed of trial i derived from the run seed.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

}  // namespace fedenv

#endif  // FEDENV_BOUNDS_HPP_
