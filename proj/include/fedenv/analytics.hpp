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


#ifndef FEDENV_ANALYTICS_HPP_
#define FEDENV_ANALYTICS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "fedenv/signal.hpp"

namespace fedenv {

// Coefficient-wise sum of client series. Throws std::invalid_argument on an
// empty list or mismatched bandwidths.
FourierSeries aggregate_sum(std::span<const FourierSeries> envelopes);

// Sample-wise sum of equally long signals.
SampledSignal sum_signals(std::span<const SampledSignal> signals);

// Glivenko-Cantelli estimate built from a private sorted copy.
class EmpiricalCdf {
 public:
  // Throws std::invalid_argument on empty or non-finite input.
  explicit EmpiricalCdf(std::vector<double> samples);

  // #{samples <= x} / N.
  double operator()(double x) const;

  int size() const { return static_cast<int>(sorted_.size()); }
  std::span<const double> sorted_samples() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf empirical_cdf(std::span<const double> samples);

// Every sample of every signal, as one population of size sum(n_i).
EmpiricalCdf pooled_cdf(std::span<const SampledSignal> signals);

// Lower order statistic: sorted[ceil(qN) - 1]. Throws unless 0 < q < 1.
double quantile(const EmpiricalCdf& cdf, double q);

// Exact integral of |Fa^-1 - Fb^-1| over (0, 1], walking the merged grid of
// breakpoints i/Na and j/Nb.
double wasserstein_1d(const EmpiricalCdf& a, const EmpiricalCdf& b);

// sup_x (Fa(x) - Fb(x)), which is >= 0 and attained at a sample of either set.
double sup_cdf_excess(const EmpiricalCdf& a, const EmpiricalCdf& b);

struct ViolationStats {
  int count = 0;
  double percent = 0.0;
  double peak_error = 0.0;
};

// Points where the envelope sum falls below the true sum by more than
// 1e-6 * (1 + |true|_inf). Throws std::invalid_argument on a length mismatch.
ViolationStats violation_stats(const SampledSignal& env_sum,
                               const SampledSignal& true_sum);

// |approx - truth|_2 / |truth|_2 on the grid. Throws on a length mismatch or
// an all-zero truth.
double rms_relative(const SampledSignal& approx, const SampledSignal& truth);

// Uplink bytes for 4-byte coefficients: clients * (2L+1) * 4.
std::int64_t comm_cost_bytes(int bandwidth, int clients);

}  // namespace fedenv

#endif  // FEDENV_ANALYTICS_HPP_
