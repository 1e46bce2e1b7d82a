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


#include "fedenv/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedenv {

FourierSeries aggregate_sum(std::span<const FourierSeries> envelopes) {
  if (envelopes.empty()) throw std::invalid_argument("nothing to aggregate");
  const int L = envelopes.front().bandwidth();
  std::vector<double> acc(2 * L + 1, 0.0);
  for (const auto& e : envelopes) {
    if (e.bandwidth() != L) {
      throw std::invalid_argument("aggregate_sum: mismatched bandwidths");
    }
    const auto p = e.packed();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
  }
  return FourierSeries::from_packed(acc);
}

SampledSignal sum_signals(std::span<const SampledSignal> signals) {
  if (signals.empty()) throw std::invalid_argument("nothing to sum");
  const int n = signals.front().size();
  std::vector<double> acc(n, 0.0);
  for (const auto& s : signals) {
    if (s.size() != n) throw std::invalid_argument("sum_signals: length mismatch");
    for (int j = 0; j < n; ++j) acc[j] += s[j];
  }
  return SampledSignal(std::move(acc));
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw std::invalid_argument("empirical CDF needs samples");
  for (double v : sorted_) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite CDF sample");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

EmpiricalCdf empirical_cdf(std::span<const double> samples) {
  return EmpiricalCdf(std::vector<double>(samples.begin(), samples.end()));
}

EmpiricalCdf pooled_cdf(std::span<const SampledSignal> signals) {
  std::vector<double> all;
  for (const auto& s : signals) all.insert(all.end(), s.values().begin(), s.values().end());
  return EmpiricalCdf(std::move(all));
}

double quantile(const EmpiricalCdf& cdf, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must be in (0, 1)");
  const double n = cdf.size();
  // The small guard keeps exact products such as 0.1 * 30 from rounding up.
  long long k = static_cast<long long>(std::ceil(q * n - 1e-9 * std::max(1.0, q * n)));
  k = std::clamp<long long>(k, 1, cdf.size());
  return cdf.sorted_samples()[static_cast<std::size_t>(k - 1)];
}

double wasserstein_1d(const EmpiricalCdf& a, const EmpiricalCdf& b) {
  const auto sa = a.sorted_samples();
  const auto sb = b.sorted_samples();
  const std::int64_t na = a.size();
  const std::int64_t nb = b.size();
  // Positions are measured in units of 1 / (na * nb) so breakpoints compare
  // exactly.
  std::int64_t pos = 0;
  std::size_t i = 0, j = 0;
  double acc = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const std::int64_t next_a = static_cast<std::int64_t>(i + 1) * nb;
    const std::int64_t next_b = static_cast<std::int64_t>(j + 1) * na;
    const std::int64_t next = std::min(next_a, next_b);
    acc += static_cast<double>(next - pos) * std::abs(sa[i] - sb[j]);
    pos = next;
    if (next_a == next) ++i;
    if (next_b == next) ++j;
  }
  return acc / (static_cast<double>(na) * static_cast<double>(nb));
}

double sup_cdf_excess(const EmpiricalCdf& a, const EmpiricalCdf& b) {
  double worst = 0.0;
  for (auto samples : {a.sorted_samples(), b.sorted_samples()}) {
    for (double x : samples) worst = std::max(worst, a(x) - b(x));
  }
  return worst;
}

ViolationStats violation_stats(const SampledSignal& env_sum,
                               const SampledSignal& true_sum) {
  if (env_sum.size() != true_sum.size()) {
    throw std::invalid_argument("violation_stats: length mismatch");
  }
  const double tol = 1e-6 * (1.0 + true_sum.sup_norm());
  ViolationStats st;
  double peak = 0.0;
  for (int j = 0; j < true_sum.size(); ++j) {
    const double gap = true_sum[j] - env_sum[j];
    if (gap > tol) {
      ++st.count;
      peak = std::max(peak, gap);
    }
  }
  // Sub-tolerance undershoot is not an error.
  st.peak_error = st.count > 0 ? peak : 0.0;
  st.percent = 100.0 * st.count / true_sum.size();
  return st;
}

double rms_relative(const SampledSignal& approx, const SampledSignal& truth) {
  if (approx.size() != truth.size()) {
    throw std::invalid_argument("rms_relative: length mismatch");
  }
  double num = 0.0, den = 0.0;
  for (int j = 0; j < truth.size(); ++j) {
    const double d = approx[j] - truth[j];
    num += d * d;
    den += truth[j] * truth[j];
  }
  if (den == 0.0) throw std::invalid_argument("rms_relative: truth has zero norm");
  return std::sqrt(num / den);
}

std::int64_t comm_cost_bytes(int bandwidth, int clients) {
  if (bandwidth < 0 || clients < 1) {
    throw std::invalid_argument("comm_cost_bytes needs L >= 0 and clients >= 1");
  }
  return static_cast<std::int64_t>(clients) * (2 * static_cast<std::int64_t>(bandwidth) + 1) * 4;
}

}  // namespace fedenv
