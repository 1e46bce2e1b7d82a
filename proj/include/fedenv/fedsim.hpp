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


#ifndef FEDENV_FEDSIM_HPP_
#define FEDENV_FEDSIM_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedenv/analytics.hpp"
#include "fedenv/envelope.hpp"

namespace fedenv {

struct ClientRecord {
  std::string client_id;
  SampledSignal signal;
};

enum class AnalyticsTarget { kPooledCdf, kSumSignal };

std::string_view to_string(AnalyticsTarget target);
// Accepts "pooled" and "sum" as well as the to_string names.
AnalyticsTarget analytics_target_from_string(std::string_view name);

struct ExperimentConfig {
  std::vector<Scheme> schemes{Scheme::kL1Opt};
  std::vector<int> L_values;
  std::vector<int> subsample_S{1};
  // Common signal length; 0 takes it from the clients.
  int n = 0;
  std::uint64_t seed = 0;
  AnalyticsTarget target = AnalyticsTarget::kPooledCdf;
  // Solver threads; 0 uses the hardware concurrency.
  int threads = 0;

  // Throws std::invalid_argument on an empty scheme or L list, L < 0 or S < 1.
  void validate() const;
};

struct RowMetrics {
  double rms_rel = 0.0;
  double wasserstein = 0.0;
  ViolationStats violations;
  std::array<double, 3> quantiles{};  // 10%, 50%, 90% of the envelope CDF
};

struct MetricsRow {
  int L = 0;
  // L as asked for; differs from L only when the tradeoff clamps it.
  int requested_L = 0;
  int S = 1;
  Scheme scheme = Scheme::kL1Opt;
  SolveStatus status = SolveStatus::kOptimal;
  std::int64_t comm_bytes = 0;
  // Absent unless every client solve is Optimal.
  std::optional<RowMetrics> metrics;
  // First failing client, if any.
  std::string failed_client;
};

inline constexpr std::array<double, 3> kReportedQuantiles{0.1, 0.5, 0.9};

// One envelope per client, in input order. Solves run concurrently and each
// is independent of scheduling, so results are bit-identical for any thread
// count. Throws std::invalid_argument if the signals differ in length.
std::vector<EnvelopeSolution> run_clients(const std::vector<ClientRecord>& clients, int L,
                                          int S, Scheme scheme, int threads = 0);

// Server-side view of one batch of envelopes.
struct ServerView {
  SampledSignal true_sum;
  SampledSignal env_sum;
  EmpiricalCdf true_cdf;
  EmpiricalCdf env_cdf;
};

// Sum of the received coefficients sampled on the grid, plus both CDFs built
// per `target`. All solutions must be Optimal.
ServerView server_view(const std::vector<EnvelopeSolution>& solutions,
                       const std::vector<ClientRecord>& clients, AnalyticsTarget target);

// CDF of the raw client data for `target`.
EmpiricalCdf true_cdf(const std::vector<ClientRecord>& clients, AnalyticsTarget target);

// Fills a metrics row, or marks it with the first failing status.
MetricsRow server_analytics(const std::vector<EnvelopeSolution>& solutions,
                            const std::vector<ClientRecord>& clients,
                            const ExperimentConfig& config, int L, int S, Scheme scheme);

// Largest L whose 2L+1 coefficients fit ceil(n/S) constraints.
int max_rank_bandwidth(int n, int S);

// S = 1 rows per (L, scheme), sorted by L then scheme order. An L with
// 2L+1 > n is clamped to max_rank_bandwidth(n, 1) and keeps requested_L.
std::vector<MetricsRow> experiment_tradeoff(const std::vector<ClientRecord>& clients,
                                            const ExperimentConfig& config);

// Rows over (S, L, scheme) with no clamping; rows past the rank limit carry
// RankDeficient.
std::vector<MetricsRow> experiment_subsampling(const std::vector<ClientRecord>& clients,
                                               const ExperimentConfig& config);

// Shortest round-trip decimal form; identical on every run.
std::string format_double(double v);

// Header L,S,scheme,status,rms_rel,wasserstein,viol_count,viol_pct,peak_err,
// q10,q50,q90,comm_bytes; absent metrics are empty fields.
std::string metrics_csv(const std::vector<MetricsRow>& rows);
std::string metrics_json(const std::vector<MetricsRow>& rows, int indent = 2);

}  // namespace fedenv

#endif  // FEDENV_FEDSIM_HPP_
