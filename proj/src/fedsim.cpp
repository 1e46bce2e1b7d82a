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


#include "fedenv/fedsim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "fedenv/parallel.hpp"
#include "json.hpp"

namespace fedenv {

namespace {

int common_length(const std::vector<ClientRecord>& clients) {
  if (clients.empty()) throw std::invalid_argument("no clients");
  const int n = clients.front().signal.size();
  for (const auto& c : clients) {
    if (c.signal.size() != n) {
      throw std::invalid_argument("client " + c.client_id + " has a different signal length");
    }
  }
  return n;
}

std::vector<SampledSignal> client_signals(const std::vector<ClientRecord>& clients) {
  std::vector<SampledSignal> out;
  out.reserve(clients.size());
  for (const auto& c : clients) out.push_back(c.signal);
  return out;
}

struct Cell {
  int L;
  int requested_L;
  int S;
  Scheme scheme;
};

// Solves every (cell, client) pair in one parallel pass, then folds each cell
// in client order.
std::vector<MetricsRow> run_cells(const std::vector<ClientRecord>& clients,
                                  const ExperimentConfig& config, const std::vector<Cell>& cells) {
  const int d = static_cast<int>(clients.size());
  std::vector<EnvelopeSolution> solved(cells.size() * clients.size());
  parallel_for(
      static_cast<int>(solved.size()),
      [&](int i) {
        const Cell& cell = cells[i / d];
        const auto& signal = clients[i % d].signal;
        solved[i] = solve_envelope(cell.scheme, signal, cell.L,
                                   ConstraintGrid(signal.size(), cell.S));
      },
      config.threads);
  std::vector<MetricsRow> rows;
  rows.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::vector<EnvelopeSolution> batch(solved.begin() + c * d, solved.begin() + (c + 1) * d);
    MetricsRow row = server_analytics(batch, clients, config, cells[c].L, cells[c].S, cells[c].scheme);
    row.requested_L = cells[c].requested_L;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string_view to_string(AnalyticsTarget target) {
  return target == AnalyticsTarget::kPooledCdf ? "PooledCdf" : "SumSignal";
}

AnalyticsTarget analytics_target_from_string(std::string_view name) {
  if (name == "pooled" || name == "PooledCdf") return AnalyticsTarget::kPooledCdf;
  if (name == "sum" || name == "SumSignal") return AnalyticsTarget::kSumSignal;
  throw std::invalid_argument("unknown analytics target: " + std::string(name));
}

void ExperimentConfig::validate() const {
  if (schemes.empty()) throw std::invalid_argument("no schemes selected");
  if (L_values.empty()) throw std::invalid_argument("no L values given");
  for (int L : L_values) {
    if (L < 0) throw std::invalid_argument("L values must be >= 0");
  }
  if (subsample_S.empty()) throw std::invalid_argument("no subsampling rates given");
  for (int S : subsample_S) {
    if (S < 1) throw std::invalid_argument("subsampling rates must be >= 1");
  }
  if (n < 0) throw std::invalid_argument("n must be >= 0");
}

std::vector<EnvelopeSolution> run_clients(const std::vector<ClientRecord>& clients, int L,
                                          int S, Scheme scheme, int threads) {
  const int n = common_length(clients);
  std::vector<EnvelopeSolution> out(clients.size());
  parallel_for(
      static_cast<int>(clients.size()),
      [&](int i) { out[i] = solve_envelope(scheme, clients[i].signal, L, ConstraintGrid(n, S)); },
      threads);
  return out;
}

EmpiricalCdf true_cdf(const std::vector<ClientRecord>& clients, AnalyticsTarget target) {
  const auto signals = client_signals(clients);
  if (target == AnalyticsTarget::kPooledCdf) return pooled_cdf(signals);
  return empirical_cdf(sum_signals(signals).values());
}

ServerView server_view(const std::vector<EnvelopeSolution>& solutions,
                       const std::vector<ClientRecord>& clients, AnalyticsTarget target) {
  const int n = common_length(clients);
  if (solutions.size() != clients.size()) {
    throw std::invalid_argument("one solution per client expected");
  }
  std::vector<FourierSeries> coeffs;
  std::vector<SampledSignal> reconstructed;
  for (const auto& s : solutions) {
    if (!s.ok()) throw std::invalid_argument("server_view needs Optimal solutions");
    coeffs.push_back(s.coeffs);
    reconstructed.push_back(sample(s.coeffs, n));
  }
  const auto truth = client_signals(clients);
  SampledSignal true_sum = sum_signals(truth);
  SampledSignal env_sum = sample(aggregate_sum(coeffs), n);
  if (target == AnalyticsTarget::kPooledCdf) {
    return {std::move(true_sum), std::move(env_sum), pooled_cdf(truth), pooled_cdf(reconstructed)};
  }
  EmpiricalCdf tc = empirical_cdf(true_sum.values());
  EmpiricalCdf ec = empirical_cdf(env_sum.values());
  return {std::move(true_sum), std::move(env_sum), std::move(tc), std::move(ec)};
}

MetricsRow server_analytics(const std::vector<EnvelopeSolution>& solutions,
                            const std::vector<ClientRecord>& clients,
                            const ExperimentConfig& config, int L, int S, Scheme scheme) {
  MetricsRow row;
  row.L = L;
  row.requested_L = L;
  row.S = S;
  row.scheme = scheme;
  row.comm_bytes = comm_cost_bytes(L, static_cast<int>(clients.size()));
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    if (!solutions[i].ok()) {
      row.status = solutions[i].status;
      row.failed_client = clients[i].client_id;
      return row;
    }
  }
  const ServerView view = server_view(solutions, clients, config.target);
  RowMetrics m;
  m.rms_rel = rms_relative(view.env_sum, view.true_sum);
  m.wasserstein = wasserstein_1d(view.true_cdf, view.env_cdf);
  m.violations = violation_stats(view.env_sum, view.true_sum);
  for (std::size_t q = 0; q < kReportedQuantiles.size(); ++q) {
    m.quantiles[q] = quantile(view.env_cdf, kReportedQuantiles[q]);
  }
  row.metrics = m;
  return row;
}

int max_rank_bandwidth(int n, int S) {
  const int m = ConstraintGrid(n, S).active_count();
  return (m - 1) / 2;
}

std::vector<MetricsRow> experiment_tradeoff(const std::vector<ClientRecord>& clients,
                                            const ExperimentConfig& config) {
  config.validate();
  const int n = common_length(clients);
  if (config.n != 0 && config.n != n) throw std::invalid_argument("config n differs from the data");
  std::vector<int> Ls = config.L_values;
  std::sort(Ls.begin(), Ls.end());
  std::vector<Cell> cells;
  for (int L : Ls) {
    const int eff = std::min(L, max_rank_bandwidth(n, 1));
    for (Scheme s : config.schemes) cells.push_back({eff, L, 1, s});
  }
  return run_cells(clients, config, cells);
}

std::vector<MetricsRow> experiment_subsampling(const std::vector<ClientRecord>& clients,
                                               const ExperimentConfig& config) {
  config.validate();
  const int n = common_length(clients);
  if (config.n != 0 && config.n != n) throw std::invalid_argument("config n differs from the data");
  std::vector<int> Ls = config.L_values;
  std::sort(Ls.begin(), Ls.end());
  std::vector<Cell> cells;
  for (int S : config.subsample_S) {
    for (int L : Ls) {
      for (Scheme s : config.schemes) cells.push_back({L, L, S, s});
    }
  }
  return run_cells(clients, config, cells);
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out =
      "L,S,scheme,status,rms_rel,wasserstein,viol_count,viol_pct,peak_err,q10,q50,q90,comm_bytes\n";
  for (const auto& r : rows) {
    out += std::to_string(r.L) + ',' + std::to_string(r.S) + ',' + std::string(to_string(r.scheme)) +
           ',' + std::string(to_string(r.status)) + ',';
    if (r.metrics) {
      const auto& m = *r.metrics;
      out += format_double(m.rms_rel) + ',' + format_double(m.wasserstein) + ',' +
             std::to_string(m.violations.count) + ',' + format_double(m.violations.percent) + ',' +
             format_double(m.violations.peak_error) + ',' + format_double(m.quantiles[0]) + ',' +
             format_double(m.quantiles[1]) + ',' + format_double(m.quantiles[2]) + ',';
    } else {
      out += ",,,,,,,,";
    }
    out += std::to_string(r.comm_bytes) + '\n';
  }
  return out;
}

std::string metrics_json(const std::vector<MetricsRow>& rows, int indent) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["L"] = r.L;
    j["requested_L"] = r.requested_L;
    j["S"] = r.S;
    j["scheme"] = to_string(r.scheme);
    j["status"] = to_string(r.status);
    if (r.metrics) {
      const auto& m = *r.metrics;
      j["rms_rel"] = m.rms_rel;
      j["wasserstein"] = m.wasserstein;
      j["viol_count"] = m.violations.count;
      j["viol_pct"] = m.violations.percent;
      j["peak_err"] = m.violations.peak_error;
      j["q10"] = m.quantiles[0];
      j["q50"] = m.quantiles[1];
      j["q90"] = m.quantiles[2];
    }
    if (!r.failed_client.empty()) j["failed_client"] = r.failed_client;
    j["comm_bytes"] = r.comm_bytes;
    arr.push_back(std::move(j));
  }
  return arr.dump(indent);
}

}  // namespace fedenv
