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


#include "fedenv/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fedenv/envelope.hpp"
#include "fedenv/parallel.hpp"
#include "json.hpp"

namespace fedenv {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

void require_smooth(double p, int L) {
  require(std::isfinite(p) && p > 0.5, "bound needs p > 0.5");
  require(L >= 1, "bound needs L >= 1");
}

BoundCheck make_check(std::string name, int trial, std::uint64_t seed, int L,
                      double measured, double lower, double upper, bool hard = true) {
  BoundCheck c;
  c.check = std::move(name);
  c.trial = trial;
  c.seed = seed;
  c.L = L;
  c.measured = measured;
  c.lower = lower;
  c.upper = upper;
  c.hard = hard;
  c.ok = measured >= lower && measured <= upper;
  return c;
}

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double naive_c0_tail(double C, double p, int bandwidth, int k_max) {
  require(std::isfinite(C) && std::isfinite(p), "tail sum needs finite C and p");
  require(bandwidth >= 0, "tail sum needs L >= 0");
  double acc = 0.0;
  // Smallest terms first.
  for (int k = k_max; k > bandwidth; --k) acc += C / std::pow(k, p);
  return 2.0 * acc;
}

double truncation_error(double C, double p, int k_max) {
  require(k_max >= 1, "truncation error needs k_max >= 1");
  if (p <= 1.0) return kInf;
  return C / ((p - 1.0) * std::pow(k_max, p - 1.0));
}

Sa2Bounds sa2_theory_bounds(double p, int bandwidth) {
  require_smooth(p, bandwidth);
  const double e = 2.0 * p - 1.0;
  return {2.0 / (e * std::pow(bandwidth + 1.0, e)), 2.0 / (e * std::pow(bandwidth, e))};
}

double ratio_bound(double p, int bandwidth) {
  // The ratio stays defined at p = 0.5, where it is identically 1.
  require(std::isfinite(p) && p >= 0.5, "ratio bound needs p >= 0.5");
  require(bandwidth >= 1, "bound needs L >= 1");
  return std::pow(1.0 + 1.0 / bandwidth, 2.0 * p - 1.0);
}

double cdf_gap_bound(double p, int bandwidth, double f_max) {
  require_smooth(p, bandwidth);
  require(std::isfinite(f_max) && f_max > 0.0, "cdf gap bound needs f_max > 0");
  const double e = 2.0 * p - 1.0;
  const double C = (std::cbrt(4.0) + 2.0 / std::cbrt(16.0)) * std::pow(f_max, 2.0 / 3.0) /
                   std::cbrt(e);
  return C / std::pow(bandwidth, e / 3.0);
}

void SubsampleBoundParams::validate() const {
  require_smooth(p, L);
  require(n >= 1, "subsample bound needs n >= 1");
  require(std::isfinite(mu) && mu >= 0.0, "mu must be finite and >= 0");
  require(std::isfinite(c) && c >= 0.0, "c must be finite and >= 0");
  require(std::isfinite(c_prime) && c_prime >= 0.0, "c' must be finite and >= 0");
  require(std::isfinite(f_max) && f_max > 0.0, "f_max must be finite and > 0");
}

double subsampled_cdf_bound(const SubsampleBoundParams& params) {
  params.validate();
  const double e = 2.0 * params.p - 1.0;
  const double C = (std::cbrt(2.0) + 1.0 / std::cbrt(4.0)) * std::pow(params.f_max, 2.0 / 3.0);
  const double inner = 4.0 / (e * std::pow(params.L, e)) +
                       8.0 * params.mu * (params.c + params.c_prime) / params.n;
  return C * std::cbrt(inner);
}

double cprime_bound(int bandwidth, double sup_norm) {
  require(bandwidth >= 0, "c' bound needs L >= 0");
  require(std::isfinite(sup_norm) && sup_norm >= 0.0, "c' bound needs sup_norm >= 0");
  return 2.0 * std::numbers::pi * bandwidth * sup_norm;
}

double estimate_f_max(const EmpiricalCdf& cdf, int window) {
  require(window >= 1, "density window must be >= 1");
  const auto s = cdf.sorted_samples();
  require(static_cast<int>(s.size()) > window, "too few samples for the density window");
  const double mass = static_cast<double>(window) / static_cast<double>(s.size());
  double best = 0.0;
  for (std::size_t i = 0; i + window < s.size(); ++i) {
    const double width = s[i + window] - s[i];
    if (width > 0.0) best = std::max(best, mass / width);
  }
  require(best > 0.0, "samples are too concentrated to estimate a density");
  return best;
}

double estimate_max_slope(const SampledSignal& signal) {
  const int n = signal.size();
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    worst = std::max(worst, std::abs(signal[(j + 1) % n] - signal[j]));
  }
  return worst * n;
}

double BoundCheck::slack() const { return std::min(upper - measured, measured - lower); }

int VerificationReport::hard_violations() const {
  return static_cast<int>(
      std::count_if(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.hard && !c.ok; }));
}

int VerificationReport::count(const std::string& check) const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(),
                                        [&](const BoundCheck& c) { return c.check == check; }));
}

std::string VerificationReport::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["theorem"] = theorem;
  j["p"] = p;
  j["seed"] = seed;
  j["trials"] = trials;
  j["L_values"] = L_values;
  j["truncation_error"] = truncation_error;
  j["hard_violations"] = hard_violations();
  auto& rows = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json r;
    r["check"] = c.check;
    r["trial"] = c.trial;
    r["seed"] = c.seed;
    r["L"] = c.L;
    r["measured"] = c.measured;
    // Open ends serialize as null.
    r["lower"] = c.lower;
    r["upper"] = c.upper;
    r["slack"] = c.slack();
    r["hard"] = c.hard;
    r["ok"] = c.ok;
    rows.push_back(std::move(r));
  }
  return j.dump(indent);
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  // splitmix64 step so neighbouring run seeds do not share trial seeds.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

VerificationReport verify_theorem1(int trials, double p, const std::vector<int>& L_values,
                                   std::uint64_t seed, const VerifyOptions& opts) {
  require(trials >= 1, "need at least one trial");
  require(!L_values.empty(), "need at least one L");
  for (int L : L_values) require_smooth(p, L);

  VerificationReport report;
  report.theorem = "theorem1";
  report.p = p;
  report.seed = seed;
  report.trials = trials;
  report.L_values = L_values;
  report.truncation_error =
      truncation_error(1.0, p, 20 * *std::min_element(L_values.begin(), L_values.end()));

  const int cells = trials * static_cast<int>(L_values.size());
  std::vector<std::vector<BoundCheck>> out(cells);
  parallel_for(
      cells,
      [&](int cell) {
        const int trial = cell / static_cast<int>(L_values.size());
        const int L = L_values[cell % L_values.size()];
        const std::uint64_t ts = trial_seed(seed, trial);
        const int k_max = 20 * L;
        const int n = 8 * k_max;
        const ConstraintGrid grid(n);
        auto fail = [&](const EnvelopeSolution& s) {
          throw std::runtime_error("theorem1 trial " + std::to_string(trial) + " L=" +
                                   std::to_string(L) + ": " +
                                   std::string(to_string(s.status)));
        };

        const auto signed_sig = sample(synth_power_law({1.0, p, 0.0}, TailMode::kSigned, k_max, ts), n);
        const auto l2 = envelope_l2(signed_sig, L, grid);
        if (!l2.ok()) fail(l2);
        const auto naive = naive_envelope(signed_sig, L);
        const double ratio = naive.sa2 / l2.sa2;
        out[cell].push_back(
            make_check("ratio", trial, ts, L, ratio, 1.0 - opts.tol, ratio_bound(p, L) + opts.tol));

        const auto nn_sig =
            sample(synth_power_law({1.0, p, 0.0}, TailMode::kNonnegSymmetric, k_max, ts), n);
        const auto l1 = envelope_l1(nn_sig, L, grid);
        if (!l1.ok()) fail(l1);
        const double target = naive_c0_tail(1.0, p, L, k_max);
        out[cell].push_back(make_check("equality", trial, ts, L, l1.sa1,
                                       target * (1.0 - opts.tol), target * (1.0 + opts.tol)));
        out[cell].push_back(make_check("l1_le_naive", trial, ts, L, l1.sa1, -kInf,
                                       naive_envelope(nn_sig, L).sa1 + 1e-9));

        const auto br = sa2_theory_bounds(p, L);
        out[cell].push_back(make_check("naive_sa2_bracket", trial, ts, L, naive.sa2,
                                       br.lower * (1.0 - opts.bracket_tol),
                                       br.upper * (1.0 + opts.bracket_tol)));
      },
      opts.threads);
  for (auto& v : out) report.checks.insert(report.checks.end(), v.begin(), v.end());
  return report;
}

VerificationReport verify_theorem2(int trials, double p, const std::vector<int>& L_values,
                                   std::optional<double> f_max_estimate, std::uint64_t seed,
                                   const VerifyOptions& opts) {
  require(trials >= 1, "need at least one trial");
  require(!L_values.empty(), "need at least one L");
  for (int L : L_values) require_smooth(p, L);
  if (f_max_estimate) require(*f_max_estimate > 0.0, "f_max must be > 0");

  std::vector<int> Ls = L_values;
  std::sort(Ls.begin(), Ls.end());
  const int k_max = 20 * Ls.back();
  const int n = 8 * k_max;

  VerificationReport report;
  report.theorem = "theorem2";
  report.p = p;
  report.seed = seed;
  report.trials = trials;
  report.L_values = Ls;
  report.truncation_error = truncation_error(1.0, p, k_max);

  std::vector<std::vector<BoundCheck>> out(trials);
  parallel_for(
      trials,
      [&](int trial) {
        const std::uint64_t ts = trial_seed(seed, trial);
        const auto sig = sample(synth_power_law({1.0, p, 0.0}, TailMode::kSigned, k_max, ts), n);
        const EmpiricalCdf fx = empirical_cdf(sig.values());
        const double f_max = f_max_estimate ? *f_max_estimate : estimate_f_max(fx);
        const double step = 1.0 / fx.size();
        std::vector<double> gaps;
        for (int L : Ls) {
          const auto l2 = envelope_l2(sig, L, ConstraintGrid(n));
          if (!l2.ok()) {
            throw std::runtime_error("theorem2 trial " + std::to_string(trial) + " L=" +
                                     std::to_string(L) + ": " +
                                     std::string(to_string(l2.status)));
          }
          const auto env = sample(l2.coeffs, n);
          const EmpiricalCdf fe = empirical_cdf(env.values());
          const double gap = sup_cdf_excess(fx, fe);
          gaps.push_back(gap);
          out[trial].push_back(
              make_check("cdf_gap", trial, ts, L, gap, -kInf, cdf_gap_bound(p, L, f_max)));
          out[trial].push_back(
              make_check("dominance", trial, ts, L, sup_cdf_excess(fe, fx), -kInf, step * (1 + 1e-12)));
        }
        int inversions = 0;
        for (std::size_t i = 1; i < gaps.size(); ++i) {
          if (gaps[i] > gaps[i - 1] + step) ++inversions;
        }
        out[trial].push_back(make_check("gap_trend", trial, ts, Ls.back(), inversions, -kInf,
                                        1.0, /*hard=*/false));
      },
      opts.threads);
  for (auto& v : out) report.checks.insert(report.checks.end(), v.begin(), v.end());
  return report;
}

VerificationReport verify_theorem3(int trials, double p, const std::vector<int>& L_values,
                                   const std::vector<int>& S_values, std::uint64_t seed,
                                   const VerifyOptions& opts) {
  require(trials >= 1, "need at least one trial");
  require(!L_values.empty() && !S_values.empty(), "need L and S values");
  for (int L : L_values) require_smooth(p, L);
  for (int S : S_values) require(S >= 1, "S must be >= 1");

  std::vector<int> Ls = L_values;
  std::sort(Ls.begin(), Ls.end());
  const int k_max = 20 * Ls.back();
  const int n = 8 * k_max;

  VerificationReport report;
  report.theorem = "theorem3";
  report.p = p;
  report.seed = seed;
  report.trials = trials;
  report.L_values = Ls;
  report.truncation_error = truncation_error(1.0, p, k_max);

  struct Cell {
    bool solved = false;
    double lift = 0.0;
    double gap = 0.0;
    double c = 0.0;
    double c_prime = 0.0;
    double f_max = 0.0;
  };
  const int per_trial = static_cast<int>(Ls.size() * S_values.size());
  std::vector<Cell> cells(static_cast<std::size_t>(trials) * per_trial);
  parallel_for(
      trials,
      [&](int trial) {
        const std::uint64_t ts = trial_seed(seed, trial);
        const auto sig = sample(synth_power_law({1.0, p, 0.0}, TailMode::kSigned, k_max, ts), n);
        const EmpiricalCdf fx = empirical_cdf(sig.values());
        const double f_max = estimate_f_max(fx);
        const double c = estimate_max_slope(sig);
        for (std::size_t li = 0; li < Ls.size(); ++li) {
          for (std::size_t si = 0; si < S_values.size(); ++si) {
            Cell& cell = cells[trial * per_trial + li * S_values.size() + si];
            const ConstraintGrid grid(n, S_values[si]);
            if (2 * Ls[li] + 1 > grid.active_count()) continue;
            const auto l2 = envelope_l2(sig, Ls[li], grid);
            if (!l2.ok()) {
              throw std::runtime_error("theorem3 trial " + std::to_string(trial) + " L=" +
                                       std::to_string(Ls[li]) + ": " +
                                       std::string(to_string(l2.status)));
            }
            const auto env = sample(l2.coeffs, n);
            const EmpiricalCdf fe = empirical_cdf(env.values());
            cell.solved = true;
            cell.lift = l2.sa1;
            cell.gap = std::max(sup_cdf_excess(fx, fe), sup_cdf_excess(fe, fx));
            cell.c = c;
            cell.c_prime = estimate_max_slope(env);
            cell.f_max = f_max;
          }
        }
      },
      opts.threads);

  for (int k = 0; k < per_trial; ++k) {
    double mu = 0.0;
    int solved = 0;
    for (int t = 0; t < trials; ++t) {
      const Cell& cell = cells[t * per_trial + k];
      if (cell.solved) {
        mu += cell.lift;
        ++solved;
      }
    }
    if (solved == 0) continue;
    mu = std::max(0.0, mu / solved);
    const int L = Ls[k / S_values.size()];
    const int S = S_values[k % S_values.size()];
    for (int t = 0; t < trials; ++t) {
      const Cell& cell = cells[t * per_trial + k];
      if (!cell.solved) continue;
      const SubsampleBoundParams params{p, L, (n + S - 1) / S, mu, cell.c, cell.c_prime,
                                        cell.f_max};
      auto check = make_check("subsampled_cdf_gap", t, trial_seed(seed, t), L, cell.gap, -kInf,
                              subsampled_cdf_bound(params), /*hard=*/false);
      check.check += "_S" + std::to_string(S);
      report.checks.push_back(std::move(check));
    }
  }
  std::stable_sort(report.checks.begin(), report.checks.end(),
                   [](const BoundCheck& a, const BoundCheck& b) { return a.trial < b.trial; });
  return report;
}

}  // namespace fedenv
