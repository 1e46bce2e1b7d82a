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


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fedenv/analytics.hpp"
#include "fedenv/bounds.hpp"
#include "fedenv/envelope.hpp"
#include "fedenv/fedsim.hpp"
#include "fedenv/ingest.hpp"
#include "fedenv/signal.hpp"

namespace py = pybind11;
using namespace fedenv;

namespace {

std::vector<ClientRecord> to_clients(const std::map<std::string, std::vector<double>>& signals) {
  std::vector<ClientRecord> out;
  for (const auto& [id, values] : signals) out.push_back({id, SampledSignal(values)});
  return out;
}

std::vector<Scheme> to_schemes(const std::vector<std::string>& names) {
  std::vector<Scheme> out;
  for (const auto& n : names) out.push_back(scheme_from_string(n));
  return out;
}

py::list rows_to_python(const std::vector<MetricsRow>& rows) {
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["L"] = r.L;
    d["requested_L"] = r.requested_L;
    d["S"] = r.S;
    d["scheme"] = std::string(to_string(r.scheme));
    d["status"] = std::string(to_string(r.status));
    d["comm_bytes"] = r.comm_bytes;
    if (r.metrics) {
      d["rms_rel"] = r.metrics->rms_rel;
      d["wasserstein"] = r.metrics->wasserstein;
      d["viol_count"] = r.metrics->violations.count;
      d["viol_pct"] = r.metrics->violations.percent;
      d["peak_err"] = r.metrics->violations.peak_error;
      d["quantiles"] = r.metrics->quantiles;
    } else {
      d["failed_client"] = r.failed_client;
    }
    out.append(d);
  }
  return out;
}

ExperimentConfig make_config(const std::vector<std::string>& schemes, std::vector<int> L_values,
                             std::vector<int> S_values, const std::string& target, int threads) {
  ExperimentConfig c;
  c.schemes = to_schemes(schemes);
  c.L_values = std::move(L_values);
  c.subsample_S = std::move(S_values);
  c.target = analytics_target_from_string(target);
  c.threads = threads;
  return c;
}

}  // namespace

PYBIND11_MODULE(_fedenv, m) {
  m.doc() = "Envelope approximations of time series and their server analytics";

  py::register_exception<RankDeficientError>(m, "RankDeficientError", PyExc_ValueError);
  py::register_exception<IngestError>(m, "IngestError", PyExc_RuntimeError);

  m.def("project",
        [](const std::vector<double>& values, int L) {
          return project(SampledSignal(values), L).packed();
        },
        py::arg("values"), py::arg("L"),
        "Packed [dc, cos_1..cos_L, sin_1..sin_L] projection of the samples.");
  m.def("sample",
        [](const std::vector<double>& packed, int n) {
          const SampledSignal s = sample(FourierSeries::from_packed(packed), n);
          return std::vector<double>(s.values().begin(), s.values().end());
        },
        py::arg("packed"), py::arg("n"));
  m.def("synth_power_law",
        [](double C, double p, const std::string& mode, int k_max, std::uint64_t seed) {
          const TailMode tm = mode == "signed" ? TailMode::kSigned : TailMode::kNonnegSymmetric;
          if (mode != "signed" && mode != "nonneg") {
            throw std::invalid_argument("mode must be 'signed' or 'nonneg'");
          }
          return synth_power_law({C, p, 0.0}, tm, k_max, seed).packed();
        },
        py::arg("C"), py::arg("p"), py::arg("mode"), py::arg("k_max"), py::arg("seed"));

  m.def("envelope",
        [](const std::vector<double>& values, int L, const std::string& scheme, int stride) {
          const SampledSignal f(values);
          const auto sol = solve_envelope(scheme_from_string(scheme), f, L,
                                          ConstraintGrid(f.size(), stride));
          py::dict d;
          d["coeffs"] = sol.coeffs.packed();
          d["scheme"] = std::string(to_string(sol.scheme));
          d["status"] = std::string(to_string(sol.status));
          d["sa1"] = sol.sa1;
          d["sa2"] = sol.sa2;
          d["max_violation_on_grid"] = sol.max_violation_on_grid;
          return d;
        },
        py::arg("values"), py::arg("L"), py::arg("scheme") = "l1", py::arg("stride") = 1,
        "Envelope of one signal; scheme is l1, l2, naive or mse.");

  m.def("quantile",
        [](const std::vector<double>& samples, double q) {
          return quantile(EmpiricalCdf(samples), q);
        },
        py::arg("samples"), py::arg("q"));
  m.def("wasserstein_1d",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return wasserstein_1d(EmpiricalCdf(a), EmpiricalCdf(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("sup_cdf_excess",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return sup_cdf_excess(EmpiricalCdf(a), EmpiricalCdf(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("violation_stats",
        [](const std::vector<double>& env, const std::vector<double>& truth) {
          const auto v = violation_stats(SampledSignal(env), SampledSignal(truth));
          return py::make_tuple(v.count, v.percent, v.peak_error);
        },
        py::arg("env_sum"), py::arg("true_sum"), "(count, percent, peak_error)");
  m.def("rms_relative",
        [](const std::vector<double>& approx, const std::vector<double>& truth) {
          return rms_relative(SampledSignal(approx), SampledSignal(truth));
        },
        py::arg("approx"), py::arg("truth"));
  m.def("comm_cost_bytes", &comm_cost_bytes, py::arg("L"), py::arg("clients"));

  m.def("naive_c0_tail", &naive_c0_tail, py::arg("C"), py::arg("p"), py::arg("L"),
        py::arg("k_max"));
  m.def("ratio_bound", &ratio_bound, py::arg("p"), py::arg("L"));
  m.def("cdf_gap_bound", &cdf_gap_bound, py::arg("p"), py::arg("L"), py::arg("f_max"));
  m.def("sa2_theory_bounds",
        [](double p, int L) {
          const auto b = sa2_theory_bounds(p, L);
          return py::make_tuple(b.lower, b.upper);
        },
        py::arg("p"), py::arg("L"));
  m.def("verify_bounds",
        [](const std::string& theorem, int trials, double p, const std::vector<int>& L_values,
           const std::vector<int>& S_values, std::uint64_t seed, int threads) {
          VerifyOptions opts;
          opts.threads = threads;
          VerificationReport r;
          if (theorem == "theorem1") {
            r = verify_theorem1(trials, p, L_values, seed, opts);
          } else if (theorem == "theorem2") {
            r = verify_theorem2(trials, p, L_values, std::nullopt, seed, opts);
          } else if (theorem == "theorem3") {
            r = verify_theorem3(trials, p, L_values, S_values, seed, opts);
          } else {
            throw std::invalid_argument("theorem must be theorem1, theorem2 or theorem3");
          }
          return r.to_json();
        },
        py::arg("theorem"), py::arg("trials"), py::arg("p"), py::arg("L_values"),
        py::arg("S_values") = std::vector<int>{1}, py::arg("seed") = 0, py::arg("threads") = 0,
        "Bound-verification report as a JSON string.");

  m.def("load_synchronized",
        [](const std::string& path, int min_days, const std::string& ts, const std::string& user,
           const std::string& value, int utc_offset_minutes) {
          ColumnMap cols;
          cols.timestamp = ts;
          cols.user = user;
          cols.value = value;
          cols.utc_offset_minutes = utc_offset_minutes;
          const auto loaded = load_csv(path, cols);
          const auto sync = filter_synchronized(loaded.readings, min_days);
          std::map<std::string, std::vector<double>> out;
          for (const auto& [id, s] : sync.signals) out[id].assign(s.values().begin(), s.values().end());
          return py::make_tuple(out, format_hour(sync.window_start_hour), loaded.skipped);
        },
        py::arg("path"), py::arg("min_days") = 30, py::arg("ts_column") = "timestamp",
        py::arg("user_column") = "user_id", py::arg("value_column") = "W3",
        py::arg("utc_offset_minutes") = 0,
        "(signals by user, window start, skipped rows) for users covering the window.");
  m.def("synthetic_dataset",
        [](const std::string& path, int users, int days, std::uint64_t seed, int gap_every) {
          write_csv(path, synthetic_readings(users, days, seed, 473352, gap_every));
        },
        py::arg("path"), py::arg("users"), py::arg("days"), py::arg("seed") = 0,
        py::arg("gap_every") = 0);

  m.def("experiment_tradeoff",
        [](const std::map<std::string, std::vector<double>>& signals,
           const std::vector<int>& L_values, const std::vector<std::string>& schemes,
           const std::string& target, int threads) {
          return rows_to_python(experiment_tradeoff(
              to_clients(signals), make_config(schemes, L_values, {1}, target, threads)));
        },
        py::arg("signals"), py::arg("L_values"), py::arg("schemes") = std::vector<std::string>{"l1"},
        py::arg("target") = "pooled", py::arg("threads") = 0);
  m.def("experiment_subsampling",
        [](const std::map<std::string, std::vector<double>>& signals,
           const std::vector<int>& L_values, const std::vector<int>& S_values,
           const std::vector<std::string>& schemes, const std::string& target, int threads) {
          return rows_to_python(experiment_subsampling(
              to_clients(signals), make_config(schemes, L_values, S_values, target, threads)));
        },
        py::arg("signals"), py::arg("L_values"), py::arg("S_values"),
        py::arg("schemes") = std::vector<std::string>{"l1"}, py::arg("target") = "pooled",
        py::arg("threads") = 0);
}
