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

#include "fedenv/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fedenv/grid_basis.hpp"

namespace fedenv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

}  // namespace

FourierSeries::FourierSeries(double dc) : dc_(dc) {
  require_finite(dc, "dc coefficient");
}

FourierSeries::FourierSeries(double dc, std::vector<double> cos_coeffs,
                             std::vector<double> sin_coeffs)
    : dc_(dc), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
  if (cos_.size() != sin_.size()) {
    throw std::invalid_argument(
        "cosine and sine coefficient arrays must have equal length");
  }
  require_finite(dc_, "dc coefficient");
  for (double v : cos_) require_finite(v, "cosine coefficient");
  for (double v : sin_) require_finite(v, "sine coefficient");
}

FourierSeries FourierSeries::zeros(int bandwidth) {
  if (bandwidth < 0) throw std::invalid_argument("bandwidth must be >= 0");
  return FourierSeries(0.0, std::vector<double>(bandwidth, 0.0),
                       std::vector<double>(bandwidth, 0.0));
}

double FourierSeries::magnitude(int k) const {
  return 0.5 * std::hypot(cos_at(k), sin_at(k));
}

std::vector<double> FourierSeries::packed() const {
  std::vector<double> out;
  out.reserve(size());
  out.push_back(dc_);
  out.insert(out.end(), cos_.begin(), cos_.end());
  out.insert(out.end(), sin_.begin(), sin_.end());
  return out;
}

FourierSeries FourierSeries::from_packed(std::span<const double> packed) {
  if (packed.empty() || packed.size() % 2 == 0) {
    throw std::invalid_argument("packed coefficient vector must have odd length");
  }
  const std::size_t L = (packed.size() - 1) / 2;
  return FourierSeries(packed[0],
                       std::vector<double>(packed.begin() + 1,
                                           packed.begin() + 1 + L),
                       std::vector<double>(packed.begin() + 1 + L, packed.end()));
}

FourierSeries FourierSeries::padded(int bandwidth) const {
  if (bandwidth < this->bandwidth()) {
    throw std::invalid_argument("padded bandwidth must not shrink the series");
  }
  auto c = cos_;
  auto s = sin_;
  c.resize(bandwidth, 0.0);
  s.resize(bandwidth, 0.0);
  return FourierSeries(dc_, std::move(c), std::move(s));
}

FourierSeries FourierSeries::with_dc(double dc) const {
  return FourierSeries(dc, cos_, sin_);
}

SampledSignal::SampledSignal(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("signal has no samples");
  for (double v : values_) require_finite(v, "sample value");
}

double SampledSignal::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

double SampledSignal::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SampledSignal::mean_square() const {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return acc / size();
}

void SmoothnessParams::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) {
    throw std::invalid_argument("smoothness constant C must be positive");
  }
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw std::invalid_argument("smoothness exponent p must be positive");
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("smoothness slack eps must be nonnegative");
  }
}

double evaluate(const FourierSeries& series, double t) {
  double acc = series.dc();
  const int L = series.bandwidth();
  for (int k = 1; k <= L; ++k) {
    const double w = kTwoPi * k * t;
    acc += series.cos_at(k) * std::cos(w) + series.sin_at(k) * std::sin(w);
  }
  return acc;
}

FourierSeries project(const SampledSignal& signal, int bandwidth) {
  if (bandwidth < 0) throw std::invalid_argument("bandwidth must be >= 0");
  const int n = signal.size();
  if (2 * bandwidth + 1 > n) {
    throw RankDeficientError("projection needs 2L+1 <= n (L=" +
                             std::to_string(bandwidth) +
                             ", n=" + std::to_string(n) + ")");
  }
  const GridTrig trig(n);
  const auto f = signal.values();
  double dc = 0.0;
  for (double v : f) dc += v;
  dc /= n;
  std::vector<double> c(bandwidth, 0.0);
  std::vector<double> s(bandwidth, 0.0);
  for (int k = 1; k <= bandwidth; ++k) {
    double ac = 0.0;
    double as = 0.0;
    for (int j = 0; j < n; ++j) {
      ac += f[j] * trig.cos(k, j);
      as += f[j] * trig.sin(k, j);
    }
    c[k - 1] = 2.0 * ac / n;
    s[k - 1] = 2.0 * as / n;
  }
  return FourierSeries(dc, std::move(c), std::move(s));
}

SampledSignal sample(const FourierSeries& series, int n) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  const GridTrig trig(n);
  const int L = series.bandwidth();
  std::vector<double> out(n, series.dc());
  for (int j = 0; j < n; ++j) {
    double acc = series.dc();
    for (int k = 1; k <= L; ++k) {
      acc += series.cos_at(k) * trig.cos(k, j) + series.sin_at(k) * trig.sin(k, j);
    }
    out[j] = acc;
  }
  return SampledSignal(std::move(out));
}

FourierSeries synth_power_law(const SmoothnessParams& params, TailMode mode,
                              int k_max, std::uint64_t seed) {
  params.validate();
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  Rng rng(seed);
  const double dc = rng.uniform();
  std::vector<double> c(k_max, 0.0);
  std::vector<double> s(k_max, 0.0);
  for (int k = 1; k <= k_max; ++k) {
    const double amp = 2.0 * params.C / std::pow(static_cast<double>(k), params.p);
    if (mode == TailMode::kNonnegSymmetric) {
      c[k - 1] = amp;
    } else {
      const double phase = kTwoPi * rng.uniform();
      c[k - 1] = amp * std::cos(phase);
      s[k - 1] = amp * std::sin(phase);
    }
  }
  return FourierSeries(dc, std::move(c), std::move(s));
}

bool check_decay(const FourierSeries& series, const SmoothnessParams& params) {
  params.validate();
  const double exponent = params.p + 1.0 + params.eps;
  for (int k = 1; k <= series.bandwidth(); ++k) {
    const double limit = params.C / std::pow(static_cast<double>(k), exponent);
    // Relative slack so that a series built exactly at the limit passes.
    if (series.magnitude(k) > limit * (1.0 + 1e-12)) return false;
  }
  return true;
}

double energy(const FourierSeries& series) {
  double acc = 0.0;
  for (double v : series.cos_coeffs()) acc += v * v;
  for (double v : series.sin_coeffs()) acc += v * v;
  return series.dc() * series.dc() + 0.5 * acc;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace fedenv
