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

#ifndef FEDENV_SIGNAL_HPP_
#define FEDENV_SIGNAL_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedenv {

// Thrown when a projection or fit asks for more coefficients than the grid
// can determine (2L+1 > number of samples).
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Real bandlimited trigonometric series on [0,1]:
//
//   f(t) = dc + sum_{k=1..L} cos_k cos(2 pi k t) + sin_k sin(2 pi k t)
//
// In terms of the complex coefficients a[k] of a real signal,
// dc = a[0], cos_k = 2 Re a[k] and sin_k = -2 Im a[k]. The series therefore
// carries exactly 2L+1 real numbers.
class FourierSeries {
 public:
  FourierSeries() = default;

  // A constant series (L = 0).
  explicit FourierSeries(double dc);

  // Throws std::invalid_argument if the two arrays differ in length or any
  // value is not finite.
  FourierSeries(double dc, std::vector<double> cos_coeffs,
                std::vector<double> sin_coeffs);

  static FourierSeries zeros(int bandwidth);

  int bandwidth() const { return static_cast<int>(cos_.size()); }
  // Number of real coefficients, 2L+1.
  int size() const { return 2 * bandwidth() + 1; }

  double dc() const { return dc_; }
  std::span<const double> cos_coeffs() const { return cos_; }
  std::span<const double> sin_coeffs() const { return sin_; }

  // Harmonic k in 1..L.
  double cos_at(int k) const { return cos_[k - 1]; }
  double sin_at(int k) const { return sin_[k - 1]; }

  // |a[k]| for the complex coefficient of harmonic k >= 1.
  double magnitude(int k) const;

  // Packed layout [dc, cos_1..cos_L, sin_1..sin_L]; the order used by the
  // solvers and the bindings.
  std::vector<double> packed() const;
  static FourierSeries from_packed(std::span<const double> packed);

  // Same series with zero-padded harmonics up to `bandwidth` (>= current).
  FourierSeries padded(int bandwidth) const;

  FourierSeries with_dc(double dc) const;

  bool operator==(const FourierSeries&) const = default;

 private:
  double dc_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

// Samples of a signal on the uniform periodic grid t_j = j/n, j = 0..n-1.
class SampledSignal {
 public:
  SampledSignal() = default;
  // Throws std::invalid_argument on an empty or non-finite input.
  explicit SampledSignal(std::vector<double> values);

  int size() const { return static_cast<int>(values_.size()); }
  std::span<const double> values() const { return values_; }
  double operator[](int j) const { return values_[j]; }
  double time(int j) const { return static_cast<double>(j) / size(); }

  double max() const;
  double sup_norm() const;
  double mean_square() const;

  bool operator==(const SampledSignal&) const = default;

 private:
  std::vector<double> values_;
};

// Decay-class constants: |a[k]| <= C / |k|^(p+1+eps).
struct SmoothnessParams {
  double C = 1.0;
  double p = 1.0;
  double eps = 0.0;

  void validate() const;
};

enum class TailMode { kSigned, kNonnegSymmetric };

double evaluate(const FourierSeries& series, double t);

// Discrete (rectangle-rule) projection onto harmonics 0..L.
// Throws RankDeficientError when 2L+1 > n.
FourierSeries project(const SampledSignal& signal, int bandwidth);

SampledSignal sample(const FourierSeries& series, int n);

// Truncated power-law series: |a[k]| = C / k^p for 1 <= k <= k_max.
// kNonnegSymmetric gives a real, even signal with a[k] >= 0; kSigned draws
// the phase of each harmonic from the seed. dc is drawn from the seed in
// [0, 1] in both modes.
FourierSeries synth_power_law(const SmoothnessParams& params, TailMode mode,
                              int k_max, std::uint64_t seed);

bool check_decay(const FourierSeries& series, const SmoothnessParams& params);

// Energy of the series over one period: dc^2 + 1/2 sum(cos^2 + sin^2).
double energy(const FourierSeries& series);

// Seeded generator whose uniform draws are identical on every platform
// (std:: distributions are implementation-defined, the engine is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();   // Box-Muller

 private:
  std::mt19937_64 engine_;
};

}  // namespace fedenv

#endif  // FEDENV_SIGNAL_HPP_
