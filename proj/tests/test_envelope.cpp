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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fedenv/envelope.hpp"
#include "oracles.hpp"

using namespace fedenv;

namespace {

SampledSignal cosine(int n) {
  std::vector<double> v(n);
  for (int j = 0; j < n; ++j) v[j] = std::cos(2.0 * std::numbers::pi * j / n);
  return SampledSignal(v);
}

SampledSignal noise(Rng& rng, int n, double lo = 0.0, double hi = 5.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return SampledSignal(v);
}

SampledSignal power_law_signal(double p, TailMode mode, int k_max, int n,
                               std::uint64_t seed) {
  return sample(synth_power_law({1.0, p, 0.0}, mode, k_max, seed), n);
}

}  // namespace

TEST_CASE("ConstraintGrid") {
  CHECK(ConstraintGrid(720, 8).active_count() == 90);
  CHECK(ConstraintGrid(10, 3).active_indices() == std::vector<int>{0, 3, 6, 9});
  CHECK(ConstraintGrid(10, 3).active_count() == 4);
  CHECK_THROWS_AS(ConstraintGrid(10, 0), std::invalid_argument);
  CHECK_THROWS_AS(ConstraintGrid(0, 1), std::invalid_argument);
}

TEST_CASE("scheme names") {
  for (Scheme s : {Scheme::kL1Opt, Scheme::kL2Opt, Scheme::kNaive, Scheme::kMseBaseline}) {
    CHECK(scheme_from_string(to_string(s)) == s);
  }
  CHECK(scheme_from_string("l1") == Scheme::kL1Opt);
  CHECK_THROWS_AS(scheme_from_string("l3"), std::invalid_argument);
}

TEST_CASE("envelope_l1 examples") {
  SUBCASE("constant signal is its own envelope") {
    const SampledSignal sig(std::vector<double>(16, 2.5));
    const auto sol = envelope_l1(sig, 3, ConstraintGrid(16));
    REQUIRE(sol.ok());
    CHECK(sol.coeffs.dc() == doctest::Approx(2.5));
    for (double v : sol.coeffs.cos_coeffs()) CHECK(std::abs(v) < 1e-9);
    for (double v : sol.coeffs.sin_coeffs()) CHECK(std::abs(v) < 1e-9);
    CHECK(std::abs(sol.sa1) < 1e-9);
  }
  SUBCASE("cosine with L = 0") {
    const auto sol = envelope_l1(cosine(8), 0, ConstraintGrid(8));
    REQUIRE(sol.ok());
    CHECK(sol.coeffs.dc() == doctest::Approx(1.0));
    CHECK(sol.sa1 == doctest::Approx(1.0));
  }
  SUBCASE("nonneg symmetric power law stays under the naive tail sum") {
    const auto sig = power_law_signal(2.0, TailMode::kNonnegSymmetric, 50, 512, 1);
    const auto sol = envelope_l1(sig, 2, ConstraintGrid(512));
    REQUIRE(sol.ok());
    const double tail = oracle::tail_sum(1.0, 2.0, 2, 50);
    CHECK(tail == doctest::Approx(0.7502654672).epsilon(1e-9));
    CHECK(naive_envelope(sig, 2).sa1 == doctest::Approx(tail).epsilon(1e-9));
    // The optimum is strictly cheaper; an external LP solver (HiGHS) gives
    // 0.3520739533 for this instance, see tests/python.
    CHECK(sol.sa1 <= tail);
    CHECK(sol.sa1 == doctest::Approx(0.3520739533).epsilon(1e-8));
  }
  SUBCASE("LP value matches vertex enumeration on a tiny instance") {
    Rng rng(4);
    const auto sig = noise(rng, 6);
    const auto sol = envelope_l1(sig, 1, ConstraintGrid(6));
    REQUIRE(sol.ok());
    Eigen::MatrixXd A(6, 3);
    Eigen::VectorXd g(6);
    for (int j = 0; j < 6; ++j) {
      A.row(j) = oracle::basis_row(j / 6.0, 1);
      g[j] = sig[j];
    }
    const auto best = oracle::vertex_enumeration_lp(A, g, Eigen::Vector3d(1, 0, 0));
    REQUIRE(best.has_value());
    const double a0 = oracle::brute_dft({sig.values().begin(), sig.values().end()}, 1).dc;
    CHECK(std::abs(sol.sa1 - (*best - a0)) < 1e-9);
  }
}

TEST_CASE("envelope_l2 examples") {
  SUBCASE("constant") {
    const SampledSignal sig(std::vector<double>(9, -1.0));
    const auto sol = envelope_l2(sig, 2, ConstraintGrid(9));
    REQUIRE(sol.ok());
    CHECK(head_cost(sol.coeffs, project(sig, 2)) < 1e-18);
  }
  SUBCASE("bandlimited cosine") {
    const auto sig = cosine(8);
    const auto sol = envelope_l2(sig, 1, ConstraintGrid(8));
    REQUIRE(sol.ok());
    CHECK(head_cost(sol.coeffs, project(sig, 1)) < 1e-18);
  }
  SUBCASE("random signal matches the exhaustive projection oracle") {
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
      const auto sig = noise(rng, 12, -2.0, 2.0);
      const auto sol = envelope_l2(sig, 1, ConstraintGrid(12));
      REQUIRE(sol.ok());
      // Weighted metric (b0-a0)^2 + 1/2 |db|^2 as a plain projection in
      // y = (b0, b1/sqrt2, b2/sqrt2).
      const auto a = oracle::brute_dft({sig.values().begin(), sig.values().end()}, 1);
      Eigen::MatrixXd A(12, 3);
      Eigen::VectorXd g(12);
      for (int j = 0; j < 12; ++j) {
        A.row(j) = oracle::basis_row(j / 12.0, 1);
        A(j, 1) *= std::sqrt(2.0);
        A(j, 2) *= std::sqrt(2.0);
        g[j] = sig[j];
      }
      const Eigen::Vector3d ya(a.dc, a.cos_coeffs[0] / std::sqrt(2.0),
                               a.sin_coeffs[0] / std::sqrt(2.0));
      const auto y = oracle::exhaustive_projection(A, g, ya);
      REQUIRE(y.has_value());
      CHECK(std::abs(sol.coeffs.dc() - (*y)[0]) < 1e-8);
      CHECK(std::abs(sol.coeffs.cos_at(1) - (*y)[1] * std::sqrt(2.0)) < 1e-8);
      CHECK(std::abs(sol.coeffs.sin_at(1) - (*y)[2] * std::sqrt(2.0)) < 1e-8);
    }
  }
}

TEST_CASE("naive_envelope and mse_baseline") {
  const SampledSignal flat(std::vector<double>(10, 4.0));
  CHECK(naive_envelope(flat, 2).sa1 == doctest::Approx(0.0));
  CHECK(naive_envelope(flat, 2).coeffs.dc() == doctest::Approx(4.0));

  const auto naive = naive_envelope(cosine(8), 0);
  CHECK(std::abs(naive.coeffs.dc() - 1.0) < 1e-12);
  CHECK(naive.sa1 == doctest::Approx(1.0));

  const auto sig = power_law_signal(2.0, TailMode::kNonnegSymmetric, 50, 512, 2);
  CHECK(naive_envelope(sig, 2).sa1 <= oracle::tail_sum(1.0, 2.0, 2, 50) + 1e-12);

  const auto mse = mse_baseline(cosine(8), 0);
  CHECK(std::abs(mse.coeffs.dc()) < 1e-12);
  CHECK(mse.max_violation_on_grid == doctest::Approx(1.0));

  const auto bl = sample(FourierSeries(0.3, {1.0, -0.5}, {0.2, 0.1}), 9);
  const auto exact = mse_baseline(bl, 2);
  CHECK(exact.max_violation_on_grid < 1e-12);
  CHECK(exact.sa2 < 1e-12);

  CHECK(naive_envelope(flat, 5).status == SolveStatus::kRankDeficient);
  CHECK(mse_baseline(flat, 5).status == SolveStatus::kRankDeficient);
}

TEST_CASE("sa_costs") {
  Rng rng(21);
  const auto sig = noise(rng, 40);
  const auto a = project(sig, 4);
  const auto proj = sa_costs(sig, mse_baseline(sig, 4), 4);
  CHECK(std::abs(proj.sa1) < 1e-12);
  CHECK(proj.sa2 == doctest::Approx(tail_energy(sig, a)));

  const auto naive = naive_envelope(sig, 4);
  CHECK(sa_costs(sig, naive, 4).sa1 == doctest::Approx(naive.sa1));
  CHECK(naive.sa1 == doctest::Approx(grid_violation(sig, a)));
  CHECK_THROWS_AS(sa_costs(sig, naive, 3), std::invalid_argument);

  const auto pl = power_law_signal(2.0, TailMode::kNonnegSymmetric, 60, 480, 3);
  const auto l1 = envelope_l1(pl, 3, ConstraintGrid(480));
  REQUIRE(l1.ok());
  CHECK(sa_costs(pl, l1, 3).sa1 <= sa_costs(pl, naive_envelope(pl, 3), 3).sa1 + 1e-12);
}

TEST_CASE("rank deficiency is reported before solving") {
  const SampledSignal sig(std::vector<double>(720, 1.0));
  CHECK(envelope_l1(sig, 45, ConstraintGrid(720, 8)).status == SolveStatus::kRankDeficient);
  CHECK(envelope_l2(sig, 45, ConstraintGrid(720, 8)).status == SolveStatus::kRankDeficient);
  CHECK(envelope_l2(sig, 44, ConstraintGrid(720, 8)).ok());
  CHECK(envelope_l1(sig, 360, ConstraintGrid(720, 1)).status == SolveStatus::kRankDeficient);
  CHECK_THROWS_AS(envelope_l1(sig, 2, ConstraintGrid(700)), std::invalid_argument);
}

TEST_CASE("envelope properties on random signals") {
  Rng rng(99);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 64 + 16 * (trial % 3);
    const auto sig = (trial % 2 == 0)
                         ? noise(rng, n, -3.0, 7.0)
                         : power_law_signal(1.5 + 0.5 * (trial % 3),
                                            TailMode::kSigned, n / 3, n, trial);
    const double tol = envelope_tolerance(sig);
    const double slack = 1e-9 * (1.0 + sig.mean_square());
    double prev_l1 = INFINITY;
    double prev_l2 = INFINITY;
    for (int L : {1, 2, 4, 8}) {
      const ConstraintGrid full(n);
      const auto l1 = envelope_l1(sig, L, full);
      const auto l2 = envelope_l2(sig, L, full);
      const auto nv = naive_envelope(sig, L);
      const auto ms = mse_baseline(sig, L);
      REQUIRE(l1.ok());
      REQUIRE(l2.ok());
      for (const auto* s : {&l1, &l2, &nv}) {
        CHECK(s->max_violation_on_grid <= tol);
        CHECK(s->sa1 >= -tol);
      }
      CHECK(l1.sa1 <= nv.sa1 + slack);
      CHECK(l2.sa2 <= nv.sa2 + slack);
      CHECK(l1.sa1 <= prev_l1 + slack);
      CHECK(l2.sa2 <= prev_l2 + slack);
      prev_l1 = l1.sa1;
      prev_l2 = l2.sa2;
      const auto a = project(sig, L);
      for (const auto* s : {&l1, &l2, &nv}) {
        CHECK(head_cost(ms.coeffs, a) <= head_cost(s->coeffs, a) + 1e-15);
      }
      // Fewer constraints can only lower the L2 head cost.
      double prev_head = head_cost(l2.coeffs, a);
      for (int S : {2, 4, 8}) {
        const ConstraintGrid sub(n, S);
        if (2 * L + 1 > sub.active_count()) break;
        const auto s2 = envelope_l2(sig, L, sub);
        REQUIRE(s2.ok());
        const double h = head_cost(s2.coeffs, a);
        CHECK(h <= prev_head + slack);
        prev_head = h;
      }
    }
  }
}

TEST_CASE("L2 head cost is at least the tail energy (dense grid)") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const double p = 1.5 + 0.25 * static_cast<double>(seed % 4);
    const int L = 2 + static_cast<int>(seed % 3);
    const auto s = synth_power_law({1.0, p, 0.0}, TailMode::kSigned, 20 * L, seed);
    const int n = 8 * 20 * L;
    const auto sig = sample(s, n);
    const auto sol = envelope_l2(sig, L, ConstraintGrid(n));
    REQUIRE(sol.ok());
    const auto a = project(sig, L);
    CHECK(head_cost(sol.coeffs, a) >= tail_energy(sig, a) - 1e-9);
  }
}

TEST_CASE("L1 tie-break returns the closest point on the optimal face") {
  Rng rng(5);
  const auto sig = noise(rng, 32);
  const auto sol = envelope_l1(sig, 3, ConstraintGrid(32));
  REQUIRE(sol.ok());
  const auto lp_only = envelope_l1(sig, 3, ConstraintGrid(32));
  CHECK(sol.coeffs == lp_only.coeffs);  // deterministic
  const auto l2 = envelope_l2(sig, 3, ConstraintGrid(32));
  // The L2 optimum ignores the dc budget, so it can only be closer.
  const auto a = project(sig, 3);
  CHECK(head_cost(l2.coeffs, a) <= head_cost(sol.coeffs, a) + 1e-12);
}
