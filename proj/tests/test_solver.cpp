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

#include "doctest.h"
#include "fedenv/signal.hpp"
#include "fedenv/solver.hpp"
#include "oracles.hpp"

using fedenv::LinearConstraints;
using fedenv::SolveStatus;

namespace {

LinearConstraints make(std::initializer_list<std::initializer_list<double>> rows,
                       std::initializer_list<double> rhs) {
  LinearConstraints c;
  c.A.resize(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.begin()->size()));
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) c.A(i, j++) = v;
    ++i;
  }
  c.g = Eigen::Map<const Eigen::VectorXd>(rhs.begin(), static_cast<Eigen::Index>(rhs.size()));
  return c;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

// Random instance with a known interior point so the polyhedron is nonempty.
LinearConstraints random_feasible(fedenv::Rng& rng, int m, int d) {
  LinearConstraints c;
  c.A.resize(m, d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) c.A(i, j) = rng.uniform(-1.0, 1.0);
  Eigen::VectorXd x0(d);
  for (int j = 0; j < d; ++j) x0[j] = rng.uniform(-1.0, 1.0);
  c.g = c.A * x0;
  for (int i = 0; i < m; ++i) c.g[i] -= rng.uniform(0.0, 0.5);
  return c;
}

}  // namespace

TEST_CASE("solve_lp examples") {
  SUBCASE("max of lower bounds") {
    const auto rep = fedenv::solve_lp(vec({1}), make({{1}, {1}}, {2, 5}));
    REQUIRE(rep.status == SolveStatus::kOptimal);
    CHECK(rep.x[0] == doctest::Approx(5.0));
    CHECK(rep.objective == doctest::Approx(5.0));
  }
  SUBCASE("2D cone vertex") {
    const auto cons = make({{1, 1}, {1, -1}}, {0, 0});
    const auto rep = fedenv::solve_lp(vec({1, 0}), cons);
    REQUIRE(rep.status == SolveStatus::kOptimal);
    const auto oracle = fedenv::oracle::vertex_enumeration_lp(cons.A, cons.g, vec({1, 0}));
    REQUIRE(oracle.has_value());
    CHECK(std::abs(rep.objective - *oracle) < 1e-12);
    CHECK(std::abs(rep.x[0]) < 1e-12);
    CHECK(std::abs(rep.x[1]) < 1e-12);
  }
  SUBCASE("unbounded with certified ray") {
    const auto cons = make({{1}}, {0});
    const auto rep = fedenv::solve_lp(vec({-1}), cons);
    REQUIRE(rep.status == SolveStatus::kUnbounded);
    CHECK((cons.A * rep.x).minCoeff() >= -1e-12);
    CHECK(vec({-1}).dot(rep.x) < 0.0);
  }
  SUBCASE("infeasible") {
    const auto rep = fedenv::solve_lp(vec({1}), make({{1}, {-1}}, {2, -1}));
    CHECK(rep.status == SolveStatus::kInfeasible);
  }
  SUBCASE("infeasible and unbounded direction") {
    // x >= 2, -x >= -1 has no solution even though c = -1 points down a ray.
    const auto rep = fedenv::solve_lp(vec({-1, 0}), make({{0, 1}, {0, -1}}, {2, -1}));
    CHECK(rep.status == SolveStatus::kInfeasible);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(fedenv::solve_lp(vec({1, 2}), make({{1}}, {0})),
                    std::invalid_argument);
  }
}

TEST_CASE("solve_lp matches vertex enumeration on random bounded instances") {
  fedenv::Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 3;
    const int m = d + 1 + trial % 5;
    auto cons = random_feasible(rng, m, d);
    // Objective inside the cone of the rows keeps the LP bounded.
    Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < m; ++i) c += rng.uniform() * cons.A.row(i).transpose();
    const auto rep = fedenv::solve_lp(c, cons);
    const auto oracle = fedenv::oracle::vertex_enumeration_lp(cons.A, cons.g, c);
    if (!oracle) continue;
    if (rep.status == SolveStatus::kRankDeficient) continue;
    REQUIRE(rep.status == SolveStatus::kOptimal);
    CHECK(std::abs(rep.objective - *oracle) <= 1e-9 * (1.0 + std::abs(*oracle)));
    CHECK(rep.max_constraint_violation <= 1e-8);
    ++checked;
  }
  CHECK(checked > 150);
}

TEST_CASE("solve_lp optimum invariant under positive row scaling") {
  fedenv::Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    auto cons = random_feasible(rng, 6, 2);
    Eigen::VectorXd c = cons.A.row(0).transpose() + cons.A.row(1).transpose() +
                        cons.A.row(2).transpose();
    const auto base = fedenv::solve_lp(c, cons);
    if (base.status != SolveStatus::kOptimal) continue;
    LinearConstraints scaled = cons;
    for (int i = 0; i < scaled.rows(); ++i) {
      const double s = std::pow(10.0, rng.uniform(-3.0, 3.0));
      scaled.A.row(i) *= s;
      scaled.g[i] *= s;
    }
    const auto rep = fedenv::solve_lp(c, scaled);
    REQUIRE(rep.status == SolveStatus::kOptimal);
    CHECK(std::abs(rep.objective - base.objective) <= 1e-8 * (1.0 + std::abs(base.objective)));
  }
}

TEST_CASE("solve_qp_identity examples") {
  SUBCASE("feasible target") {
    const auto rep = fedenv::solve_qp_identity(vec({0.5, 0.5}),
                                               make({{1, 0}, {0, 1}}, {0, 0}));
    REQUIRE(rep.status == SolveStatus::kOptimal);
    CHECK(rep.x[0] == 0.5);
    CHECK(rep.x[1] == 0.5);
    CHECK(rep.objective == 0.0);
  }
  SUBCASE("halfspace projection") {
    const auto cons = make({{1, 0}}, {1});
    const Eigen::VectorXd a = vec({0, 0});
    const auto rep = fedenv::solve_qp_identity(a, cons);
    REQUIRE(rep.status == SolveStatus::kOptimal);
    const Eigen::VectorXd row = cons.A.row(0).transpose();
    const Eigen::VectorXd closed =
        a + ((cons.g[0] - row.dot(a)) / row.squaredNorm()) * row;
    CHECK((rep.x - closed).norm() < 1e-12);
    CHECK(rep.objective == doctest::Approx(1.0));
  }
  SUBCASE("separable projection") {
    const auto rep = fedenv::solve_qp_identity(vec({0, 0}),
                                               make({{1, 0}, {0, 1}}, {1, 1}));
    REQUIRE(rep.status == SolveStatus::kOptimal);
    CHECK(rep.x[0] == doctest::Approx(1.0));
    CHECK(rep.x[1] == doctest::Approx(1.0));
  }
  SUBCASE("infeasible") {
    const auto rep = fedenv::solve_qp_identity(vec({0}), make({{1}, {-1}}, {2, -1}));
    CHECK(rep.status == SolveStatus::kInfeasible);
  }
}

TEST_CASE("solve_qp_identity matches the exhaustive active-set oracle") {
  fedenv::Rng rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 1 + trial % 3;
    const int m = 1 + trial % 6;
    const auto cons = random_feasible(rng, m, d);
    Eigen::VectorXd a(d);
    for (int j = 0; j < d; ++j) a[j] = rng.uniform(-3.0, 3.0);
    const auto rep = fedenv::solve_qp_identity(a, cons);
    REQUIRE(rep.status == SolveStatus::kOptimal);
    CHECK(rep.kkt_residual <= 1e-7);
    const auto oracle = fedenv::oracle::exhaustive_projection(cons.A, cons.g, a);
    REQUIRE(oracle.has_value());
    CHECK((rep.x - *oracle).lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("solve_qp_identity redundant constraints and monotonicity") {
  fedenv::Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 2;
    const auto cons = random_feasible(rng, 5, d);
    Eigen::VectorXd a(d);
    for (int j = 0; j < d; ++j) a[j] = rng.uniform(-3.0, 3.0);
    const auto base = fedenv::solve_qp_identity(a, cons);
    REQUIRE(base.status == SolveStatus::kOptimal);

    // Nonnegative combination of existing rows with a looser rhs is implied.
    LinearConstraints more = cons;
    more.A.conservativeResize(6, d);
    more.g.conservativeResize(6);
    const double w0 = rng.uniform(), w1 = rng.uniform();
    more.A.row(5) = w0 * cons.A.row(0) + w1 * cons.A.row(1);
    more.g[5] = w0 * cons.g[0] + w1 * cons.g[1] - rng.uniform(0.0, 1.0);
    const auto rep = fedenv::solve_qp_identity(a, more);
    REQUIRE(rep.status == SolveStatus::kOptimal);
    CHECK((rep.x - base.x).lpNorm<Eigen::Infinity>() < 1e-8);

    LinearConstraints fewer;
    fewer.A = cons.A.topRows(3);
    fewer.g = cons.g.head(3);
    const auto relaxed = fedenv::solve_qp_identity(a, fewer);
    REQUIRE(relaxed.status == SolveStatus::kOptimal);
    CHECK(relaxed.objective <= base.objective + 1e-12);
  }
}

TEST_CASE("solvers on a trigonometric constraint block") {
  // 64 grid rows and 11 columns; exercises the pivoting paths at scale.
  const int n = 64;
  const int L = 5;
  LinearConstraints cons;
  cons.A.resize(n, 2 * L + 1);
  cons.g.resize(n);
  fedenv::Rng rng(1);
  for (int j = 0; j < n; ++j) {
    cons.A.row(j) = fedenv::oracle::basis_row(static_cast<double>(j) / n, L);
    cons.g[j] = rng.uniform(0.0, 10.0);
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * L + 1);
  c[0] = 1.0;
  const auto lp = fedenv::solve_lp(c, cons);
  REQUIRE(lp.status == SolveStatus::kOptimal);
  CHECK(lp.max_constraint_violation <= 1e-8 * 11);
  CHECK(lp.objective <= cons.g.maxCoeff() + 1e-9);

  const auto qp = fedenv::solve_qp_identity(Eigen::VectorXd::Zero(2 * L + 1), cons);
  REQUIRE(qp.status == SolveStatus::kOptimal);
  CHECK(qp.max_constraint_violation <= 1e-8 * 11);
}
