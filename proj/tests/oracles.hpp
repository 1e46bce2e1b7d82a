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

// Brute-force reference computations used only by the tests. Nothing here
// shares code with the library paths it checks.

#ifndef FEDENV_TESTS_ORACLES_HPP_
#define FEDENV_TESTS_ORACLES_HPP_

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace fedenv::oracle {

// Direct O(n L) DFT with std::cos/std::sin on t = j/n.
struct Dft {
  double dc = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
};

inline Dft brute_dft(const std::vector<double>& f, int L) {
  const int n = static_cast<int>(f.size());
  Dft out;
  for (double v : f) out.dc += v;
  out.dc /= n;
  for (int k = 1; k <= L; ++k) {
    double c = 0.0;
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      const double w = 2.0 * std::numbers::pi * k * j / n;
      c += f[j] * std::cos(w);
      s += f[j] * std::sin(w);
    }
    out.cos_coeffs.push_back(2.0 * c / n);
    out.sin_coeffs.push_back(2.0 * s / n);
  }
  return out;
}

// Row [1, cos(2 pi k t)..., sin(2 pi k t)...] in packed order.
inline Eigen::RowVectorXd basis_row(double t, int L) {
  Eigen::RowVectorXd row(2 * L + 1);
  row[0] = 1.0;
  for (int k = 1; k <= L; ++k) {
    row[k] = std::cos(2.0 * std::numbers::pi * k * t);
    row[L + k] = std::sin(2.0 * std::numbers::pi * k * t);
  }
  return row;
}

template <typename Fn>
void for_each_subset(int m, int max_size, Fn&& fn) {
  std::vector<int> idx;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    idx.clear();
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    if (static_cast<int>(idx.size()) <= max_size) fn(idx);
  }
}

// Euclidean projection of `a` onto {x : A x >= g} by enumerating every
// candidate active set, solving the equality-constrained projection, and
// keeping the best feasible point.
inline std::optional<Eigen::VectorXd> exhaustive_projection(
    const Eigen::MatrixXd& A, const Eigen::VectorXd& g,
    const Eigen::VectorXd& a, double feas_tol = 1e-10) {
  const int m = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  std::optional<Eigen::VectorXd> best;
  double best_obj = std::numeric_limits<double>::infinity();
  for_each_subset(m, d, [&](const std::vector<int>& S) {
    Eigen::VectorXd x = a;
    if (!S.empty()) {
      Eigen::MatrixXd As(S.size(), d);
      Eigen::VectorXd gs(S.size());
      for (std::size_t i = 0; i < S.size(); ++i) {
        As.row(i) = A.row(S[i]);
        gs[i] = g[S[i]];
      }
      const Eigen::MatrixXd gram = As * As.transpose();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd lambda = lu.solve(gs - As * a);
      x = a + As.transpose() * lambda;
    }
    if (((A * x - g).array() >= -feas_tol).all()) {
      const double obj = (x - a).squaredNorm();
      if (obj < best_obj) {
        best_obj = obj;
        best = x;
      }
    }
  });
  return best;
}

// min c^T x over vertices of {x : A x >= g}: every d-subset of rows with a
// nonsingular block defines a candidate vertex.
inline std::optional<double> vertex_enumeration_lp(const Eigen::MatrixXd& A,
                                                   const Eigen::VectorXd& g,
                                                   const Eigen::VectorXd& c,
                                                   double feas_tol = 1e-9) {
  const int m = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  std::optional<double> best;
  for_each_subset(m, d, [&](const std::vector<int>& S) {
    if (static_cast<int>(S.size()) != d) return;
    Eigen::MatrixXd As(d, d);
    Eigen::VectorXd gs(d);
    for (int i = 0; i < d; ++i) {
      As.row(i) = A.row(S[i]);
      gs[i] = g[S[i]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(As);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd x = lu.solve(gs);
    if (((A * x - g).array() >= -feas_tol).all()) {
      const double obj = c.dot(x);
      if (!best || obj < *best) best = obj;
    }
  });
  return best;
}

// 2 * sum_{k=L+1}^{K} C / k^p.
inline double tail_sum(double C, double p, int L, int K) {
  double acc = 0.0;
  for (int k = K; k > L; --k) acc += C / std::pow(k, p);
  return 2.0 * acc;
}

}  // namespace fedenv::oracle

#endif  // FEDENV_TESTS_ORACLES_HPP_
