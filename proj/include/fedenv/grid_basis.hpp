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

#ifndef FEDENV_GRID_BASIS_HPP_
#define FEDENV_GRID_BASIS_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace fedenv {

// cos/sin of 2 pi k j / n looked up by the residue (k j) mod n, so every
// harmonic on the grid reuses the same n table entries without phase drift.
class GridTrig {
 public:
  explicit GridTrig(int n) : n_(n), cos_(n), sin_(n) {
    for (int m = 0; m < n; ++m) {
      const double w = 2.0 * std::numbers::pi * m / n;
      cos_[m] = std::cos(w);
      sin_[m] = std::sin(w);
    }
  }

  int n() const { return n_; }
  double cos(int k, int j) const { return cos_[residue(k, j)]; }
  double sin(int k, int j) const { return sin_[residue(k, j)]; }

 private:
  int residue(int k, int j) const {
    return static_cast<int>((static_cast<std::int64_t>(k) * j) % n_);
  }

  int n_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

}  // namespace fedenv

#endif  // FEDENV_GRID_BASIS_HPP_
