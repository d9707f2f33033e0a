// Copyright 2026 The ftrl-dynamics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FTRL_RNG_HPP_
#define FTRL_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ftrl {

// Seeded generator with platform-independent uniform draws.  Bits are taken
// straight from mt19937_64 rather than through std::uniform_real_distribution,
// whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return std::ldexp(static_cast<double>(engine_() >> 11), -53); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t bits() { return engine_(); }

  int index(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

  // Uniform point on the probability simplex of the given dimension.
  std::vector<double> simplex_point(int dim) {
    std::vector<double> x(dim);
    double total = 0.0;
    for (int a = 0; a < dim; ++a) {
      double u = uniform();
      if (u <= 0.0) u = 1e-300;
      x[a] = -std::log(u);
      total += x[a];
    }
    for (int a = 0; a < dim; ++a) x[a] /= total;
    return x;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ftrl

#endif  // FTRL_RNG_HPP_
