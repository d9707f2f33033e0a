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

#ifndef FTRL_REGULARIZER_HPP_
#define FTRL_REGULARIZER_HPP_

#include <string>
#include <vector>

namespace ftrl {

enum class RegularizerKind { kNegentropy, kSquaredEuclidean, kTsallis };

/// Solution of the regularized choice problem together with its multipliers:
/// y_a = dh/dx_a + mu - nu_a with nu_a >= 0 and x_a nu_a = 0.  For steep
/// regularizers nu vanishes identically.
struct KktCertificate {
  std::vector<double> x;
  double mu = 0.0;
  std::vector<double> nu;
  double residual = 0.0;
};

struct SteepnessReport {
  bool declared_steep = false;
  // (distance to the boundary face, gradient norm) pairs at 10^-k, k = 2..8.
  std::vector<std::pair<double, double>> gradient_norms;
  bool consistent = false;
};

/// A strongly convex penalty h on the simplex, its derivatives, and the
/// induced choice map Q(y) = argmax_x <y,x> - h(x).
///
/// Available kinds: negentropy (sum x log x, steep), squared Euclidean
/// (||x||^2 / 2, non-steep) and Tsallis with q in (0,1)
/// ((sum x^q - 1)/(q - 1), steep).  All three are separable, so Hessians are
/// diagonal.
class Regularizer {
 public:
  static Regularizer negentropy();
  static Regularizer squared_euclidean();
  static Regularizer tsallis(double q);

  /// Parses "negentropy" | "euclidean" | "tsallis:q=<float>".
  static Regularizer parse(const std::string& config);
  std::string config_string() const;

  RegularizerKind kind() const { return kind_; }
  double q() const { return q_; }
  bool steep() const;

  /// h(x) on the closed simplex (0 log 0 := 0).
  double value(const std::vector<double>& x) const;

  /// dh/dx_a.  Steep kinds throw BoundaryGradientError at boundary points.
  std::vector<double> gradient(const std::vector<double>& x) const;

  /// Diagonal of the Hessian d2h/dx_a^2 (the builtin kinds are separable).
  std::vector<double> hessian_diagonal(const std::vector<double>& x) const;

  /// Inverse of the Hessian restricted to the support coordinates, as a dense
  /// |S| x |S| matrix.  Throws SingularHessianError when the restricted
  /// Hessian's conditioning exceeds 1e12.
  std::vector<std::vector<double>> inverse_restricted_hessian(
      const std::vector<double>& x, const std::vector<int>& support) const;

  /// The choice map Q.  Negentropy uses the logit closed form, squared
  /// Euclidean the exact simplex projection; Tsallis goes through kkt_solve.
  /// The output satisfies the simplex invariants exactly.
  std::vector<double> mirror_map(const std::vector<double>& y) const;

  /// Solves the choice problem by exhaustive support enumeration, each
  /// candidate support via damped Newton on the interior of its face
  /// (at most 6 actions).  Independent of the closed forms in mirror_map.
  KktCertificate kkt_solve(const std::vector<double>& y) const;

  /// Q on score differences: lifts z by placing 0 at the benchmark coordinate
  /// and applies the choice map.  Invariant under the lift chosen.
  std::vector<double> reduced_mirror_map(const std::vector<double>& z,
                                         int benchmark = 0) const;

  /// Gradient norms at points approaching a boundary face, plus a consistency
  /// check of the observed growth against the declared steepness flag.
  SteepnessReport steepness_probe(int num_actions = 3) const;

 private:
  Regularizer(RegularizerKind kind, double q) : kind_(kind), q_(q) {}

  double point_gradient(double xa) const;
  double point_hessian(double xa) const;

  RegularizerKind kind_;
  double q_;
};

}  // namespace ftrl

#endif  // FTRL_REGULARIZER_HPP_
