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

#ifndef FTRL_ANALYSIS_HPP_
#define FTRL_ANALYSIS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ftrl/dynamics.hpp"
#include "ftrl/game.hpp"
#include "ftrl/regularizer.hpp"

namespace ftrl {

// ---------------------------------------------------------------------------
// Reports.

struct DivergenceSample {
  StateSpace space = StateSpace::kScore;
  std::vector<double> state;
  double divergence = 0.0;
};

struct VolumeReport {
  // (t, det of the reduced-flow Jacobian) along the probe trajectory.
  std::vector<std::pair<double, double>> det_jacobian_per_time;
  double max_abs_log_det = 0.0;
  // Monte Carlo cloud mode: log of the mean determinant over the cloud.
  std::vector<std::pair<double, double>> cloud_log_volume_per_time;
  std::vector<DivergenceSample> divergence_samples;
  double max_abs_divergence = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RecurrenceReport {
  MixedProfile start;
  double epsilon = 0.0;
  double horizon = 0.0;
  std::vector<double> return_times;
  bool recurrent = false;
  // Never strayed past epsilon from the start; excursions are not counted.
  bool stationary = false;
};

enum class StabilityVerdict {
  kAsymptoticallyStableEvidence,
  kUnstableEvidence,
  kInconclusive,
};

struct StabilityReport {
  MixedProfile candidate;
  double radius = 0.0;
  double set_radius = 0.0;  // > 0 probes a closed ball instead of a point
  int n_samples = 0;
  double fraction_converged = 0.0;
  double fraction_contained = 0.0;
  StabilityVerdict verdict = StabilityVerdict::kInconclusive;
};

struct CollapseSample {
  MixedProfile start;
  bool collapsed = false;
  double collapse_time = 0.0;
};

struct SupportCollapseReport {
  MixedProfile target;
  std::vector<CollapseSample> samples;
  double max_collapse_time = 0.0;
  double bound_t0 = 0.0;
  double g_constant = 0.0;
  double c_constant = 0.0;
  double probe_radius = 0.0;
  bool all_within_bound = false;
};

struct T0Bound {
  double g_constant = 0.0;  // bound on gradient differences over the simplex
  double c_constant = 0.0;  // uniform payoff gap on the probe ball
  double t0 = 0.0;          // 2 g / c
};

struct DriftReport {
  double initial_value = 0.0;
  double max_abs_drift = 0.0;
  double max_relative_drift = 0.0;
};

// ---------------------------------------------------------------------------
// Experiments.

/// Central finite-difference divergence of a flattened autonomous field.
using FlatField =
    std::function<std::vector<double>(const std::vector<double>&)>;
double finite_difference_divergence(const FlatField& field,
                                    const std::vector<double>& state);

/// Samples seeded random score and reduced states and checks that the
/// finite-difference divergence of both vector fields vanishes.
VolumeReport check_incompressibility(const FiniteGame& game,
                                     const Regularizer& reg, int n_points,
                                     double tol, std::uint64_t seed);

/// Determinant of the reduced-flow Jacobian along [0, T]; pass iff
/// |log det| stays below tol at every sample.  With cloud_points > 0 a seeded
/// Monte Carlo cloud around z0 is tracked as well.
VolumeReport volume_preservation_test(const FiniteGame& game,
                                      const Regularizer& reg,
                                      const ReducedScore& z0, double T,
                                      const IntegratorConfig& config,
                                      double tol, int cloud_points = 0,
                                      double cloud_radius = 0.1,
                                      std::uint64_t seed = 0);

/// Flags returns of the strategy trajectory into the epsilon-ball around x0
/// after an excursion beyond the 2-epsilon ball.
RecurrenceReport recurrence_probe(const FiniteGame& game,
                                  const Regularizer& reg,
                                  const MixedProfile& x0, double epsilon,
                                  double horizon,
                                  const IntegratorConfig& config);

struct StabilityOptions {
  double radius = 0.05;
  int n_samples = 50;
  double horizon = 200.0;
  double conv_tol = 1e-6;
  std::uint64_t seed = 0;
  double set_radius = 0.0;
  IntegratorConfig integrator;
};

/// Integrates seeded starts from the radius-ball around the candidate and
/// scores convergence and containment.  Verdict rule:
/// stable evidence iff fraction_converged >= 0.98 and fraction_contained = 1;
/// unstable evidence iff fraction_converged <= 0.02; otherwise inconclusive.
StabilityReport stability_probe(const FiniteGame& game, const Regularizer& reg,
                                const MixedProfile& candidate,
                                const StabilityOptions& options);

/// Support-preserving sampler: convex moves from `center` toward seeded
/// interior points, scaled to the L-infinity ball of the given radius.  With
/// min_distance > 0 the sampled points stay outside that distance.
std::vector<MixedProfile> sample_profiles_near(const FiniteGame& game,
                                               const MixedProfile& center,
                                               double radius, int n,
                                               std::uint64_t seed,
                                               double min_distance = 0.0);

/// Gradient-difference bound G over a per-player simplex grid (mesh 1/64),
/// payoff gap c on the sampled radius-ball around x_star, and the resulting
/// collapse-time bound t0 = 2 G / c.
T0Bound t0_bound(const FiniteGame& game, const Regularizer& reg,
                 const MixedProfile& x_star, double neighborhood_radius,
                 int gap_samples = 256, std::uint64_t seed = 20240901);

/// Measures, per start, the last support change after which the strategy
/// trajectory plays exactly supp(x_star), and compares the worst time against
/// the t0_bound computed on the ball spanned by the starts.
SupportCollapseReport support_collapse_time(const FiniteGame& game,
                                            const Regularizer& reg,
                                            const MixedProfile& x_star,
                                            const std::vector<MixedProfile>& starts,
                                            double horizon,
                                            const IntegratorConfig& config);

/// Drift of the conserved Fenchel-gap quantity
///   sum_i [ h(x*_i) + <y_i, Q(y_i)> - h(Q(y_i)) - <y_i, x*_i> ]
/// along a score trajectory of a two-player zero-sum game with interior
/// equilibrium x*.
DriftReport zero_sum_excursion_check(const FiniteGame& game,
                                     const Regularizer& reg,
                                     const MixedProfile& x_star,
                                     const Trajectory& trajectory);

}  // namespace ftrl

#endif  // FTRL_ANALYSIS_HPP_
