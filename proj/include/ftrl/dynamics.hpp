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

#ifndef FTRL_DYNAMICS_HPP_
#define FTRL_DYNAMICS_HPP_

#include <cstdint>
#include <vector>

#include "ftrl/game.hpp"
#include "ftrl/regularizer.hpp"

namespace ftrl {

/// Dual state: one score vector per player.  The canonical state space of the
/// dynamics; strategies are its image under the choice map.
struct ScoreProfile {
  std::vector<std::vector<double>> scores;

  int num_players() const { return static_cast<int>(scores.size()); }
};

/// Score differences against a per-player benchmark action: for player i the
/// vector has length action_count - 1 (the benchmark coordinate is dropped).
struct ReducedScore {
  std::vector<std::vector<double>> diffs;
  std::vector<int> benchmarks;

  int num_players() const { return static_cast<int>(diffs.size()); }
};

enum class StateSpace { kScore, kReduced, kPrimal };

enum class SupportEventKind { kExit, kEnter };

struct SupportEvent {
  double time = 0.0;
  int player = 0;
  int action = 0;
  SupportEventKind kind = SupportEventKind::kExit;
  bool ambiguous = false;
};

struct IntegratorStats {
  std::int64_t steps_accepted = 0;
  std::int64_t steps_rejected = 0;
  double max_error_estimate = 0.0;
  // Largest per-step simplex drift absorbed by renormalization (primal runs).
  double max_renormalization_drift = 0.0;
};

/// Time-stamped flow samples.  `mixed` always carries the strategy image;
/// `scores` / `reduced` are filled according to `space`.
struct Trajectory {
  StateSpace space = StateSpace::kScore;
  std::vector<double> times;
  std::vector<ScoreProfile> scores;
  std::vector<ReducedScore> reduced;
  std::vector<MixedProfile> mixed;
  std::vector<SupportEvent> events;
  IntegratorStats stats;
};

enum class IntegrationMethod { kRk4Fixed, kRk45Adaptive };

struct IntegratorConfig {
  IntegrationMethod method = IntegrationMethod::kRk45Adaptive;
  double step = 0.01;        // rk4_fixed
  double rtol = 1e-8;        // rk45_adaptive
  double atol = 1e-10;       // rk45_adaptive
  double horizon = 10.0;
  double sample_interval = 0.1;
  double event_tolerance = 1e-8;
};

// ---------------------------------------------------------------------------
// State plumbing.

ScoreProfile zero_scores(const FiniteGame& game);

/// Canonical score lift of a strategy profile: y_i = grad h(x_i) per player.
/// Requires interior strategies for steep regularizers.
ScoreProfile score_lift(const Regularizer& reg, const MixedProfile& x);

MixedProfile mirror_profile(const Regularizer& reg, const ScoreProfile& y);
MixedProfile reduced_mirror_profile(const Regularizer& reg,
                                    const ReducedScore& z);

/// The projection to score differences: z_{i,a} = y_{i,a} - y_{i,b_i}.
/// Linear, surjective, kills per-player constant shifts.
ReducedScore reduce_scores(const ScoreProfile& y,
                           const std::vector<int>& benchmarks);
ReducedScore reduce_scores(const ScoreProfile& y);  // benchmark 0 per player

/// The lift with zero at each benchmark coordinate.
ScoreProfile lift_scores(const ReducedScore& z);

// ---------------------------------------------------------------------------
// Vector fields.

/// Score-space velocity: ydot_{i,a} = v_{i,a}(Q(y)).
ScoreProfile ftrl_vector_field(const FiniteGame& game, const Regularizer& reg,
                               const ScoreProfile& y);

/// Reduced velocity: zdot_{i,a} = v_{i,a}(x) - v_{i,b_i}(x) with x the
/// reduced mirror image of z.
ReducedScore reduced_vector_field(const FiniteGame& game,
                                  const Regularizer& reg,
                                  const ReducedScore& z);

/// Strategy-space velocity on a fixed support:
///   xdot_a = sum_b [g^{ab} - g^a g^b / G] v_b   over the support,
/// with g^{ab} the inverse restricted Hessian, g^a its row sums and G the
/// total mass; zero off support.  Per-player components sum to zero.
std::vector<std::vector<double>> mixed_strategy_field(
    const FiniteGame& game, const Regularizer& reg, const MixedProfile& x,
    const SupportSet& support);

/// xdot_a = x_a [v_a(x) - u(x)].
std::vector<std::vector<double>> replicator_field(const FiniteGame& game,
                                                  const MixedProfile& x);

/// xdot_a = v_a(x) - mean of v over supp(x) for supported a, zero otherwise.
std::vector<std::vector<double>> projection_field(const FiniteGame& game,
                                                  const MixedProfile& x);

// ---------------------------------------------------------------------------
// Integration.

/// Runge-Kutta integration of the score-space dynamics; samples at multiples
/// of sample_interval, each with its strategy image.
Trajectory integrate_scores(const FiniteGame& game, const Regularizer& reg,
                            const ScoreProfile& y0,
                            const IntegratorConfig& config);

Trajectory integrate_reduced(const FiniteGame& game, const Regularizer& reg,
                             const ReducedScore& z0,
                             const IntegratorConfig& config);

/// Primal integration for steep regularizers: runs the fixed-support strategy
/// dynamics on the face spanned by supp(x0), which is forward-invariant.
/// Per-step renormalization drift is logged in the trajectory stats.
Trajectory integrate_strategies_steep(const FiniteGame& game,
                                      const Regularizer& reg,
                                      const MixedProfile& x0,
                                      const IntegratorConfig& config);

/// Locates support changes of the strategy image along a score-space
/// trajectory by bisecting each offending sample step to event_tolerance.
std::vector<SupportEvent> detect_support_events(const FiniteGame& game,
                                                const Regularizer& reg,
                                                const Trajectory& trajectory,
                                                const IntegratorConfig& config);

/// Fundamental solution M(T) of the variational equation Mdot = J_V(z(t)) M,
/// M(0) = I, along the reduced flow from z0; J_V by central differences.
/// det M(T) is the local volume ratio of the flow map.
std::vector<std::vector<double>> flow_jacobian(const FiniteGame& game,
                                               const Regularizer& reg,
                                               const ReducedScore& z0, double T,
                                               const IntegratorConfig& config);

struct VariationalFlowResult {
  std::vector<double> times;
  std::vector<double> determinants;
  std::vector<std::vector<double>> final_matrix;
  IntegratorStats stats;
};

/// Reduced flow together with its variational equation; records det M(t) at
/// every sample time.
VariationalFlowResult integrate_variational(const FiniteGame& game,
                                            const Regularizer& reg,
                                            const ReducedScore& z0,
                                            const IntegratorConfig& config);

}  // namespace ftrl

#endif  // FTRL_DYNAMICS_HPP_
