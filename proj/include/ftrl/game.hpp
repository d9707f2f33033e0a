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

#ifndef FTRL_GAME_HPP_
#define FTRL_GAME_HPP_

#include <optional>
#include <string>
#include <vector>

namespace ftrl {

// Threshold for deciding whether an action belongs to the support of a mixed
// strategy.  Well above integrator tolerances, well below any meaningful
// probability mass.
inline constexpr double kSupportEpsilon = 1e-9;

// Per-player simplex sums must hold to this tolerance.
inline constexpr double kSimplexSumTolerance = 1e-12;

// Optional player / action names.
struct GameLabels {
  std::vector<std::string> players;                // size num_players or empty
  std::vector<std::vector<std::string>> actions;   // per player, or empty
};

/// A finite normal-form game: N players, a finite action set per player and a
/// full payoff tensor.  Payoffs are stored player-major; action profiles are
/// flattened in odometer order (last player's action varies fastest).
class FiniteGame {
 public:
  FiniteGame(std::vector<int> action_counts, std::vector<double> payoffs,
             GameLabels labels = {});

  int num_players() const { return static_cast<int>(action_counts_.size()); }
  const std::vector<int>& action_counts() const { return action_counts_; }
  int num_profiles() const { return num_profiles_; }
  bool zero_sum() const { return zero_sum_; }
  const GameLabels& labels() const { return labels_; }
  const std::vector<double>& payoffs() const { return payoffs_; }

  /// Payoff to `player` at the pure profile `actions` (one action per player).
  double payoff(int player, const std::vector<int>& actions) const;

  /// Payoff to `player` at the flattened profile index.
  double payoff_flat(int player, int profile_index) const {
    return payoffs_[player * num_profiles_ + profile_index];
  }

  int flatten_profile(const std::vector<int>& actions) const;
  std::vector<int> unflatten_profile(int profile_index) const;

 private:
  std::vector<int> action_counts_;
  std::vector<double> payoffs_;
  GameLabels labels_;
  int num_profiles_ = 0;
  bool zero_sum_ = false;
};

/// One simplex point per player; the primal state of the dynamics.
struct MixedProfile {
  std::vector<std::vector<double>> strategies;

  int num_players() const { return static_cast<int>(strategies.size()); }
  bool operator==(const MixedProfile&) const = default;
};

/// A non-empty subset of action indices per player (a face of the strategy
/// space).
struct SupportSet {
  std::vector<std::vector<int>> actions;  // sorted, non-empty per player

  bool operator==(const SupportSet&) const = default;
};

struct EquilibriumReport {
  MixedProfile profile;
  bool is_nash = false;
  bool is_pure = false;
  bool is_strict = false;
  bool is_quasi_strict = false;
  bool is_fully_mixed = false;
  bool is_partially_mixed = false;
  // Largest gain any player can obtain by a pure deviation; <= tol iff Nash.
  double worst_deviation_gap = 0.0;
  // min over players of (min supported payoff - max unsupported payoff);
  // +inf for players with full support.
  double supported_payoff_gap_c = 0.0;
};

// A candidate support whose indifference system could not be solved.
struct SkippedSupport {
  SupportSet support;
  std::string reason;  // "singular" | "no_convergence"
};

struct EnumerationResult {
  std::vector<EquilibriumReport> equilibria;
  std::vector<SkippedSupport> skipped;
};

// ---------------------------------------------------------------------------
// Profile helpers.

/// Throws DimensionMismatchError unless x matches the game's shape.
void check_profile_shape(const FiniteGame& game, const MixedProfile& x);

/// Throws InvalidArgumentError unless x satisfies the simplex invariants
/// (non-negative, sums to one within tolerance, non-empty support).
void validate_profile(const FiniteGame& game, const MixedProfile& x);

MixedProfile uniform_profile(const FiniteGame& game);

/// Support of x under kSupportEpsilon.
SupportSet support_of(const MixedProfile& x, double epsilon = kSupportEpsilon);

bool is_interior(const MixedProfile& x, double epsilon = kSupportEpsilon);

/// L-infinity distance between conformal profiles.
double profile_distance(const MixedProfile& a, const MixedProfile& b);

// ---------------------------------------------------------------------------
// Payoff evaluation.

/// Expected payoff to `player` under the multilinear extension of the payoff
/// tensor.  Defined for arbitrary per-player vectors (not only simplex
/// points), which the finite-difference tests rely on.
double mixed_payoff(const FiniteGame& game, const MixedProfile& x, int player);

/// v[i][a]: payoff to player i of pure action a against the opponents' mixed
/// play; independent of x[i].
std::vector<std::vector<double>> payoff_field(const FiniteGame& game,
                                              const MixedProfile& x);

// ---------------------------------------------------------------------------
// Equilibrium testing and classification.

/// Membership of v in the polar cone at x: per player, every supported
/// component is >= every component minus tol.
bool polar_cone_member(const std::vector<std::vector<double>>& v,
                       const MixedProfile& x, double tol);

/// Variational characterization: x is Nash iff payoff_field(x) lies in the
/// polar cone at x.
bool is_nash(const FiniteGame& game, const MixedProfile& x, double tol);

EquilibriumReport classify_equilibrium(const FiniteGame& game,
                                       const MixedProfile& x, double tol);

/// Support-enumeration equilibrium solver for desk-scale games
/// (<= 3 players, <= 4 actions per player; SizeBoundError otherwise).
EnumerationResult enumerate_equilibria(const FiniteGame& game, double tol);

/// A game is generic when every enumerated equilibrium is quasi-strict with
/// supported payoff gap above the threshold.
bool is_generic_game(const FiniteGame& game, double tol = 1e-8,
                     double gap_threshold = 1e-6);

// ---------------------------------------------------------------------------
// Faces.

/// The subgame played on the given support; payoffs are the matching slice of
/// the payoff tensor.
FiniteGame restrict_to_face(const FiniteGame& game, const SupportSet& support);

/// Zero-pads a profile of the face game back into the full strategy space.
MixedProfile embed_profile(const MixedProfile& face_profile,
                           const SupportSet& support,
                           const std::vector<int>& full_action_counts);

/// Drops the off-support coordinates of a full profile (no renormalization).
MixedProfile restrict_profile(const MixedProfile& x, const SupportSet& support);

}  // namespace ftrl

#endif  // FTRL_GAME_HPP_
