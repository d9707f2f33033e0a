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

#include "ftrl/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ftrl/errors.hpp"

namespace ftrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string shape_string(const std::vector<int>& counts) {
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(counts[i]);
  }
  return s;
}

}  // namespace

FiniteGame::FiniteGame(std::vector<int> action_counts,
                       std::vector<double> payoffs, GameLabels labels)
    : action_counts_(std::move(action_counts)),
      payoffs_(std::move(payoffs)),
      labels_(std::move(labels)) {
  if (action_counts_.size() < 2) {
    throw InvalidArgumentError("a game needs at least 2 players");
  }
  num_profiles_ = 1;
  for (int m : action_counts_) {
    if (m < 1) throw InvalidArgumentError("action counts must be positive");
    num_profiles_ *= m;
  }
  const std::size_t expected =
      static_cast<std::size_t>(num_players()) * num_profiles_;
  if (payoffs_.size() != expected) {
    throw InvalidArgumentError(
        "payoff tensor for a " + shape_string(action_counts_) + " game needs " +
        std::to_string(expected) + " entries, got " +
        std::to_string(payoffs_.size()));
  }
  for (double u : payoffs_) {
    if (!std::isfinite(u)) throw InvalidArgumentError("non-finite payoff");
  }
  zero_sum_ = true;
  for (int p = 0; p < num_profiles_ && zero_sum_; ++p) {
    double sum = 0.0;
    for (int i = 0; i < num_players(); ++i) sum += payoff_flat(i, p);
    if (std::abs(sum) > 1e-12) zero_sum_ = false;
  }
}

int FiniteGame::flatten_profile(const std::vector<int>& actions) const {
  if (actions.size() != action_counts_.size()) {
    throw DimensionMismatchError("profile has wrong number of players");
  }
  int idx = 0;
  for (int i = 0; i < num_players(); ++i) {
    if (actions[i] < 0 || actions[i] >= action_counts_[i]) {
      throw DimensionMismatchError("action index out of range");
    }
    idx = idx * action_counts_[i] + actions[i];
  }
  return idx;
}

std::vector<int> FiniteGame::unflatten_profile(int profile_index) const {
  std::vector<int> actions(num_players());
  for (int i = num_players() - 1; i >= 0; --i) {
    actions[i] = profile_index % action_counts_[i];
    profile_index /= action_counts_[i];
  }
  return actions;
}

double FiniteGame::payoff(int player, const std::vector<int>& actions) const {
  return payoff_flat(player, flatten_profile(actions));
}

void check_profile_shape(const FiniteGame& game, const MixedProfile& x) {
  if (x.num_players() != game.num_players()) {
    throw DimensionMismatchError("profile has wrong number of players");
  }
  for (int i = 0; i < game.num_players(); ++i) {
    if (static_cast<int>(x.strategies[i].size()) != game.action_counts()[i]) {
      throw DimensionMismatchError("strategy vector for player " +
                                   std::to_string(i) + " has wrong length");
    }
  }
}

void validate_profile(const FiniteGame& game, const MixedProfile& x) {
  check_profile_shape(game, x);
  for (int i = 0; i < game.num_players(); ++i) {
    double sum = 0.0;
    bool supported = false;
    for (double p : x.strategies[i]) {
      if (!(p >= 0.0)) {
        throw InvalidArgumentError("negative strategy probability");
      }
      if (p > kSupportEpsilon) supported = true;
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSimplexSumTolerance) {
      throw InvalidArgumentError("strategy of player " + std::to_string(i) +
                                 " sums to " + std::to_string(sum));
    }
    if (!supported) {
      throw InvalidArgumentError("empty support for player " +
                                 std::to_string(i));
    }
  }
}

MixedProfile uniform_profile(const FiniteGame& game) {
  MixedProfile x;
  x.strategies.reserve(game.num_players());
  for (int m : game.action_counts()) {
    x.strategies.emplace_back(m, 1.0 / m);
  }
  return x;
}

SupportSet support_of(const MixedProfile& x, double epsilon) {
  SupportSet s;
  s.actions.resize(x.num_players());
  for (int i = 0; i < x.num_players(); ++i) {
    for (int a = 0; a < static_cast<int>(x.strategies[i].size()); ++a) {
      if (x.strategies[i][a] > epsilon) s.actions[i].push_back(a);
    }
  }
  return s;
}

bool is_interior(const MixedProfile& x, double epsilon) {
  for (const auto& xi : x.strategies) {
    for (double p : xi) {
      if (p <= epsilon) return false;
    }
  }
  return true;
}

double profile_distance(const MixedProfile& a, const MixedProfile& b) {
  double d = 0.0;
  for (int i = 0; i < a.num_players(); ++i) {
    for (std::size_t k = 0; k < a.strategies[i].size(); ++k) {
      d = std::max(d, std::abs(a.strategies[i][k] - b.strategies[i][k]));
    }
  }
  return d;
}

double mixed_payoff(const FiniteGame& game, const MixedProfile& x,
                    int player) {
  check_profile_shape(game, x);
  double total = 0.0;
  for (int p = 0; p < game.num_profiles(); ++p) {
    const std::vector<int> a = game.unflatten_profile(p);
    double w = 1.0;
    for (int j = 0; j < game.num_players(); ++j) w *= x.strategies[j][a[j]];
    total += w * game.payoff_flat(player, p);
  }
  return total;
}

std::vector<std::vector<double>> payoff_field(const FiniteGame& game,
                                              const MixedProfile& x) {
  check_profile_shape(game, x);
  const int n = game.num_players();
  std::vector<std::vector<double>> v(n);
  for (int i = 0; i < n; ++i) v[i].assign(game.action_counts()[i], 0.0);

  for (int p = 0; p < game.num_profiles(); ++p) {
    const std::vector<int> a = game.unflatten_profile(p);
    double w = 1.0;
    for (int j = 0; j < n; ++j) w *= x.strategies[j][a[j]];
    for (int i = 0; i < n; ++i) {
      const double xi = x.strategies[i][a[i]];
      // Weight of the opponents' part of the profile.
      double w_minus_i;
      if (xi > 1e-300) {
        w_minus_i = w / xi;
      } else {
        w_minus_i = 1.0;
        for (int j = 0; j < n; ++j) {
          if (j != i) w_minus_i *= x.strategies[j][a[j]];
        }
      }
      v[i][a[i]] += w_minus_i * game.payoff_flat(i, p);
    }
  }
  return v;
}

bool polar_cone_member(const std::vector<std::vector<double>>& v,
                       const MixedProfile& x, double tol) {
  if (v.size() != x.strategies.size()) {
    throw DimensionMismatchError("score and profile player counts differ");
  }
  for (int i = 0; i < x.num_players(); ++i) {
    if (v[i].size() != x.strategies[i].size()) {
      throw DimensionMismatchError("score vector length mismatch");
    }
    double min_supported = kInf;
    double max_all = -kInf;
    for (std::size_t a = 0; a < v[i].size(); ++a) {
      if (x.strategies[i][a] > kSupportEpsilon) {
        min_supported = std::min(min_supported, v[i][a]);
      }
      max_all = std::max(max_all, v[i][a]);
    }
    if (min_supported < max_all - tol) return false;
  }
  return true;
}

bool is_nash(const FiniteGame& game, const MixedProfile& x, double tol) {
  return polar_cone_member(payoff_field(game, x), x, tol);
}

EquilibriumReport classify_equilibrium(const FiniteGame& game,
                                       const MixedProfile& x, double tol) {
  check_profile_shape(game, x);
  EquilibriumReport report;
  report.profile = x;

  const auto v = payoff_field(game, x);
  const SupportSet supp = support_of(x);

  bool all_singleton = true;
  bool all_full = true;
  report.worst_deviation_gap = -kInf;
  report.supported_payoff_gap_c = kInf;
  for (int i = 0; i < game.num_players(); ++i) {
    const int m = game.action_counts()[i];
    const int k = static_cast<int>(supp.actions[i].size());
    all_singleton = all_singleton && (k == 1);
    all_full = all_full && (k == m);

    const double u = mixed_payoff(game, x, i);
    double best = -kInf;
    for (double va : v[i]) best = std::max(best, va);
    report.worst_deviation_gap = std::max(report.worst_deviation_gap, best - u);

    if (k < m) {
      double min_supported = kInf;
      double max_unsupported = -kInf;
      std::vector<bool> in_supp(m, false);
      for (int a : supp.actions[i]) in_supp[a] = true;
      for (int a = 0; a < m; ++a) {
        if (in_supp[a]) {
          min_supported = std::min(min_supported, v[i][a]);
        } else {
          max_unsupported = std::max(max_unsupported, v[i][a]);
        }
      }
      report.supported_payoff_gap_c = std::min(
          report.supported_payoff_gap_c, min_supported - max_unsupported);
    }
  }

  report.is_nash = polar_cone_member(v, x, tol);
  report.is_pure = all_singleton;
  report.is_fully_mixed = all_full;
  report.is_partially_mixed = !all_singleton && !all_full;
  report.is_quasi_strict =
      report.is_nash && report.supported_payoff_gap_c > tol;
  report.is_strict = report.is_nash && report.is_pure &&
                     report.supported_payoff_gap_c > tol;
  return report;
}

// ---------------------------------------------------------------------------
// Support enumeration.

namespace {

// Candidate supports are scanned as per-player bitmasks.  For a candidate
// (S_1,...,S_N) the equilibrium conditions restricted to the support are
//   v_{i,a}(x) - v_{i,a0}(x) = 0   for a in S_i \ {a0},
//   sum_{a in S_i} x_{i,a} - 1 = 0,
// a square system in the supported coordinates.  For two players (and for any
// support where at most one player mixes) the system is linear and a single
// Newton step is exact elimination; the fully mixed multi-player case is
// genuinely multilinear and handled by the same damped Newton loop.
struct SupportSystem {
  const FiniteGame& game;
  const SupportSet& support;
  std::vector<int> offsets;  // start of player i's unknowns
  int dim = 0;

  explicit SupportSystem(const FiniteGame& g, const SupportSet& s)
      : game(g), support(s) {
    offsets.resize(g.num_players());
    for (int i = 0; i < g.num_players(); ++i) {
      offsets[i] = dim;
      dim += static_cast<int>(s.actions[i].size());
    }
  }

  MixedProfile to_profile(const Eigen::VectorXd& u) const {
    MixedProfile x;
    x.strategies.resize(game.num_players());
    for (int i = 0; i < game.num_players(); ++i) {
      x.strategies[i].assign(game.action_counts()[i], 0.0);
      for (std::size_t k = 0; k < support.actions[i].size(); ++k) {
        x.strategies[i][support.actions[i][k]] = u[offsets[i] + k];
      }
    }
    return x;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
    const MixedProfile x = to_profile(u);
    const auto v = payoff_field(game, x);
    Eigen::VectorXd f(dim);
    int row = 0;
    for (int i = 0; i < game.num_players(); ++i) {
      const auto& si = support.actions[i];
      const double v0 = v[i][si[0]];
      for (std::size_t k = 1; k < si.size(); ++k) {
        f[row++] = v[i][si[k]] - v0;
      }
      double sum = 0.0;
      for (std::size_t k = 0; k < si.size(); ++k) sum += u[offsets[i] + k];
      f[row++] = sum - 1.0;
    }
    return f;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const {
    Eigen::MatrixXd j(dim, dim);
    const double h = 1e-7;
    Eigen::VectorXd up = u, um = u;
    for (int k = 0; k < dim; ++k) {
      up[k] += h;
      um[k] -= h;
      j.col(k) = (residual(up) - residual(um)) / (2.0 * h);
      up[k] = u[k];
      um[k] = u[k];
    }
    return j;
  }
};

// Damped Newton from a given start; returns true when the residual drops
// below tolerance.  Sets `singular` when the Jacobian is rank-deficient.
bool solve_support_system(const SupportSystem& sys, Eigen::VectorXd& u,
                          bool& singular) {
  singular = false;
  Eigen::VectorXd f = sys.residual(u);
  double fnorm = f.lpNorm<Eigen::Infinity>();
  for (int iter = 0; iter < 80; ++iter) {
    if (fnorm < 1e-11) return true;
    Eigen::FullPivLU<Eigen::MatrixXd> lu;
    lu.setThreshold(1e-10);
    lu.compute(sys.jacobian(u));
    if (lu.rank() < sys.dim) {
      singular = true;
      return false;
    }
    const Eigen::VectorXd step = lu.solve(-f);
    double lambda = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 40; ++halvings, lambda *= 0.5) {
      const Eigen::VectorXd candidate = u + lambda * step;
      const Eigen::VectorXd fc = sys.residual(candidate);
      const double fcnorm = fc.lpNorm<Eigen::Infinity>();
      if (fcnorm < fnorm * (1.0 - 1e-4 * lambda) || fcnorm < 1e-11) {
        u = candidate;
        f = fc;
        fnorm = fcnorm;
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;
  }
  return fnorm < 1e-11;
}

}  // namespace

EnumerationResult enumerate_equilibria(const FiniteGame& game, double tol) {
  if (game.num_players() > 3) {
    throw SizeBoundError("support enumeration handles at most 3 players");
  }
  for (int m : game.action_counts()) {
    if (m > 4) {
      throw SizeBoundError(
          "support enumeration handles at most 4 actions per player");
    }
  }

  EnumerationResult result;
  const int n = game.num_players();

  // Odometer over non-empty per-player support masks.
  std::vector<int> masks(n, 1);
  const auto advance = [&]() {
    for (int i = n - 1; i >= 0; --i) {
      if (++masks[i] < (1 << game.action_counts()[i])) return true;
      masks[i] = 1;
    }
    return false;
  };

  do {
    SupportSet support;
    support.actions.resize(n);
    int num_mixed = 0;
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < game.action_counts()[i]; ++a) {
        if (masks[i] & (1 << a)) support.actions[i].push_back(a);
      }
      if (support.actions[i].size() > 1) ++num_mixed;
    }

    SupportSystem sys(game, support);
    // Uniform-on-support start; fully mixed 3-player systems additionally get
    // two perturbed starts since they are not linear.
    std::vector<Eigen::VectorXd> starts;
    Eigen::VectorXd u0(sys.dim);
    for (int i = 0; i < n; ++i) {
      const double p = 1.0 / support.actions[i].size();
      for (std::size_t k = 0; k < support.actions[i].size(); ++k) {
        u0[sys.offsets[i] + k] = p;
      }
    }
    starts.push_back(u0);
    if (n == 3 && num_mixed == 3) {
      for (int variant = 0; variant < 2; ++variant) {
        Eigen::VectorXd u = u0;
        for (int i = 0; i < n; ++i) {
          const int k = static_cast<int>(support.actions[i].size());
          if (k < 2) continue;
          double delta = (variant == 0) ? 0.2 : -0.2;
          u[sys.offsets[i]] += delta / k;
          u[sys.offsets[i] + 1] -= delta / k;
        }
        starts.push_back(u);
      }
    }

    bool any_singular = false;
    bool any_converged = false;
    for (auto& u : starts) {
      bool singular = false;
      if (!solve_support_system(sys, u, singular)) {
        any_singular = any_singular || singular;
        continue;
      }
      any_converged = true;

      // The solved coordinates must form a valid point of the face.
      bool feasible = true;
      for (int k = 0; k < sys.dim; ++k) {
        if (u[k] < -1e-9) feasible = false;
        if (u[k] < 0.0) u[k] = 0.0;
      }
      if (!feasible) continue;

      MixedProfile x = sys.to_profile(u);
      for (auto& xi : x.strategies) {
        double sum = 0.0;
        for (double p : xi) sum += p;
        for (double& p : xi) p /= sum;
      }
      if (!is_nash(game, x, tol)) continue;

      bool duplicate = false;
      for (const auto& found : result.equilibria) {
        if (profile_distance(found.profile, x) < 1e-6) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) {
        result.equilibria.push_back(classify_equilibrium(game, x, tol));
      }
    }
    if (!any_converged) {
      result.skipped.push_back(
          {support, any_singular ? "singular" : "no_convergence"});
    }
  } while (advance());

  return result;
}

bool is_generic_game(const FiniteGame& game, double tol,
                     double gap_threshold) {
  const EnumerationResult res = enumerate_equilibria(game, tol);
  if (res.equilibria.empty()) return false;
  for (const auto& eq : res.equilibria) {
    if (!eq.is_quasi_strict || !(eq.supported_payoff_gap_c > gap_threshold)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Faces.

FiniteGame restrict_to_face(const FiniteGame& game, const SupportSet& support) {
  if (static_cast<int>(support.actions.size()) != game.num_players()) {
    throw DimensionMismatchError("support has wrong number of players");
  }
  const int n = game.num_players();
  std::vector<int> counts(n);
  for (int i = 0; i < n; ++i) {
    if (support.actions[i].empty()) {
      throw InvalidArgumentError("empty support for player " +
                                 std::to_string(i));
    }
    for (int a : support.actions[i]) {
      if (a < 0 || a >= game.action_counts()[i]) {
        throw DimensionMismatchError("support action out of range");
      }
    }
    counts[i] = static_cast<int>(support.actions[i].size());
  }

  int face_profiles = 1;
  for (int c : counts) face_profiles *= c;
  std::vector<double> payoffs(static_cast<std::size_t>(n) * face_profiles);

  GameLabels labels;
  if (!game.labels().players.empty()) labels.players = game.labels().players;
  if (!game.labels().actions.empty()) {
    labels.actions.resize(n);
    for (int i = 0; i < n; ++i) {
      for (int a : support.actions[i]) {
        labels.actions[i].push_back(game.labels().actions[i][a]);
      }
    }
  }

  std::vector<int> face_actions(n, 0);
  for (int p = 0; p < face_profiles; ++p) {
    int rem = p;
    for (int i = n - 1; i >= 0; --i) {
      face_actions[i] = rem % counts[i];
      rem /= counts[i];
    }
    std::vector<int> full_actions(n);
    for (int i = 0; i < n; ++i) {
      full_actions[i] = support.actions[i][face_actions[i]];
    }
    const int full_index = game.flatten_profile(full_actions);
    for (int i = 0; i < n; ++i) {
      payoffs[static_cast<std::size_t>(i) * face_profiles + p] =
          game.payoff_flat(i, full_index);
    }
  }
  return FiniteGame(counts, std::move(payoffs), std::move(labels));
}

MixedProfile embed_profile(const MixedProfile& face_profile,
                           const SupportSet& support,
                           const std::vector<int>& full_action_counts) {
  MixedProfile x;
  x.strategies.resize(face_profile.num_players());
  for (int i = 0; i < face_profile.num_players(); ++i) {
    if (face_profile.strategies[i].size() != support.actions[i].size()) {
      throw DimensionMismatchError("face profile does not match support");
    }
    x.strategies[i].assign(full_action_counts[i], 0.0);
    for (std::size_t k = 0; k < support.actions[i].size(); ++k) {
      x.strategies[i][support.actions[i][k]] = face_profile.strategies[i][k];
    }
  }
  return x;
}

MixedProfile restrict_profile(const MixedProfile& x,
                              const SupportSet& support) {
  MixedProfile face;
  face.strategies.resize(x.num_players());
  for (int i = 0; i < x.num_players(); ++i) {
    for (int a : support.actions[i]) {
      face.strategies[i].push_back(x.strategies[i][a]);
    }
  }
  return face;
}

}  // namespace ftrl
