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

#include "ftrl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "ftrl/errors.hpp"

namespace ftrl {

namespace {

using FlatState = std::vector<double>;
using Rhs = std::function<void(const FlatState&, FlatState&)>;
// Invoked after every accepted step; may adjust the state in place (e.g.
// renormalization of primal coordinates).
using PostStep = std::function<void(FlatState&, IntegratorStats&)>;
// Invoked at every sample time.
using SampleSink = std::function<void(double, const FlatState&)>;

constexpr double kTimeEps = 1e-12;

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = kB1 - 5179.0 / 57600, kE3 = kB3 - 7571.0 / 16695,
                 kE4 = kB4 - 393.0 / 640, kE5 = kB5 + 92097.0 / 339200,
                 kE6 = kB6 - 187.0 / 2100, kE7 = -1.0 / 40;

struct Stepper {
  const Rhs& rhs;
  int n;
  FlatState k1, k2, k3, k4, k5, k6, k7, tmp, y_new;

  explicit Stepper(const Rhs& f, int dim) : rhs(f), n(dim) {
    for (FlatState* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &tmp, &y_new}) {
      v->assign(n, 0.0);
    }
  }

  // One Dormand-Prince attempt from y with step h; fills y_new and returns
  // the scaled error estimate (accept when <= 1).
  double try_dopri(const FlatState& y, double h, double rtol, double atol) {
    rhs(y, k1);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * kA21 * k1[i];
    rhs(tmp, k2);
    for (int i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
    }
    rhs(tmp, k3);
    for (int i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
    }
    rhs(tmp, k4);
    for (int i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] +
                           kA54 * k4[i]);
    }
    rhs(tmp, k5);
    for (int i = 0; i < n; ++i) {
      tmp[i] = y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] +
                           kA64 * k4[i] + kA65 * k5[i]);
    }
    rhs(tmp, k6);
    for (int i = 0; i < n; ++i) {
      y_new[i] = y[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] +
                             kB5 * k5[i] + kB6 * k6[i]);
    }
    rhs(y_new, k7);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] +
                            kE5 * k5[i] + kE6 * k6[i] + kE7 * k7[i]);
      const double scale =
          atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    return err;
  }

  void rk4(const FlatState& y, double h) {
    rhs(y, k1);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(tmp, k2);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(tmp, k3);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(tmp, k4);
    for (int i = 0; i < n; ++i) {
      y_new[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
};

// Integrates the autonomous system to config.horizon, emitting samples at
// multiples of sample_interval (plus the endpoint).  Steps are clipped so
// sample times are hit exactly.
IntegratorStats integrate_core(const Rhs& rhs, FlatState& state,
                               const IntegratorConfig& config,
                               const SampleSink& sink,
                               const PostStep& post_step = nullptr) {
  if (!(config.horizon > 0.0)) throw InvalidArgumentError("horizon must be positive");
  if (!(config.sample_interval > 0.0)) {
    throw InvalidArgumentError("sample interval must be positive");
  }
  if (config.method == IntegrationMethod::kRk4Fixed && !(config.step > 0.0)) {
    throw InvalidArgumentError("fixed step must be positive");
  }

  IntegratorStats stats;
  Stepper stepper(rhs, static_cast<int>(state.size()));
  double t = 0.0;
  if (sink) sink(0.0, state);

  double next_sample = std::min(config.sample_interval, config.horizon);
  double h = config.method == IntegrationMethod::kRk4Fixed
                 ? config.step
                 : std::min(config.sample_interval / 8.0, 1e-2);

  while (t < config.horizon - kTimeEps) {
    const double bound = std::min(next_sample, config.horizon);
    double h_step = std::min(h, bound - t);

    if (config.method == IntegrationMethod::kRk4Fixed) {
      stepper.rk4(state, h_step);
      state = stepper.y_new;
      ++stats.steps_accepted;
      t += h_step;
    } else {
      bool clipped = h_step < h;
      bool accepted = false;
      while (!accepted) {
        const double err =
            stepper.try_dopri(state, h_step, config.rtol, config.atol);
        if (err <= 1.0) {
          state = stepper.y_new;
          t += h_step;
          ++stats.steps_accepted;
          stats.max_error_estimate =
              std::max(stats.max_error_estimate, err);
          if (!clipped) {
            // Clipped landing steps keep the controller's proposal alive.
            const double grow =
                err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h = h_step * std::clamp(grow, 0.2, 5.0);
          }
          accepted = true;
        } else {
          ++stats.steps_rejected;
          clipped = false;
          const double shrink = std::max(0.9 * std::pow(err, -0.2), 0.1);
          h_step *= std::min(shrink, 0.9);
          if (h_step < 1e-12 * (1.0 + std::abs(t))) {
            throw StepFailureError(
                "adaptive step control failed at t = " + std::to_string(t));
          }
        }
      }
    }

    if (post_step) post_step(state, stats);

    if (t >= next_sample - kTimeEps) {
      if (sink) sink(std::min(t, config.horizon), state);
      next_sample += config.sample_interval;
    }
    if (t >= config.horizon - kTimeEps && t < next_sample - kTimeEps &&
        std::abs(t - (next_sample - config.sample_interval)) > kTimeEps) {
      // Horizon fell between sample boundaries; emit the final state.
      if (sink) sink(config.horizon, state);
    }
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Flattening.

FlatState flatten(const std::vector<std::vector<double>>& parts) {
  FlatState s;
  for (const auto& p : parts) s.insert(s.end(), p.begin(), p.end());
  return s;
}

std::vector<std::vector<double>> unflatten(const FlatState& s,
                                           const std::vector<int>& sizes) {
  std::vector<std::vector<double>> parts(sizes.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    parts[i].assign(s.begin() + pos, s.begin() + pos + sizes[i]);
    pos += sizes[i];
  }
  return parts;
}

std::vector<int> reduced_sizes(const FiniteGame& game) {
  std::vector<int> sizes(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    sizes[i] = game.action_counts()[i] - 1;
  }
  return sizes;
}

void check_score_shape(const FiniteGame& game, const ScoreProfile& y) {
  if (y.num_players() != game.num_players()) {
    throw DimensionMismatchError("score profile has wrong number of players");
  }
  for (int i = 0; i < game.num_players(); ++i) {
    if (static_cast<int>(y.scores[i].size()) != game.action_counts()[i]) {
      throw DimensionMismatchError("score vector length mismatch");
    }
  }
}

void check_reduced_shape(const FiniteGame& game, const ReducedScore& z) {
  if (z.num_players() != game.num_players() ||
      z.benchmarks.size() != z.diffs.size()) {
    throw DimensionMismatchError("reduced score has wrong number of players");
  }
  for (int i = 0; i < game.num_players(); ++i) {
    if (static_cast<int>(z.diffs[i].size()) != game.action_counts()[i] - 1) {
      throw DimensionMismatchError("reduced score length mismatch");
    }
    if (z.benchmarks[i] < 0 || z.benchmarks[i] >= game.action_counts()[i]) {
      throw DimensionMismatchError("benchmark action out of range");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// State plumbing.

ScoreProfile zero_scores(const FiniteGame& game) {
  ScoreProfile y;
  for (int m : game.action_counts()) y.scores.emplace_back(m, 0.0);
  return y;
}

ScoreProfile score_lift(const Regularizer& reg, const MixedProfile& x) {
  ScoreProfile y;
  y.scores.reserve(x.strategies.size());
  for (const auto& xi : x.strategies) y.scores.push_back(reg.gradient(xi));
  return y;
}

MixedProfile mirror_profile(const Regularizer& reg, const ScoreProfile& y) {
  MixedProfile x;
  x.strategies.reserve(y.scores.size());
  for (const auto& yi : y.scores) x.strategies.push_back(reg.mirror_map(yi));
  return x;
}

MixedProfile reduced_mirror_profile(const Regularizer& reg,
                                    const ReducedScore& z) {
  MixedProfile x;
  x.strategies.reserve(z.diffs.size());
  for (int i = 0; i < z.num_players(); ++i) {
    x.strategies.push_back(reg.reduced_mirror_map(z.diffs[i], z.benchmarks[i]));
  }
  return x;
}

ReducedScore reduce_scores(const ScoreProfile& y,
                           const std::vector<int>& benchmarks) {
  if (benchmarks.size() != y.scores.size()) {
    throw DimensionMismatchError("one benchmark action per player required");
  }
  ReducedScore z;
  z.benchmarks = benchmarks;
  z.diffs.resize(y.num_players());
  for (int i = 0; i < y.num_players(); ++i) {
    const int b = benchmarks[i];
    if (b < 0 || b >= static_cast<int>(y.scores[i].size())) {
      throw DimensionMismatchError("benchmark action out of range");
    }
    for (int a = 0; a < static_cast<int>(y.scores[i].size()); ++a) {
      if (a != b) z.diffs[i].push_back(y.scores[i][a] - y.scores[i][b]);
    }
  }
  return z;
}

ReducedScore reduce_scores(const ScoreProfile& y) {
  return reduce_scores(y, std::vector<int>(y.num_players(), 0));
}

ScoreProfile lift_scores(const ReducedScore& z) {
  ScoreProfile y;
  y.scores.resize(z.num_players());
  for (int i = 0; i < z.num_players(); ++i) {
    const int m = static_cast<int>(z.diffs[i].size()) + 1;
    y.scores[i].assign(m, 0.0);
    int r = 0;
    for (int a = 0; a < m; ++a) {
      if (a != z.benchmarks[i]) y.scores[i][a] = z.diffs[i][r++];
    }
  }
  return y;
}

// ---------------------------------------------------------------------------
// Vector fields.

ScoreProfile ftrl_vector_field(const FiniteGame& game, const Regularizer& reg,
                               const ScoreProfile& y) {
  check_score_shape(game, y);
  ScoreProfile v;
  v.scores = payoff_field(game, mirror_profile(reg, y));
  return v;
}

ReducedScore reduced_vector_field(const FiniteGame& game,
                                  const Regularizer& reg,
                                  const ReducedScore& z) {
  check_reduced_shape(game, z);
  const MixedProfile x = reduced_mirror_profile(reg, z);
  const auto v = payoff_field(game, x);
  ReducedScore dz;
  dz.benchmarks = z.benchmarks;
  dz.diffs.resize(z.num_players());
  for (int i = 0; i < z.num_players(); ++i) {
    const int b = z.benchmarks[i];
    for (int a = 0; a < static_cast<int>(v[i].size()); ++a) {
      if (a != b) dz.diffs[i].push_back(v[i][a] - v[i][b]);
    }
  }
  return dz;
}

std::vector<std::vector<double>> mixed_strategy_field(
    const FiniteGame& game, const Regularizer& reg, const MixedProfile& x,
    const SupportSet& support) {
  check_profile_shape(game, x);
  const auto v = payoff_field(game, x);
  std::vector<std::vector<double>> xdot(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    const auto& si = support.actions[i];
    const int k = static_cast<int>(si.size());
    xdot[i].assign(game.action_counts()[i], 0.0);
    if (k == 1) continue;  // singleton faces are rest points

    const auto inv = reg.inverse_restricted_hessian(x.strategies[i], si);
    std::vector<double> row_mass(k, 0.0);
    double total_mass = 0.0;
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) row_mass[r] += inv[r][c];
      total_mass += row_mass[r];
    }
    for (int r = 0; r < k; ++r) {
      double dot = 0.0;
      for (int c = 0; c < k; ++c) {
        dot += (inv[r][c] - row_mass[r] * row_mass[c] / total_mass) *
               v[i][si[c]];
      }
      xdot[i][si[r]] = dot;
    }
  }
  return xdot;
}

std::vector<std::vector<double>> replicator_field(const FiniteGame& game,
                                                  const MixedProfile& x) {
  check_profile_shape(game, x);
  const auto v = payoff_field(game, x);
  std::vector<std::vector<double>> xdot(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    const int m = game.action_counts()[i];
    double u = 0.0;
    for (int a = 0; a < m; ++a) u += x.strategies[i][a] * v[i][a];
    xdot[i].resize(m);
    for (int a = 0; a < m; ++a) {
      xdot[i][a] = x.strategies[i][a] * (v[i][a] - u);
    }
  }
  return xdot;
}

std::vector<std::vector<double>> projection_field(const FiniteGame& game,
                                                  const MixedProfile& x) {
  check_profile_shape(game, x);
  const auto v = payoff_field(game, x);
  const SupportSet supp = support_of(x);
  std::vector<std::vector<double>> xdot(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    xdot[i].assign(game.action_counts()[i], 0.0);
    const auto& si = supp.actions[i];
    double mean = 0.0;
    for (int a : si) mean += v[i][a];
    mean /= static_cast<double>(si.size());
    for (int a : si) xdot[i][a] = v[i][a] - mean;
  }
  return xdot;
}

// ---------------------------------------------------------------------------
// Integration.

Trajectory integrate_scores(const FiniteGame& game, const Regularizer& reg,
                            const ScoreProfile& y0,
                            const IntegratorConfig& config) {
  check_score_shape(game, y0);
  const std::vector<int> sizes(game.action_counts().begin(),
                               game.action_counts().end());

  Trajectory traj;
  traj.space = StateSpace::kScore;

  const Rhs rhs = [&](const FlatState& s, FlatState& ds) {
    ScoreProfile y;
    y.scores = unflatten(s, sizes);
    const ScoreProfile v = ftrl_vector_field(game, reg, y);
    const FlatState f = flatten(v.scores);
    std::copy(f.begin(), f.end(), ds.begin());
  };

  FlatState state = flatten(y0.scores);
  traj.stats = integrate_core(rhs, state, config,
                              [&](double t, const FlatState& s) {
                                ScoreProfile y;
                                y.scores = unflatten(s, sizes);
                                traj.times.push_back(t);
                                traj.mixed.push_back(mirror_profile(reg, y));
                                traj.scores.push_back(std::move(y));
                              });
  return traj;
}

Trajectory integrate_reduced(const FiniteGame& game, const Regularizer& reg,
                             const ReducedScore& z0,
                             const IntegratorConfig& config) {
  check_reduced_shape(game, z0);
  const std::vector<int> sizes = reduced_sizes(game);

  Trajectory traj;
  traj.space = StateSpace::kReduced;

  const Rhs rhs = [&](const FlatState& s, FlatState& ds) {
    ReducedScore z;
    z.diffs = unflatten(s, sizes);
    z.benchmarks = z0.benchmarks;
    const ReducedScore v = reduced_vector_field(game, reg, z);
    const FlatState f = flatten(v.diffs);
    std::copy(f.begin(), f.end(), ds.begin());
  };

  FlatState state = flatten(z0.diffs);
  traj.stats = integrate_core(
      rhs, state, config, [&](double t, const FlatState& s) {
        ReducedScore z;
        z.diffs = unflatten(s, sizes);
        z.benchmarks = z0.benchmarks;
        traj.times.push_back(t);
        traj.mixed.push_back(reduced_mirror_profile(reg, z));
        traj.reduced.push_back(std::move(z));
      });
  return traj;
}

Trajectory integrate_strategies_steep(const FiniteGame& game,
                                      const Regularizer& reg,
                                      const MixedProfile& x0,
                                      const IntegratorConfig& config) {
  if (!reg.steep()) {
    throw SteepRegularizerError(
        "primal integration requires a steep regularizer; the non-steep "
        "strategy dynamics are not well-posed");
  }
  validate_profile(game, x0);

  // The dynamics restrict to the face spanned by supp(x0), where they
  // coincide with the full-support dynamics of the restricted game.
  const SupportSet face = support_of(x0);
  const FiniteGame face_game = restrict_to_face(game, face);
  SupportSet face_support;
  face_support.actions.resize(face_game.num_players());
  for (int i = 0; i < face_game.num_players(); ++i) {
    for (int a = 0; a < face_game.action_counts()[i]; ++a) {
      face_support.actions[i].push_back(a);
    }
  }
  const std::vector<int> sizes(face_game.action_counts().begin(),
                               face_game.action_counts().end());

  Trajectory traj;
  traj.space = StateSpace::kPrimal;

  const Rhs rhs = [&](const FlatState& s, FlatState& ds) {
    MixedProfile x;
    x.strategies = unflatten(s, sizes);
    const auto f = flatten(mixed_strategy_field(face_game, reg, x, face_support));
    std::copy(f.begin(), f.end(), ds.begin());
  };

  const PostStep renorm = [&](FlatState& s, IntegratorStats& stats) {
    std::size_t pos = 0;
    for (int size : sizes) {
      double sum = 0.0;
      for (int k = 0; k < size; ++k) sum += s[pos + k];
      stats.max_renormalization_drift =
          std::max(stats.max_renormalization_drift, std::abs(sum - 1.0));
      for (int k = 0; k < size; ++k) s[pos + k] /= sum;
      pos += size;
    }
  };

  FlatState state = flatten(restrict_profile(x0, face).strategies);
  traj.stats = integrate_core(
      rhs, state, config,
      [&](double t, const FlatState& s) {
        MixedProfile face_x;
        face_x.strategies = unflatten(s, sizes);
        traj.times.push_back(t);
        traj.mixed.push_back(
            embed_profile(face_x, face, game.action_counts()));
      },
      renorm);
  return traj;
}

// ---------------------------------------------------------------------------
// Support events.

namespace {

// Integrates a stored sample state forward by dt and returns the strategy
// image; used to probe inside a sample interval during bisection.
MixedProfile probe_mixed_at(const FiniteGame& game, const Regularizer& reg,
                            const Trajectory& traj, std::size_t sample_index,
                            double dt, const IntegratorConfig& config) {
  if (dt <= kTimeEps) return traj.mixed[sample_index];
  IntegratorConfig sub = config;
  sub.horizon = dt;
  sub.sample_interval = dt;
  if (traj.space == StateSpace::kScore) {
    const Trajectory t =
        integrate_scores(game, reg, traj.scores[sample_index], sub);
    return t.mixed.back();
  }
  const Trajectory t =
      integrate_reduced(game, reg, traj.reduced[sample_index], sub);
  return t.mixed.back();
}

}  // namespace

std::vector<SupportEvent> detect_support_events(
    const FiniteGame& game, const Regularizer& reg, const Trajectory& traj,
    const IntegratorConfig& config) {
  if (traj.space == StateSpace::kPrimal) {
    throw InvalidArgumentError(
        "support events are detected on score-space trajectories");
  }
  std::vector<SupportEvent> events;
  if (traj.times.size() < 2) return events;

  for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
    const SupportSet s0 = support_of(traj.mixed[k]);
    const SupportSet s1 = support_of(traj.mixed[k + 1]);
    if (s0 == s1) continue;

    const double t0 = traj.times[k];
    const double t1 = traj.times[k + 1];

    // Walk through possibly multiple crossings inside the interval.
    double lo = 0.0;  // offsets from t0
    SupportSet supp_lo = s0;
    for (int rounds = 0; rounds < 8 && !(supp_lo == s1); ++rounds) {
      double hi = t1 - t0;
      SupportSet supp_hi = s1;
      while (hi - lo > config.event_tolerance) {
        const double mid = 0.5 * (lo + hi);
        const SupportSet sm =
            support_of(probe_mixed_at(game, reg, traj, k, mid, config));
        if (sm == supp_lo) {
          lo = mid;
        } else {
          hi = mid;
          supp_hi = sm;
        }
      }
      const double t_event = t0 + 0.5 * (lo + hi);
      // A crossing that does not connect to the endpoint support within the
      // remaining rounds is reported but flagged ambiguous below.
      for (int i = 0; i < game.num_players(); ++i) {
        std::vector<bool> in_lo(game.action_counts()[i], false);
        std::vector<bool> in_hi(game.action_counts()[i], false);
        for (int a : supp_lo.actions[i]) in_lo[a] = true;
        for (int a : supp_hi.actions[i]) in_hi[a] = true;
        for (int a = 0; a < game.action_counts()[i]; ++a) {
          if (in_lo[a] == in_hi[a]) continue;
          SupportEvent ev;
          ev.time = t_event;
          ev.player = i;
          ev.action = a;
          ev.kind =
              in_lo[a] ? SupportEventKind::kExit : SupportEventKind::kEnter;
          ev.ambiguous = false;
          events.push_back(ev);
        }
      }
      lo = hi;
      supp_lo = supp_hi;
    }
    if (!(supp_lo == s1)) {
      // Non-monotone crossing unresolved within the allotted refinement.
      SupportEvent ev;
      ev.time = t1;
      ev.player = -1;
      ev.action = -1;
      ev.ambiguous = true;
      events.push_back(ev);
    }
  }
  std::sort(events.begin(), events.end(),
            [](const SupportEvent& a, const SupportEvent& b) {
              return a.time < b.time;
            });
  return events;
}

// ---------------------------------------------------------------------------
// Variational flow.

VariationalFlowResult integrate_variational(const FiniteGame& game,
                                            const Regularizer& reg,
                                            const ReducedScore& z0,
                                            const IntegratorConfig& config) {
  check_reduced_shape(game, z0);
  const std::vector<int> sizes = reduced_sizes(game);
  int dim = 0;
  for (int s : sizes) dim += s;

  // Augmented state: z followed by M in column-major order.
  FlatState state = flatten(z0.diffs);
  state.resize(dim + dim * dim, 0.0);
  for (int i = 0; i < dim; ++i) state[dim + i * dim + i] = 1.0;

  const auto eval_field = [&](const FlatState& zflat, FlatState& out) {
    ReducedScore z;
    z.diffs = unflatten(zflat, sizes);
    z.benchmarks = z0.benchmarks;
    out = flatten(reduced_vector_field(game, reg, z).diffs);
  };

  const Rhs rhs = [&](const FlatState& s, FlatState& ds) {
    FlatState z(s.begin(), s.begin() + dim);
    FlatState v;
    eval_field(z, v);
    std::copy(v.begin(), v.end(), ds.begin());

    // Jacobian of the reduced field by central differences.
    Eigen::MatrixXd jac(dim, dim);
    FlatState zp = z, zm = z, vp, vm;
    for (int c = 0; c < dim; ++c) {
      const double h = 1e-5 * (1.0 + std::abs(z[c]));
      zp[c] = z[c] + h;
      zm[c] = z[c] - h;
      eval_field(zp, vp);
      eval_field(zm, vm);
      for (int r = 0; r < dim; ++r) jac(r, c) = (vp[r] - vm[r]) / (2.0 * h);
      zp[c] = z[c];
      zm[c] = z[c];
    }

    Eigen::Map<const Eigen::MatrixXd> m(s.data() + dim, dim, dim);
    Eigen::Map<Eigen::MatrixXd> dm(ds.data() + dim, dim, dim);
    dm = jac * m;
  };

  VariationalFlowResult result;
  result.stats = integrate_core(
      rhs, state, config, [&](double t, const FlatState& s) {
        Eigen::Map<const Eigen::MatrixXd> m(s.data() + dim, dim, dim);
        result.times.push_back(t);
        result.determinants.push_back(m.determinant());
      });

  result.final_matrix.assign(dim, std::vector<double>(dim));
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      result.final_matrix[r][c] = state[dim + c * dim + r];
    }
  }
  return result;
}

std::vector<std::vector<double>> flow_jacobian(const FiniteGame& game,
                                               const Regularizer& reg,
                                               const ReducedScore& z0, double T,
                                               const IntegratorConfig& config) {
  check_reduced_shape(game, z0);
  if (T <= 0.0) {
    int dim = 0;
    for (int s : reduced_sizes(game)) dim += s;
    std::vector<std::vector<double>> identity(dim,
                                              std::vector<double>(dim, 0.0));
    for (int i = 0; i < dim; ++i) identity[i][i] = 1.0;
    return identity;
  }
  IntegratorConfig cfg = config;
  cfg.horizon = T;
  cfg.sample_interval = T;
  return integrate_variational(game, reg, z0, cfg).final_matrix;
}

}  // namespace ftrl
