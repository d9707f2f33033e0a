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

#include "ftrl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ftrl/errors.hpp"
#include "ftrl/parallel.hpp"
#include "ftrl/rng.hpp"

namespace ftrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNashTol = 1e-8;

std::vector<double> flatten_parts(const std::vector<std::vector<double>>& p) {
  std::vector<double> s;
  for (const auto& v : p) s.insert(s.end(), v.begin(), v.end());
  return s;
}

}  // namespace

double finite_difference_divergence(const FlatField& field,
                                    const std::vector<double>& state) {
  double div = 0.0;
  std::vector<double> sp = state, sm = state;
  for (std::size_t k = 0; k < state.size(); ++k) {
    const double h = 1e-5 * (1.0 + std::abs(state[k]));
    sp[k] = state[k] + h;
    sm[k] = state[k] - h;
    const std::vector<double> vp = field(sp);
    const std::vector<double> vm = field(sm);
    div += (vp[k] - vm[k]) / (2.0 * h);
    sp[k] = state[k];
    sm[k] = state[k];
  }
  return div;
}

VolumeReport check_incompressibility(const FiniteGame& game,
                                     const Regularizer& reg, int n_points,
                                     double tol, std::uint64_t seed) {
  VolumeReport report;
  report.tolerance = tol;
  Rng rng(seed);

  int score_dim = 0;
  for (int m : game.action_counts()) score_dim += m;
  const int reduced_dim = score_dim - game.num_players();

  std::vector<int> score_sizes(game.action_counts().begin(),
                               game.action_counts().end());
  std::vector<int> reduced_sizes(game.num_players());
  for (int i = 0; i < game.num_players(); ++i) {
    reduced_sizes[i] = game.action_counts()[i] - 1;
  }
  const std::vector<int> benchmarks(game.num_players(), 0);

  const FlatField score_field = [&](const std::vector<double>& s) {
    ScoreProfile y;
    std::size_t pos = 0;
    for (int size : score_sizes) {
      y.scores.emplace_back(s.begin() + pos, s.begin() + pos + size);
      pos += size;
    }
    return flatten_parts(ftrl_vector_field(game, reg, y).scores);
  };
  const FlatField reduced_field = [&](const std::vector<double>& s) {
    ReducedScore z;
    z.benchmarks = benchmarks;
    std::size_t pos = 0;
    for (int size : reduced_sizes) {
      z.diffs.emplace_back(s.begin() + pos, s.begin() + pos + size);
      pos += size;
    }
    return flatten_parts(reduced_vector_field(game, reg, z).diffs);
  };

  for (int p = 0; p < n_points; ++p) {
    std::vector<double> y(score_dim);
    for (double& v : y) v = rng.uniform(-2.0, 2.0);
    DivergenceSample sample;
    sample.space = StateSpace::kScore;
    sample.state = y;
    sample.divergence = finite_difference_divergence(score_field, y);
    report.max_abs_divergence =
        std::max(report.max_abs_divergence, std::abs(sample.divergence));
    report.divergence_samples.push_back(std::move(sample));

    std::vector<double> z(reduced_dim);
    for (double& v : z) v = rng.uniform(-2.0, 2.0);
    DivergenceSample zsample;
    zsample.space = StateSpace::kReduced;
    zsample.state = z;
    zsample.divergence = finite_difference_divergence(reduced_field, z);
    report.max_abs_divergence =
        std::max(report.max_abs_divergence, std::abs(zsample.divergence));
    report.divergence_samples.push_back(std::move(zsample));
  }

  report.pass = report.max_abs_divergence < tol;
  return report;
}

VolumeReport volume_preservation_test(const FiniteGame& game,
                                      const Regularizer& reg,
                                      const ReducedScore& z0, double T,
                                      const IntegratorConfig& config,
                                      double tol, int cloud_points,
                                      double cloud_radius,
                                      std::uint64_t seed) {
  VolumeReport report;
  report.tolerance = tol;
  if (T <= 0.0) {
    report.det_jacobian_per_time.emplace_back(0.0, 1.0);
    report.pass = true;
    return report;
  }

  IntegratorConfig cfg = config;
  cfg.horizon = T;

  const VariationalFlowResult center =
      integrate_variational(game, reg, z0, cfg);
  for (std::size_t k = 0; k < center.times.size(); ++k) {
    report.det_jacobian_per_time.emplace_back(center.times[k],
                                              center.determinants[k]);
    if (center.determinants[k] <= 0.0) {
      report.max_abs_log_det = kInf;
    } else {
      report.max_abs_log_det = std::max(
          report.max_abs_log_det, std::abs(std::log(center.determinants[k])));
    }
  }

  if (cloud_points > 0) {
    Rng rng(seed);
    std::vector<ReducedScore> cloud(cloud_points, z0);
    for (auto& z : cloud) {
      for (auto& d : z.diffs) {
        for (double& v : d) v += rng.uniform(-cloud_radius, cloud_radius);
      }
    }
    std::vector<VariationalFlowResult> results(cloud_points);
    parallel_for(cloud_points, [&](int i) {
      results[i] = integrate_variational(game, reg, cloud[i], cfg);
    });
    for (std::size_t k = 0; k < center.times.size(); ++k) {
      double mean_det = 0.0;
      for (const auto& r : results) {
        const double det = r.determinants[k];
        if (det <= 0.0) {
          report.max_abs_log_det = kInf;
        } else {
          report.max_abs_log_det =
              std::max(report.max_abs_log_det, std::abs(std::log(det)));
        }
        mean_det += det / cloud_points;
      }
      report.cloud_log_volume_per_time.emplace_back(
          center.times[k], mean_det > 0.0 ? std::log(mean_det) : -kInf);
    }
  }

  report.pass = report.max_abs_log_det < tol;
  return report;
}

RecurrenceReport recurrence_probe(const FiniteGame& game,
                                  const Regularizer& reg,
                                  const MixedProfile& x0, double epsilon,
                                  double horizon,
                                  const IntegratorConfig& config) {
  validate_profile(game, x0);
  if (!is_interior(x0)) {
    throw InvalidArgumentError("recurrence probe needs an interior start");
  }
  if (!(epsilon > 0.0)) throw InvalidArgumentError("epsilon must be positive");

  RecurrenceReport report;
  report.start = x0;
  report.epsilon = epsilon;
  report.horizon = horizon;

  IntegratorConfig cfg = config;
  cfg.horizon = horizon;

  const Trajectory traj =
      integrate_scores(game, reg, score_lift(reg, x0), cfg);

  bool outside = false;  // beyond the 2-epsilon ball since the last return
  double max_dist = 0.0;
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    const double d = profile_distance(traj.mixed[k], x0);
    max_dist = std::max(max_dist, d);
    if (!outside && d > 2.0 * epsilon) {
      outside = true;
    } else if (outside && d < epsilon) {
      report.return_times.push_back(traj.times[k]);
      outside = false;
    }
  }
  report.stationary = max_dist < epsilon;
  report.recurrent = !report.return_times.empty();
  return report;
}

std::vector<MixedProfile> sample_profiles_near(const FiniteGame& game,
                                               const MixedProfile& center,
                                               double radius, int n,
                                               std::uint64_t seed,
                                               double min_distance) {
  validate_profile(game, center);
  Rng rng(seed);
  std::vector<MixedProfile> starts;
  starts.reserve(n);
  while (static_cast<int>(starts.size()) < n) {
    MixedProfile direction;
    direction.strategies.reserve(game.num_players());
    for (int m : game.action_counts()) {
      direction.strategies.push_back(rng.simplex_point(m));
    }
    const double span = profile_distance(direction, center);
    if (span < 1e-12) continue;
    const double target =
        min_distance + (radius - min_distance) * std::max(rng.uniform(), 1e-6);
    const double t = std::min(1.0, target / span);
    MixedProfile x = center;
    for (int i = 0; i < game.num_players(); ++i) {
      for (std::size_t a = 0; a < x.strategies[i].size(); ++a) {
        x.strategies[i][a] +=
            t * (direction.strategies[i][a] - center.strategies[i][a]);
      }
    }
    if (min_distance > 0.0 && profile_distance(x, center) <= min_distance) {
      continue;
    }
    starts.push_back(std::move(x));
  }
  return starts;
}

StabilityReport stability_probe(const FiniteGame& game, const Regularizer& reg,
                                const MixedProfile& candidate,
                                const StabilityOptions& options) {
  validate_profile(game, candidate);
  if (options.n_samples < 10) {
    throw InvalidArgumentError("stability probe needs at least 10 samples");
  }

  StabilityReport report;
  report.candidate = candidate;
  report.radius = options.radius;
  report.set_radius = options.set_radius;
  report.n_samples = options.n_samples;

  const std::vector<MixedProfile> starts = sample_profiles_near(
      game, candidate, options.set_radius + options.radius, options.n_samples,
      options.seed, options.set_radius);

  IntegratorConfig cfg = options.integrator;
  cfg.horizon = options.horizon;

  // Distance to the probe target: to the candidate point, or to the closed
  // ball of set_radius around it in set mode.
  const auto target_distance = [&](const MixedProfile& x) {
    return std::max(0.0,
                    profile_distance(x, candidate) - options.set_radius);
  };

  std::vector<int> converged(options.n_samples, 0);
  std::vector<int> contained(options.n_samples, 0);

  parallel_for(options.n_samples, [&](int idx) {
    const Trajectory traj =
        integrate_scores(game, reg, score_lift(reg, starts[idx]), cfg);
    double max_dist = 0.0;
    std::vector<double> dist(traj.times.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      dist[k] = target_distance(traj.mixed[k]);
      max_dist = std::max(max_dist, dist[k]);
    }
    contained[idx] = max_dist <= 10.0 * options.radius ? 1 : 0;

    bool ok = dist.back() < options.conv_tol;
    // Late-time approach must be monotone (within floating slack).
    const std::size_t tail = dist.size() - dist.size() / 4;
    for (std::size_t k = tail; ok && k < dist.size(); ++k) {
      if (dist[k] > dist[k - 1] * (1.0 + 1e-9) + 1e-12) ok = false;
    }
    converged[idx] = ok ? 1 : 0;
  });

  int n_conv = 0, n_cont = 0;
  for (int i = 0; i < options.n_samples; ++i) {
    n_conv += converged[i];
    n_cont += contained[i];
  }
  report.fraction_converged =
      static_cast<double>(n_conv) / options.n_samples;
  report.fraction_contained =
      static_cast<double>(n_cont) / options.n_samples;

  if (report.fraction_converged >= 0.98 && report.fraction_contained == 1.0) {
    report.verdict = StabilityVerdict::kAsymptoticallyStableEvidence;
  } else if (report.fraction_converged <= 0.02) {
    report.verdict = StabilityVerdict::kUnstableEvidence;
  } else {
    report.verdict = StabilityVerdict::kInconclusive;
  }
  return report;
}

T0Bound t0_bound(const FiniteGame& game, const Regularizer& reg,
                 const MixedProfile& x_star, double neighborhood_radius,
                 int gap_samples, std::uint64_t seed) {
  if (reg.steep()) {
    throw SteepRegularizerError(
        "the collapse-time bound applies to non-steep regularizers only");
  }
  validate_profile(game, x_star);
  const EquilibriumReport cls = classify_equilibrium(game, x_star, kNashTol);
  if (!cls.is_nash || !cls.is_quasi_strict) {
    throw InvalidArgumentError("x_star must be a quasi-strict equilibrium");
  }
  if (cls.is_fully_mixed) {
    throw InvalidArgumentError(
        "x_star has full support; no unsupported actions to bound");
  }

  T0Bound bound;

  // G: largest gradient difference over a per-player simplex grid, mesh 1/64.
  constexpr int kMesh = 64;
  for (int i = 0; i < game.num_players(); ++i) {
    const int m = game.action_counts()[i];
    std::vector<int> ks(m, 0);  // odometer over weak compositions of kMesh
    for (;;) {
      ks[m - 1] =
          kMesh - std::accumulate(ks.begin(), ks.end() - 1, 0);
      std::vector<double> x(m);
      for (int a = 0; a < m; ++a) x[a] = static_cast<double>(ks[a]) / kMesh;
      const std::vector<double> g = reg.gradient(x);
      const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
      bound.g_constant = std::max(bound.g_constant, *hi - *lo);

      int j = m - 2;
      for (; j >= 0; --j) {
        ++ks[j];
        if (std::accumulate(ks.begin(), ks.end() - 1, 0) <= kMesh) break;
        ks[j] = 0;
      }
      if (j < 0) break;
    }
  }

  // c: smallest supported-vs-unsupported payoff gap over the sampled ball.
  const SupportSet supp = support_of(x_star);
  std::vector<MixedProfile> points = sample_profiles_near(
      game, x_star, neighborhood_radius, gap_samples, seed);
  points.push_back(x_star);
  bound.c_constant = kInf;
  for (const auto& x : points) {
    const auto v = payoff_field(game, x);
    for (int i = 0; i < game.num_players(); ++i) {
      const int m = game.action_counts()[i];
      if (static_cast<int>(supp.actions[i].size()) == m) continue;
      std::vector<bool> in_supp(m, false);
      for (int a : supp.actions[i]) in_supp[a] = true;
      double min_supported = kInf, max_unsupported = -kInf;
      for (int a = 0; a < m; ++a) {
        if (in_supp[a]) {
          min_supported = std::min(min_supported, v[i][a]);
        } else {
          max_unsupported = std::max(max_unsupported, v[i][a]);
        }
      }
      bound.c_constant =
          std::min(bound.c_constant, min_supported - max_unsupported);
    }
  }
  if (!(bound.c_constant > 0.0)) {
    throw NonPositiveGapError(
        "payoff gap is not positive on the probe ball; shrink the radius");
  }
  bound.t0 = 2.0 * bound.g_constant / bound.c_constant;
  return bound;
}

SupportCollapseReport support_collapse_time(
    const FiniteGame& game, const Regularizer& reg, const MixedProfile& x_star,
    const std::vector<MixedProfile>& starts, double horizon,
    const IntegratorConfig& config) {
  if (reg.steep()) {
    throw SteepRegularizerError(
        "finite support collapse applies to non-steep regularizers only");
  }
  if (!is_generic_game(game)) {
    throw NonGenericGameError(
        "support collapse requires a generic game (all equilibria "
        "quasi-strict)");
  }
  validate_profile(game, x_star);
  const EquilibriumReport cls = classify_equilibrium(game, x_star, kNashTol);
  if (!cls.is_nash || !cls.is_quasi_strict) {
    throw InvalidArgumentError("x_star must be a quasi-strict equilibrium");
  }

  SupportCollapseReport report;
  report.target = x_star;
  report.samples.resize(starts.size());

  double radius = 0.0;
  for (const auto& s : starts) {
    radius = std::max(radius, profile_distance(s, x_star));
  }
  report.probe_radius = radius;

  const T0Bound bound = t0_bound(game, reg, x_star, radius);
  report.bound_t0 = bound.t0;
  report.g_constant = bound.g_constant;
  report.c_constant = bound.c_constant;

  const SupportSet target_supp = support_of(x_star);
  IntegratorConfig cfg = config;
  cfg.horizon = horizon;

  parallel_for(static_cast<int>(starts.size()), [&](int idx) {
    CollapseSample& sample = report.samples[idx];
    sample.start = starts[idx];
    const Trajectory traj =
        integrate_scores(game, reg, score_lift(reg, starts[idx]), cfg);
    if (!(support_of(traj.mixed.back()) == target_supp)) {
      sample.collapsed = false;
      return;
    }
    // Last sample whose support still differs from the target.
    std::ptrdiff_t last = -1;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      if (!(support_of(traj.mixed[k]) == target_supp)) {
        last = static_cast<std::ptrdiff_t>(k);
      }
    }
    if (last < 0) {
      sample.collapsed = true;
      sample.collapse_time = 0.0;
      return;
    }
    // The final support equals the target and every sample-to-sample change
    // is bisected into an event, so the last event time is the collapse time.
    const auto events = detect_support_events(game, reg, traj, cfg);
    sample.collapsed = true;
    sample.collapse_time =
        events.empty() ? traj.times[last + 1] : events.back().time;
  });

  report.all_within_bound = true;
  for (const auto& s : report.samples) {
    if (!s.collapsed) {
      report.all_within_bound = false;
      continue;
    }
    report.max_collapse_time =
        std::max(report.max_collapse_time, s.collapse_time);
    if (s.collapse_time > report.bound_t0) report.all_within_bound = false;
  }
  return report;
}

DriftReport zero_sum_excursion_check(const FiniteGame& game,
                                     const Regularizer& reg,
                                     const MixedProfile& x_star,
                                     const Trajectory& trajectory) {
  if (game.num_players() != 2 || !game.zero_sum()) {
    throw NotZeroSumError(
        "the excursion diagnostic applies to two-player zero-sum games");
  }
  validate_profile(game, x_star);
  if (!is_interior(x_star) || !is_nash(game, x_star, kNashTol)) {
    throw NonInteriorEquilibriumError(
        "x_star must be an interior equilibrium");
  }

  // E(y) = sum_i [ h(x*_i) + h*(y_i) - <y_i, x*_i> ] with
  // h*(y) = <y, Q(y)> - h(Q(y)); constant along zero-sum interior cycles.
  const auto energy = [&](const ScoreProfile& y) {
    double total = 0.0;
    for (int i = 0; i < 2; ++i) {
      const std::vector<double>& yi = y.scores[i];
      const std::vector<double> xi = reg.mirror_map(yi);
      double dual = -reg.value(xi);
      double pairing = 0.0;
      for (std::size_t a = 0; a < yi.size(); ++a) {
        dual += yi[a] * xi[a];
        pairing += yi[a] * x_star.strategies[i][a];
      }
      total += reg.value(x_star.strategies[i]) + dual - pairing;
    }
    return total;
  };

  std::vector<ScoreProfile> samples;
  if (trajectory.space == StateSpace::kScore) {
    samples = trajectory.scores;
  } else if (trajectory.space == StateSpace::kReduced) {
    samples.reserve(trajectory.reduced.size());
    for (const auto& z : trajectory.reduced) samples.push_back(lift_scores(z));
  } else {
    throw InvalidArgumentError(
        "the excursion diagnostic needs a score-space trajectory");
  }
  if (samples.empty()) {
    throw InvalidArgumentError("empty trajectory");
  }

  DriftReport report;
  report.initial_value = energy(samples.front());
  for (const auto& y : samples) {
    report.max_abs_drift = std::max(
        report.max_abs_drift, std::abs(energy(y) - report.initial_value));
  }
  report.max_relative_drift =
      report.max_abs_drift / std::max(std::abs(report.initial_value), 1e-12);
  return report;
}

}  // namespace ftrl
