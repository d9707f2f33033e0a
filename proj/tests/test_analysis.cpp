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

#include <cmath>
#include <vector>

#include <doctest.h>

#include "ftrl/errors.hpp"
#include "ftrl/harness.hpp"
#include "ftrl/parallel.hpp"
#include "ftrl/rng.hpp"

namespace ftrl {
namespace {

const FiniteGame& mp() { return builtin_game_info("matching_pennies").game; }
const FiniteGame& rps() {
  return builtin_game_info("rock_paper_scissors").game;
}
const FiniteGame& dominance() {
  return builtin_game_info("dominance_2x2").game;
}
const FiniteGame& coordination() {
  return builtin_game_info("coordination_2x2").game;
}
const FiniteGame& three_player() {
  return builtin_game_info("zero_sum_2x2x2").game;
}

TEST_CASE("incompressibility check") {
  SUBCASE("zero-payoff game has an exactly zero field") {
    const FiniteGame zero({2, 2}, std::vector<double>(8, 0.0));
    const auto report =
        check_incompressibility(zero, Regularizer::negentropy(), 20, 1e-6, 1);
    CHECK(report.pass);
    CHECK(report.max_abs_divergence == 0.0);
  }
  SUBCASE("matching pennies under the logit map") {
    const auto report =
        check_incompressibility(mp(), Regularizer::negentropy(), 100, 1e-6, 2);
    CHECK(report.pass);
    CHECK(report.max_abs_divergence < 1e-6);
    CHECK(report.divergence_samples.size() == 200);
  }
  SUBCASE("negative control: a leaky field is caught") {
    const Regularizer reg = Regularizer::negentropy();
    const FiniteGame& game = mp();
    const FlatField leaky = [&](const std::vector<double>& s) {
      ScoreProfile y;
      y.scores = {{s[0], s[1]}, {s[2], s[3]}};
      const ScoreProfile v = ftrl_vector_field(game, reg, y);
      std::vector<double> out = {v.scores[0][0], v.scores[0][1],
                                 v.scores[1][0], v.scores[1][1]};
      for (int k = 0; k < 4; ++k) out[k] += 0.1 * s[k];
      return out;
    };
    Rng rng(3);
    std::vector<double> state(4);
    for (double& c : state) c = rng.uniform(-2, 2);
    const double div = finite_difference_divergence(leaky, state);
    CHECK(div == doctest::Approx(0.4).epsilon(1e-4));
  }
}

TEST_CASE("volume preservation") {
  IntegratorConfig config;
  config.rtol = 1e-10;
  config.atol = 1e-12;
  config.sample_interval = 1.0;

  SUBCASE("zero horizon") {
    const ReducedScore z0{{{0.1}, {0.2}}, {0, 0}};
    const auto report = volume_preservation_test(
        mp(), Regularizer::negentropy(), z0, 0.0, config, 1e-4);
    CHECK(report.pass);
    CHECK(report.det_jacobian_per_time.front().second == 1.0);
  }
  SUBCASE("matching pennies and rock-paper-scissors stay at unit volume") {
    const ReducedScore z_mp{{{0.8}, {-0.5}}, {0, 0}};
    const auto r1 = volume_preservation_test(
        mp(), Regularizer::negentropy(), z_mp, 10.0, config, 1e-4);
    CHECK(r1.pass);
    CHECK(r1.max_abs_log_det < 1e-4);

    const ReducedScore z_rps{{{0.3, -0.2}, {0.1, 0.4}}, {0, 0}};
    const auto r2 = volume_preservation_test(
        rps(), Regularizer::negentropy(), z_rps, 10.0, config, 1e-4);
    CHECK(r2.pass);
    CHECK(r2.max_abs_log_det < 1e-4);
  }
  SUBCASE("cloud mode tracks a sampled neighborhood") {
    const ReducedScore z0{{{0.4}, {-0.1}}, {0, 0}};
    const auto report = volume_preservation_test(
        mp(), Regularizer::negentropy(), z0, 5.0, config, 1e-4,
        /*cloud_points=*/4, /*cloud_radius=*/0.1, /*seed=*/7);
    CHECK(report.pass);
    CHECK(report.cloud_log_volume_per_time.size() ==
          report.det_jacobian_per_time.size());
    for (const auto& [t, logv] : report.cloud_log_volume_per_time) {
      CHECK(std::abs(logv) < 1e-4);
    }
  }
}

TEST_CASE("volume is preserved across the corpus where trajectories stay "
          "interior") {
  IntegratorConfig config;
  config.rtol = 1e-8;
  config.atol = 1e-10;
  config.sample_interval = 2.0;

  Rng rng(31);
  for (const auto& info : builtin_games()) {
    // Steep maps keep every trajectory interior.  Under the euclidean map
    // only the zero-sum cyclers do; the other builtin games collapse onto a
    // boundary face in finite time and leave the lemma's interior regime.
    std::vector<Regularizer> regs = {Regularizer::negentropy(),
                                     Regularizer::tsallis(0.5)};
    if (info.key == "matching_pennies" || info.key == "rock_paper_scissors") {
      regs.push_back(Regularizer::squared_euclidean());
    }
    MixedProfile x0;
    for (int m : info.game.action_counts()) {
      auto s = rng.simplex_point(m);
      for (double& c : s) c = (c + 0.5 / m) / 1.5;  // keep well interior
      x0.strategies.push_back(std::move(s));
    }
    for (const Regularizer& reg : regs) {
      const ReducedScore z0 = reduce_scores(score_lift(reg, x0));
      const auto report =
          volume_preservation_test(info.game, reg, z0, 10.0, config, 1e-4);
      INFO(info.key, "/", reg.config_string());
      CHECK(report.pass);
      CHECK(report.max_abs_log_det < 1e-4);
    }
  }
}

TEST_CASE("recurrence probe") {
  IntegratorConfig config;
  config.sample_interval = 0.01;

  SUBCASE("a rest point is stationary, not recurrent") {
    const auto report =
        recurrence_probe(mp(), Regularizer::negentropy(),
                         {{{0.5, 0.5}, {0.5, 0.5}}}, 1e-2, 50.0, config);
    CHECK(report.stationary);
    CHECK_FALSE(report.recurrent);
    CHECK(report.return_times.empty());
  }
  SUBCASE("matching pennies cycles return") {
    const auto report =
        recurrence_probe(mp(), Regularizer::negentropy(),
                         {{{0.7, 0.3}, {0.6, 0.4}}}, 1e-2, 200.0, config);
    CHECK(report.recurrent);
    CHECK_FALSE(report.stationary);
    REQUIRE_FALSE(report.return_times.empty());
    CHECK(report.return_times.front() > 0.0);
    CHECK(report.return_times.back() <= 200.0);
    for (std::size_t k = 1; k < report.return_times.size(); ++k) {
      CHECK(report.return_times[k] > report.return_times[k - 1]);
    }
  }
  SUBCASE("a dominance-solvable game converges instead") {
    const auto report =
        recurrence_probe(dominance(), Regularizer::squared_euclidean(),
                         {{{0.3, 0.7}, {0.4, 0.6}}}, 1e-2, 50.0, config);
    CHECK_FALSE(report.recurrent);
  }
  SUBCASE("rock-paper-scissors starts recur given a long enough horizon") {
    // The reduced flow is four-dimensional here, so orbits are quasi-periodic
    // and need far longer than the matching-pennies cycles to re-enter an
    // epsilon-ball: at horizon 500 only ~62 of 100 seeded starts have
    // returned, at 2000 it is 93, at 5000 it is 95.
    Rng rng(2026);
    std::vector<MixedProfile> starts;
    for (int k = 0; k < 20; ++k) {
      MixedProfile x;
      x.strategies.push_back(rng.simplex_point(3));
      x.strategies.push_back(rng.simplex_point(3));
      starts.push_back(std::move(x));
    }
    std::vector<int> recurrent(starts.size(), 0);
    parallel_for(static_cast<int>(starts.size()), [&](int k) {
      const auto report = recurrence_probe(rps(), Regularizer::negentropy(),
                                           starts[k], 1e-2, 2000.0, config);
      recurrent[k] = report.recurrent ? 1 : 0;
    });
    int count = 0;
    for (int r : recurrent) count += r;
    CHECK(count >= 18);
  }
  SUBCASE("interior start required") {
    CHECK_THROWS_AS(
        recurrence_probe(mp(), Regularizer::negentropy(),
                         {{{1.0, 0.0}, {0.5, 0.5}}}, 1e-2, 10.0, config),
        InvalidArgumentError);
  }
}

TEST_CASE("stability probe") {
  StabilityOptions options;
  options.seed = 11;

  SUBCASE("strict equilibrium attracts") {
    options.radius = 0.05;
    options.n_samples = 20;
    options.horizon = 60.0;
    const auto report =
        stability_probe(dominance(), Regularizer::squared_euclidean(),
                        {{{0.0, 1.0}, {0.0, 1.0}}}, options);
    CHECK(report.verdict == StabilityVerdict::kAsymptoticallyStableEvidence);
    CHECK(report.fraction_converged == 1.0);
    CHECK(report.fraction_contained == 1.0);
  }
  SUBCASE("fully mixed equilibrium repels under both families") {
    options.radius = 0.02;
    options.n_samples = 20;
    options.horizon = 100.0;
    const MixedProfile uniform{
        {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}}};
    for (const Regularizer& reg :
         {Regularizer::negentropy(), Regularizer::squared_euclidean()}) {
      const auto report = stability_probe(rps(), reg, uniform, options);
      CHECK(report.verdict == StabilityVerdict::kUnstableEvidence);
      CHECK(report.fraction_converged == 0.0);
    }
  }
  SUBCASE("partially mixed equilibrium repels") {
    options.radius = 0.02;
    options.n_samples = 20;
    options.horizon = 100.0;
    const MixedProfile partial{{{0.5, 0.5}, {0.5, 0.5}, {1.0, 0.0}}};
    for (const Regularizer& reg :
         {Regularizer::negentropy(), Regularizer::squared_euclidean()}) {
      const auto report =
          stability_probe(three_player(), reg, partial, options);
      CHECK(report.verdict == StabilityVerdict::kUnstableEvidence);
      CHECK(report.fraction_converged == 0.0);
    }
  }
  SUBCASE("interior balls are never attracting under steep maps") {
    // Any asymptotically stable set would have to contain a pure strategy;
    // closed balls inside the interior therefore never accumulate
    // convergence evidence.
    options.radius = 0.05;
    options.set_radius = 0.05;
    options.n_samples = 12;
    options.horizon = 100.0;
    for (const auto& info : builtin_games()) {
      const auto report =
          stability_probe(info.game, Regularizer::negentropy(),
                          uniform_profile(info.game), options);
      INFO(info.key);
      CHECK(report.verdict == StabilityVerdict::kUnstableEvidence);
    }
  }
  SUBCASE("sample floor") {
    options.n_samples = 5;
    CHECK_THROWS_AS(stability_probe(mp(), Regularizer::negentropy(),
                                    uniform_profile(mp()), options),
                    InvalidArgumentError);
  }
}

TEST_CASE("collapse-time bound") {
  SUBCASE("euclidean gradient differences peak at one") {
    const auto bound = t0_bound(dominance(), Regularizer::squared_euclidean(),
                                {{{0.0, 1.0}, {0.0, 1.0}}}, 0.05);
    CHECK(bound.g_constant == doctest::Approx(1.0));
    // The dominance gap is exactly 1 everywhere, so t0 is 2.
    CHECK(bound.c_constant == doctest::Approx(1.0));
    CHECK(bound.t0 == doctest::Approx(2.0));
  }
  SUBCASE("a ball reaching indifference points has no positive gap") {
    CHECK_THROWS_AS(t0_bound(coordination(), Regularizer::squared_euclidean(),
                             {{{1.0, 0.0}, {1.0, 0.0}}}, 0.95),
                    NonPositiveGapError);
  }
  SUBCASE("steep regularizers are rejected") {
    CHECK_THROWS_AS(t0_bound(dominance(), Regularizer::negentropy(),
                             {{{0.0, 1.0}, {0.0, 1.0}}}, 0.05),
                    SteepRegularizerError);
  }
}

TEST_CASE("support collapse times") {
  IntegratorConfig config;
  config.sample_interval = 0.005;

  SUBCASE("a start on the equilibrium face collapses at time zero") {
    const MixedProfile target{{{0.0, 1.0}, {0.0, 1.0}}};
    const auto report =
        support_collapse_time(dominance(), Regularizer::squared_euclidean(),
                              target, {target}, 5.0, config);
    REQUIRE(report.samples.size() == 1);
    CHECK(report.samples[0].collapsed);
    CHECK(report.samples[0].collapse_time == 0.0);
    CHECK(report.all_within_bound);
  }
  SUBCASE("all nearby starts collapse within 2G/c") {
    const MixedProfile target{{{0.0, 1.0}, {0.0, 1.0}}};
    const auto starts = sample_profiles_near(dominance(), target, 0.05, 50, 21);
    const auto report =
        support_collapse_time(dominance(), Regularizer::squared_euclidean(),
                              target, starts, 20.0, config);
    CHECK(report.all_within_bound);
    CHECK(report.max_collapse_time > 0.0);
    CHECK(report.max_collapse_time <= report.bound_t0);
    for (const auto& s : report.samples) CHECK(s.collapsed);
  }
  SUBCASE("steep regularizers are rejected") {
    CHECK_THROWS_AS(
        support_collapse_time(dominance(), Regularizer::negentropy(),
                              {{{0.0, 1.0}, {0.0, 1.0}}},
                              {MixedProfile{{{0.1, 0.9}, {0.1, 0.9}}}}, 5.0,
                              config),
        SteepRegularizerError);
  }
  SUBCASE("non-generic games are rejected") {
    const FiniteGame weak({2, 2}, {1, 1, 1, 0, 1, 1, 1, 0});
    CHECK_THROWS_AS(
        support_collapse_time(weak, Regularizer::squared_euclidean(),
                              {{{1.0, 0.0}, {1.0, 0.0}}},
                              {MixedProfile{{{0.9, 0.1}, {0.9, 0.1}}}}, 5.0,
                              config),
        NonGenericGameError);
  }
}

TEST_CASE("zero-sum excursion diagnostic") {
  IntegratorConfig config;
  config.rtol = 1e-10;
  config.atol = 1e-12;
  config.sample_interval = 0.5;
  config.horizon = 100.0;
  const Regularizer reg = Regularizer::negentropy();
  const MixedProfile star{{{0.5, 0.5}, {0.5, 0.5}}};

  SUBCASE("constant along the rest point") {
    IntegratorConfig short_cfg = config;
    short_cfg.horizon = 5.0;
    const Trajectory traj =
        integrate_scores(mp(), reg, score_lift(reg, star), short_cfg);
    const auto report = zero_sum_excursion_check(mp(), reg, star, traj);
    CHECK(report.max_abs_drift < 1e-12);
  }
  SUBCASE("conserved along cycles to integrator accuracy") {
    const Trajectory traj = integrate_scores(
        mp(), reg, score_lift(reg, {{{0.7, 0.3}, {0.6, 0.4}}}), config);
    const auto report = zero_sum_excursion_check(mp(), reg, star, traj);
    CHECK(report.initial_value > 0.0);
    CHECK(report.max_relative_drift < 1e-5);

    // Refined-tolerance reference: a cruder run drifts more.
    IntegratorConfig crude = config;
    crude.rtol = 1e-5;
    crude.atol = 1e-7;
    const Trajectory rough = integrate_scores(
        mp(), reg, score_lift(reg, {{{0.7, 0.3}, {0.6, 0.4}}}), crude);
    const auto rough_report = zero_sum_excursion_check(mp(), reg, star, rough);
    CHECK(report.max_abs_drift < rough_report.max_abs_drift);
  }
  SUBCASE("preconditions") {
    const Trajectory traj = integrate_scores(
        mp(), reg, score_lift(reg, {{{0.7, 0.3}, {0.6, 0.4}}}), config);
    CHECK_THROWS_AS(
        zero_sum_excursion_check(coordination(), reg,
                                 {{{1.0 / 3, 2.0 / 3}, {1.0 / 3, 2.0 / 3}}},
                                 traj),
        NotZeroSumError);
    CHECK_THROWS_AS(
        zero_sum_excursion_check(mp(), reg, {{{1.0, 0.0}, {0.5, 0.5}}}, traj),
        NonInteriorEquilibriumError);
  }
}

}  // namespace
}  // namespace ftrl
