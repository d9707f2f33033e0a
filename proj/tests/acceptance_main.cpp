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

// End-to-end checks of the library's headline guarantees, one line per
// criterion.  Exit code 0 iff every criterion holds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ftrl/analysis.hpp"
#include "ftrl/dynamics.hpp"
#include "ftrl/game.hpp"
#include "ftrl/harness.hpp"
#include "ftrl/parallel.hpp"
#include "ftrl/regularizer.hpp"
#include "ftrl/rng.hpp"

namespace {

using namespace ftrl;

struct Criterion {
  int id;
  std::string name;
  std::function<bool(std::string&)> run;
};

std::vector<Regularizer> three_families() {
  return {Regularizer::negentropy(), Regularizer::squared_euclidean(),
          Regularizer::tsallis(0.5)};
}

std::vector<Regularizer> both_families() {
  return {Regularizer::negentropy(), Regularizer::squared_euclidean()};
}

// 1. Finite-difference divergence of the score and reduced fields vanishes
//    across the corpus and all regularizer kinds.
bool incompressibility(std::string& detail) {
  double worst = 0.0;
  for (const auto& info : builtin_games()) {
    for (const Regularizer& reg : three_families()) {
      const auto report =
          check_incompressibility(info.game, reg, 100, 1e-6, 2026);
      worst = std::max(worst, report.max_abs_divergence);
      if (!report.pass) {
        detail = info.key + "/" + reg.config_string() + " max|div|=" +
                 std::to_string(report.max_abs_divergence);
        return false;
      }
    }
  }
  std::ostringstream os;
  os << "18 game/regularizer pairs, 100 states each, max|div|=" << worst
     << " < 1e-6";
  detail = os.str();
  return true;
}

// 2. |log det| of the reduced-flow Jacobian stays below 1e-4 on [0, 10].
bool volume_preservation(std::string& detail) {
  IntegratorConfig config;
  config.rtol = 1e-10;
  config.atol = 1e-12;
  config.sample_interval = 1.0;
  const Regularizer reg = Regularizer::negentropy();

  double worst = 0.0;
  const std::vector<std::pair<std::string, MixedProfile>> cases = {
      {"matching_pennies", {{{0.7, 0.3}, {0.6, 0.4}}}},
      {"rock_paper_scissors", {{{0.5, 0.3, 0.2}, {0.25, 0.3, 0.45}}}},
  };
  for (const auto& [key, x0] : cases) {
    const FiniteGame& game = builtin_game_info(key).game;
    const ReducedScore z0 = reduce_scores(score_lift(reg, x0));
    const auto report =
        volume_preservation_test(game, reg, z0, 10.0, config, 1e-4);
    worst = std::max(worst, report.max_abs_log_det);
    if (!report.pass) {
      detail = key + " max|log det|=" + std::to_string(report.max_abs_log_det);
      return false;
    }
  }
  std::ostringstream os;
  os << "matching_pennies and rock_paper_scissors, rtol 1e-10, max|log det|="
     << worst << " < 1e-4";
  detail = os.str();
  return true;
}

std::vector<std::pair<std::string, MixedProfile>> stored_equilibria(
    const std::string& classification) {
  std::vector<std::pair<std::string, MixedProfile>> found;
  for (const auto& info : builtin_games()) {
    for (const auto& eq : info.equilibria) {
      if (eq.classification == classification) {
        found.emplace_back(info.key, eq.profile);
      }
    }
  }
  return found;
}

// 3. No fully mixed equilibrium attracts: 50 seeded starts at radius 0.02,
//    horizon 200, zero of them converge.
bool interior_instability(std::string& detail) {
  StabilityOptions options;
  options.radius = 0.02;
  options.n_samples = 50;
  options.horizon = 200.0;
  options.conv_tol = 1e-6;
  options.seed = 311;

  int probes = 0;
  for (const auto& [key, profile] : stored_equilibria("fully_mixed")) {
    for (const Regularizer& reg : both_families()) {
      const auto report =
          stability_probe(builtin_game_info(key).game, reg, profile, options);
      ++probes;
      if (report.verdict != StabilityVerdict::kUnstableEvidence ||
          report.fraction_converged != 0.0) {
        detail = key + "/" + reg.config_string() +
                 " fraction_converged=" +
                 std::to_string(report.fraction_converged);
        return false;
      }
    }
  }
  detail = std::to_string(probes) +
           " probes (fully mixed equilibria x both families): all "
           "unstable_evidence with fraction_converged = 0";
  return probes > 0;
}

// 4. Every strict equilibrium attracts every sampled start at radius 0.05.
bool strict_stability(std::string& detail) {
  StabilityOptions options;
  options.radius = 0.05;
  options.n_samples = 50;
  options.horizon = 200.0;
  options.conv_tol = 1e-6;
  options.seed = 412;

  int probes = 0;
  for (const auto& [key, profile] : stored_equilibria("strict")) {
    for (const Regularizer& reg : both_families()) {
      const auto report =
          stability_probe(builtin_game_info(key).game, reg, profile, options);
      ++probes;
      if (report.verdict != StabilityVerdict::kAsymptoticallyStableEvidence ||
          report.fraction_converged != 1.0) {
        detail = key + "/" + reg.config_string() + " fraction_converged=" +
                 std::to_string(report.fraction_converged);
        return false;
      }
    }
  }
  detail = std::to_string(probes) +
           " probes (strict equilibria x both families): all converged, "
           "fraction_converged = 1.0 at conv_tol 1e-6";
  return probes > 0;
}

// 5. The partially mixed equilibrium of the 2x2x2 fixture repels under both
//    regularizer families.
bool partially_mixed_instability(std::string& detail) {
  StabilityOptions options;
  options.radius = 0.02;
  options.n_samples = 50;
  options.horizon = 200.0;
  options.conv_tol = 1e-6;
  options.seed = 513;

  const auto partial = stored_equilibria("partially_mixed");
  if (partial.empty()) {
    detail = "no partially mixed equilibrium in the corpus";
    return false;
  }
  for (const auto& [key, profile] : partial) {
    for (const Regularizer& reg : both_families()) {
      const auto report =
          stability_probe(builtin_game_info(key).game, reg, profile, options);
      if (report.verdict != StabilityVerdict::kUnstableEvidence) {
        detail = key + "/" + reg.config_string() + " verdict not unstable";
        return false;
      }
    }
  }
  detail = "zero_sum_2x2x2 partially mixed equilibrium: unstable_evidence "
           "under both families";
  return true;
}

// 6. At least 95 of 100 seeded interior starts of matching pennies return to
//    their epsilon-ball within horizon 500.
bool recurrence(std::string& detail) {
  const FiniteGame& game = builtin_game_info("matching_pennies").game;
  const Regularizer reg = Regularizer::negentropy();
  IntegratorConfig config;
  config.sample_interval = 0.01;

  Rng rng(2026);
  std::vector<MixedProfile> starts;
  for (int k = 0; k < 100; ++k) {
    MixedProfile x;
    x.strategies.push_back(rng.simplex_point(2));
    x.strategies.push_back(rng.simplex_point(2));
    starts.push_back(std::move(x));
  }

  std::vector<int> recurrent(starts.size(), 0);
  parallel_for(static_cast<int>(starts.size()), [&](int k) {
    const auto report =
        recurrence_probe(game, reg, starts[k], 1e-2, 500.0, config);
    recurrent[k] = report.recurrent ? 1 : 0;
  });
  int count = 0;
  for (int r : recurrent) count += r;

  std::ostringstream os;
  os << count << "/100 seeded interior starts recurrent (epsilon 1e-2, "
     << "horizon 500)";
  detail = os.str();
  return count >= 95;
}

// 7. Under the euclidean regularizer every trajectory near a strict
//    equilibrium reaches the equilibrium support for good within 2G/c.
bool support_collapse(std::string& detail) {
  const Regularizer reg = Regularizer::squared_euclidean();
  IntegratorConfig config;
  config.sample_interval = 0.005;

  double worst_margin = 1e300;
  int checked = 0;
  for (const auto& [key, profile] : stored_equilibria("strict")) {
    const FiniteGame& game = builtin_game_info(key).game;
    const auto starts = sample_profiles_near(game, profile, 0.05, 50, 614);
    const auto report =
        support_collapse_time(game, reg, profile, starts, 20.0, config);
    ++checked;
    if (!report.all_within_bound) {
      detail = key + " max collapse time " +
               std::to_string(report.max_collapse_time) + " vs bound " +
               std::to_string(report.bound_t0);
      return false;
    }
    worst_margin =
        std::min(worst_margin, report.bound_t0 - report.max_collapse_time);
  }
  std::ostringstream os;
  os << checked << " strict equilibria, 50 starts each: all supports "
     << "collapse permanently, worst margin to 2G/c = " << worst_margin;
  detail = os.str();
  return checked > 0;
}

// 8. The general strategy field specializes to replicator (negentropy) and
//    projection (euclidean) dynamics.
bool specialization_identities(std::string& detail) {
  Rng rng(815);
  double worst = 0.0;
  for (const auto& info : builtin_games()) {
    SupportSet full;
    full.actions.resize(info.game.num_players());
    for (int i = 0; i < info.game.num_players(); ++i) {
      for (int a = 0; a < info.game.action_counts()[i]; ++a) {
        full.actions[i].push_back(a);
      }
    }
    for (int trial = 0; trial < 100; ++trial) {
      MixedProfile x;
      for (int m : info.game.action_counts()) {
        auto s = rng.simplex_point(m);
        for (double& c : s) c = (c + 0.1 / m) / 1.1;
        x.strategies.push_back(std::move(s));
      }
      const auto rd = replicator_field(info.game, x);
      const auto general_neg =
          mixed_strategy_field(info.game, Regularizer::negentropy(), x, full);
      const auto pd = projection_field(info.game, x);
      const auto general_eucl = mixed_strategy_field(
          info.game, Regularizer::squared_euclidean(), x, full);
      for (int i = 0; i < info.game.num_players(); ++i) {
        for (int a = 0; a < info.game.action_counts()[i]; ++a) {
          worst = std::max(worst, std::abs(rd[i][a] - general_neg[i][a]));
          worst = std::max(worst, std::abs(pd[i][a] - general_eucl[i][a]));
        }
      }
    }
  }
  std::ostringstream os;
  os << "replicator and projection identities at 100 interior states per "
     << "game, max gap = " << worst;
  detail = os.str();
  return worst < 1e-9;
}

// 9. The KKT solver reproduces the closed-form choice maps exactly, with
//    certified residuals and vanishing multipliers in the steep case.
bool mirror_map_exactness(std::string& detail) {
  Rng rng(916);
  double worst_gap = 0.0, worst_residual = 0.0;
  int solved = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 2 + trial % 3;
    std::vector<double> y(m);
    for (double& c : y) c = rng.uniform(-3.0, 3.0);

    for (const Regularizer& reg : three_families()) {
      const KktCertificate cert = reg.kkt_solve(y);
      worst_residual = std::max(worst_residual, cert.residual);
      ++solved;
      if (cert.residual >= 1e-9) {
        detail = "residual " + std::to_string(cert.residual);
        return false;
      }
      if (reg.steep()) {
        for (double nu : cert.nu) {
          if (nu != 0.0) {
            detail = "steep certificate with nonzero multiplier";
            return false;
          }
        }
      }
      if (reg.kind() != RegularizerKind::kTsallis) {
        const auto closed = reg.mirror_map(y);
        for (int a = 0; a < m; ++a) {
          worst_gap = std::max(worst_gap, std::abs(closed[a] - cert.x[a]));
        }
      }
    }
  }
  std::ostringstream os;
  os << solved << " certificates: max gap to closed forms = " << worst_gap
     << " < 1e-10, max residual = " << worst_residual << " < 1e-9, steep "
     << "multipliers all zero";
  detail = os.str();
  return worst_gap < 1e-10;
}

// 10. Score-space integration pushed through the choice map agrees with the
//     primal integration of the steep strategy dynamics.
bool dual_consistency(std::string& detail) {
  const FiniteGame& game = builtin_game_info("matching_pennies").game;
  const Regularizer reg = Regularizer::negentropy();
  IntegratorConfig config;
  config.rtol = 1e-10;
  config.atol = 1e-12;
  config.horizon = 10.0;
  config.sample_interval = 0.25;

  const MixedProfile x0{{{0.7, 0.3}, {0.6, 0.4}}};
  const Trajectory dual =
      integrate_scores(game, reg, score_lift(reg, x0), config);
  const Trajectory primal = integrate_strategies_steep(game, reg, x0, config);
  if (dual.times.size() != primal.times.size()) {
    detail = "sample count mismatch";
    return false;
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < dual.times.size(); ++k) {
    worst = std::max(worst, profile_distance(dual.mixed[k], primal.mixed[k]));
  }
  std::ostringstream os;
  os << "matching pennies, T=10: max strategy gap between the two routes = "
     << worst << " < 1e-6";
  detail = os.str();
  return worst < 1e-6;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "incompressibility of the score and reduced fields",
       incompressibility},
      {2, "volume preservation of the reduced flow", volume_preservation},
      {3, "instability of fully mixed equilibria", interior_instability},
      {4, "asymptotic stability of strict equilibria", strict_stability},
      {5, "instability of partially mixed equilibria",
       partially_mixed_instability},
      {6, "Poincare recurrence in matching pennies", recurrence},
      {7, "finite support collapse within 2G/c", support_collapse},
      {8, "replicator / projection specialization identities",
       specialization_identities},
      {9, "KKT certificates match the closed-form choice maps",
       mirror_map_exactness},
      {10, "dual consistency of score and primal integration",
       dual_consistency},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] criterion %2d: %s — %s (%.1f s)\n",
                ok ? "PASS" : "FAIL", criterion.id, criterion.name.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
  }

  if (failures == 0) {
    std::printf("all %zu acceptance criteria hold\n", criteria.size());
  } else {
    std::printf("%d of %zu acceptance criteria FAILED\n", failures,
                criteria.size());
  }
  return failures == 0 ? 0 : 1;
}
