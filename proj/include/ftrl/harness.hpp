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

#ifndef FTRL_HARNESS_HPP_
#define FTRL_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftrl/analysis.hpp"
#include "ftrl/dynamics.hpp"
#include "ftrl/game.hpp"

namespace ftrl {

// ---------------------------------------------------------------------------
// Builtin corpus: one desk-scale game per equilibrium class.

struct StoredEquilibrium {
  MixedProfile profile;
  std::string classification;  // strict | fully_mixed | partially_mixed
  std::string source;          // how the equilibrium was obtained
};

struct BuiltinGameInfo {
  std::string key;
  FiniteGame game;
  std::vector<StoredEquilibrium> equilibria;
};

const std::vector<std::string>& builtin_game_keys();
const BuiltinGameInfo& builtin_game_info(const std::string& key);
std::vector<BuiltinGameInfo> builtin_games();

/// strict / pure / fully_mixed / partially_mixed for equilibria,
/// not_nash otherwise.
std::string classification_label(const EquilibriumReport& report);

// ---------------------------------------------------------------------------
// Game serialization.
//
// JSON format: { "players": N, "actions": [m_1,...,m_N],
//                "payoffs": flat player-major tensor in odometer order,
//                "labels": optional }.

FiniteGame game_from_json(const nlohmann::json& j);
nlohmann::json game_to_json(const FiniteGame& game);

/// Builtin key or JSON file path.
FiniteGame load_game(const std::string& path_or_key);
void save_game(const FiniteGame& game, const std::string& path);

/// FNV-1a over the canonical JSON serialization.
std::string game_hash(const FiniteGame& game);

// ---------------------------------------------------------------------------
// Report serialization (ADL hooks for nlohmann::json).

void to_json(nlohmann::json& j, const MixedProfile& x);
void to_json(nlohmann::json& j, const EquilibriumReport& r);
void to_json(nlohmann::json& j, const SupportEvent& e);
void to_json(nlohmann::json& j, const IntegratorStats& s);
void to_json(nlohmann::json& j, const VolumeReport& r);
void to_json(nlohmann::json& j, const RecurrenceReport& r);
void to_json(nlohmann::json& j, const StabilityReport& r);
void to_json(nlohmann::json& j, const SupportCollapseReport& r);
void to_json(nlohmann::json& j, const DriftReport& r);

// ---------------------------------------------------------------------------
// Experiments.

enum class ExperimentKind {
  kSimulate,
  kDivergence,
  kVolume,
  kRecurrence,
  kStability,
  kCollapse,
  kClassify,
  kEnumerate,
};

ExperimentKind parse_experiment_kind(const std::string& name);
std::string experiment_kind_name(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSimulate;
  std::string game;
  std::string regularizer = "negentropy";
  IntegratorConfig integrator;
  StateSpace space = StateSpace::kScore;
  double radius = 0.02;
  double epsilon = 1e-2;
  double conv_tol = 1e-6;
  double tol = 1e-6;  // pass tolerance for divergence / volume / collapse
  int n_samples = 50;
  std::optional<std::uint64_t> seed;
  std::optional<MixedProfile> profile;  // start / candidate / target
  std::vector<int> benchmarks;          // empty = action 0 per player
  std::string out_path;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct ExperimentOutcome {
  int exit_code = 0;  // 0 pass/completion, 2 failed check
  std::string summary;
  nlohmann::json report;
};

/// Dispatches to the analysis/dynamics operations, writes the report JSON
/// (and the trajectory CSV for simulate) to the configured output path, and
/// returns a one-line summary with the exit code.  Identical config and seed
/// produce byte-identical reports.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Trajectory CSV: t, score coordinates, strategy coordinates, player-major.
std::string trajectory_csv(const FiniteGame& game, const Regularizer& reg,
                           const Trajectory& trajectory);
nlohmann::json trajectory_json(const FiniteGame& game,
                               const Trajectory& trajectory);

}  // namespace ftrl

#endif  // FTRL_HARNESS_HPP_
