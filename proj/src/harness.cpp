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

#include "ftrl/harness.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ftrl/errors.hpp"
#include "ftrl/rng.hpp"

namespace ftrl {

namespace {

using nlohmann::json;

std::vector<BuiltinGameInfo> make_builtin_corpus() {
  std::vector<BuiltinGameInfo> corpus;

  const auto add = [&corpus](std::string key, FiniteGame game,
                             std::vector<StoredEquilibrium> eqs) {
    corpus.push_back({std::move(key), std::move(game), std::move(eqs)});
  };

  // Matching Pennies: unique fully mixed equilibrium.
  add("matching_pennies",
      FiniteGame({2, 2},
                 {1, -1, -1, 1,    // player 1
                  -1, 1, 1, -1},   // player 2
                 {{"P1", "P2"}, {{"heads", "tails"}, {"heads", "tails"}}}),
      {{MixedProfile{{{0.5, 0.5}, {0.5, 0.5}}}, "fully_mixed", "closed_form"}});

  // Rock-Paper-Scissors, +/-1 zero-sum.
  add("rock_paper_scissors",
      FiniteGame({3, 3},
                 {0, -1, 1, 1, 0, -1, -1, 1, 0,
                  0, 1, -1, -1, 0, 1, 1, -1, 0},
                 {{"P1", "P2"},
                  {{"rock", "paper", "scissors"},
                   {"rock", "paper", "scissors"}}}),
      {{MixedProfile{{{1.0 / 3, 1.0 / 3, 1.0 / 3},
                      {1.0 / 3, 1.0 / 3, 1.0 / 3}}},
        "fully_mixed", "closed_form"}});

  // Coordination with unequal peaks: two strict pure equilibria and one
  // fully mixed one.
  add("coordination_2x2",
      FiniteGame({2, 2},
                 {2, 0, 0, 1,   //
                  2, 0, 0, 1},
                 {{"P1", "P2"}, {{"A", "B"}, {"A", "B"}}}),
      {{MixedProfile{{{1.0, 0.0}, {1.0, 0.0}}}, "strict", "closed_form"},
       {MixedProfile{{{0.0, 1.0}, {0.0, 1.0}}}, "strict", "closed_form"},
       {MixedProfile{{{1.0 / 3, 2.0 / 3}, {1.0 / 3, 2.0 / 3}}}, "fully_mixed",
        "closed_form"}});

  // Battle of the Sexes.
  add("battle_of_sexes",
      FiniteGame({2, 2},
                 {3, 0, 0, 2,   //
                  2, 0, 0, 3},
                 {{"P1", "P2"}, {{"opera", "football"}, {"opera", "football"}}}),
      {{MixedProfile{{{1.0, 0.0}, {1.0, 0.0}}}, "strict", "closed_form"},
       {MixedProfile{{{0.0, 1.0}, {0.0, 1.0}}}, "strict", "closed_form"},
       {MixedProfile{{{0.6, 0.4}, {0.4, 0.6}}}, "fully_mixed", "closed_form"}});

  // Strictly dominant second action for both players; the unique equilibrium
  // is strict with payoff gap exactly 1.
  add("dominance_2x2",
      FiniteGame({2, 2},
                 {3, 1, 4, 2,   //
                  3, 4, 1, 2},
                 {{"P1", "P2"}, {{"A", "B"}, {"A", "B"}}}),
      {{MixedProfile{{{0.0, 1.0}, {0.0, 1.0}}}, "strict", "closed_form"}});

  // Three-player zero-sum game: players 1 and 2 play Matching Pennies in
  // both slices, player 3's first action is strictly better by 1 regardless
  // of the others.  Unique equilibrium is partially mixed and quasi-strict.
  add("zero_sum_2x2x2",
      FiniteGame({2, 2, 2},
                 {1, 1, -1, -1, -1, -1, 1, 1,     // player 1: MP(a,b)
                  -1, 0, 1, 2, 1, 2, -1, 0,       // player 2: -MP + [c == 2]
                  0, -1, 0, -1, 0, -1, 0, -1},    // player 3: -[c == 2]
                 {{"P1", "P2", "P3"},
                  {{"heads", "tails"}, {"heads", "tails"}, {"left", "right"}}}),
      {{MixedProfile{{{0.5, 0.5}, {0.5, 0.5}, {1.0, 0.0}}}, "partially_mixed",
        "closed_form"}});

  return corpus;
}

const std::vector<BuiltinGameInfo>& builtin_corpus() {
  static const std::vector<BuiltinGameInfo> corpus = make_builtin_corpus();
  return corpus;
}

}  // namespace

const std::vector<std::string>& builtin_game_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& info : builtin_corpus()) k.push_back(info.key);
    return k;
  }();
  return keys;
}

const BuiltinGameInfo& builtin_game_info(const std::string& key) {
  for (const auto& info : builtin_corpus()) {
    if (info.key == key) return info;
  }
  throw UnknownBuiltinError("unknown builtin game '" + key + "'");
}

std::vector<BuiltinGameInfo> builtin_games() { return builtin_corpus(); }

std::string classification_label(const EquilibriumReport& report) {
  if (!report.is_nash) return "not_nash";
  if (report.is_strict) return "strict";
  if (report.is_pure) return "pure";
  if (report.is_fully_mixed) return "fully_mixed";
  return "partially_mixed";
}

// ---------------------------------------------------------------------------
// Game serialization.

FiniteGame game_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("game document must be a JSON object");
  for (const char* field : {"players", "actions", "payoffs"}) {
    if (!j.contains(field)) {
      throw ParseError(std::string("game document lacks field '") + field +
                       "'");
    }
  }
  const int players = j.at("players").get<int>();
  std::vector<int> actions;
  for (const auto& a : j.at("actions")) actions.push_back(a.get<int>());
  if (static_cast<int>(actions.size()) != players) {
    throw ParseError("field 'actions' needs one entry per player: expected " +
                     std::to_string(players) + ", found " +
                     std::to_string(actions.size()));
  }
  for (int m : actions) {
    if (m < 2) throw ParseError("every player needs at least 2 actions");
  }
  std::size_t expected = players;
  for (int m : actions) expected *= m;
  std::vector<double> payoffs;
  for (const auto& u : j.at("payoffs")) payoffs.push_back(u.get<double>());
  if (payoffs.size() != expected) {
    throw ParseError("field 'payoffs': expected " + std::to_string(expected) +
                     " entries, found " + std::to_string(payoffs.size()));
  }

  GameLabels labels;
  if (j.contains("labels")) {
    const auto& l = j.at("labels");
    if (l.contains("players")) {
      for (const auto& p : l.at("players")) {
        labels.players.push_back(p.get<std::string>());
      }
    }
    if (l.contains("actions")) {
      for (const auto& row : l.at("actions")) {
        labels.actions.emplace_back();
        for (const auto& name : row) {
          labels.actions.back().push_back(name.get<std::string>());
        }
      }
    }
  }
  try {
    return FiniteGame(std::move(actions), std::move(payoffs),
                      std::move(labels));
  } catch (const InvalidArgumentError& e) {
    throw ParseError(e.what());
  }
}

json game_to_json(const FiniteGame& game) {
  json j;
  j["players"] = game.num_players();
  j["actions"] = game.action_counts();
  j["payoffs"] = game.payoffs();
  if (!game.labels().players.empty() || !game.labels().actions.empty()) {
    json l;
    if (!game.labels().players.empty()) l["players"] = game.labels().players;
    if (!game.labels().actions.empty()) l["actions"] = game.labels().actions;
    j["labels"] = l;
  }
  return j;
}

FiniteGame load_game(const std::string& path_or_key) {
  const bool looks_like_path =
      path_or_key.find('/') != std::string::npos ||
      path_or_key.find('.') != std::string::npos;
  if (!looks_like_path) {
    return builtin_game_info(path_or_key).game;
  }
  std::ifstream in(path_or_key);
  if (!in) throw ParseError("cannot open game file '" + path_or_key + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("in '" + path_or_key + "': " + e.what());
  }
  return game_from_json(j);
}

void save_game(const FiniteGame& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write game file '" + path + "'");
  out << game_to_json(game).dump(2) << "\n";
}

std::string game_hash(const FiniteGame& game) {
  const std::string bytes = game_to_json(game).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Report serialization.

void to_json(json& j, const MixedProfile& x) { j = x.strategies; }

void to_json(json& j, const EquilibriumReport& r) {
  j = json{{"profile", r.profile},
           {"is_nash", r.is_nash},
           {"is_pure", r.is_pure},
           {"is_strict", r.is_strict},
           {"is_quasi_strict", r.is_quasi_strict},
           {"is_fully_mixed", r.is_fully_mixed},
           {"is_partially_mixed", r.is_partially_mixed},
           {"worst_deviation_gap", r.worst_deviation_gap},
           {"supported_payoff_gap_c",
            std::isinf(r.supported_payoff_gap_c) ? json("inf")
                                                 : json(r.supported_payoff_gap_c)}};
}

void to_json(json& j, const SupportEvent& e) {
  j = json{{"time", e.time},
           {"player", e.player},
           {"action", e.action},
           {"kind", e.kind == SupportEventKind::kExit ? "support_exit"
                                                      : "support_enter"},
           {"ambiguous", e.ambiguous}};
}

void to_json(json& j, const IntegratorStats& s) {
  j = json{{"steps_accepted", s.steps_accepted},
           {"steps_rejected", s.steps_rejected},
           {"max_error_estimate", s.max_error_estimate},
           {"max_renormalization_drift", s.max_renormalization_drift}};
}

void to_json(json& j, const VolumeReport& r) {
  j = json{{"det_jacobian_per_time", r.det_jacobian_per_time},
           {"max_abs_log_det", r.max_abs_log_det},
           {"cloud_log_volume_per_time", r.cloud_log_volume_per_time},
           {"max_abs_divergence", r.max_abs_divergence},
           {"num_divergence_samples", r.divergence_samples.size()},
           {"tolerance", r.tolerance},
           {"pass", r.pass}};
}

void to_json(json& j, const RecurrenceReport& r) {
  j = json{{"start", r.start},
           {"epsilon", r.epsilon},
           {"horizon", r.horizon},
           {"return_times", r.return_times},
           {"recurrent", r.recurrent},
           {"stationary", r.stationary}};
}

namespace {
std::string verdict_name(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::kAsymptoticallyStableEvidence:
      return "asymptotically_stable_evidence";
    case StabilityVerdict::kUnstableEvidence:
      return "unstable_evidence";
    case StabilityVerdict::kInconclusive:
      return "inconclusive";
  }
  return "";
}
}  // namespace

void to_json(json& j, const StabilityReport& r) {
  j = json{{"candidate", r.candidate},
           {"radius", r.radius},
           {"set_radius", r.set_radius},
           {"n_samples", r.n_samples},
           {"fraction_converged", r.fraction_converged},
           {"fraction_contained", r.fraction_contained},
           {"verdict", verdict_name(r.verdict)}};
}

void to_json(json& j, const SupportCollapseReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) {
    samples.push_back(json{{"start", s.start},
                           {"collapsed", s.collapsed},
                           {"collapse_time", s.collapse_time}});
  }
  j = json{{"target", r.target},
           {"samples", samples},
           {"max_collapse_time", r.max_collapse_time},
           {"bound_t0", r.bound_t0},
           {"g_constant", r.g_constant},
           {"c_constant", r.c_constant},
           {"probe_radius", r.probe_radius},
           {"all_within_bound", r.all_within_bound}};
}

void to_json(json& j, const DriftReport& r) {
  j = json{{"initial_value", r.initial_value},
           {"max_abs_drift", r.max_abs_drift},
           {"max_relative_drift", r.max_relative_drift}};
}

// ---------------------------------------------------------------------------
// Experiment configuration.

ExperimentKind parse_experiment_kind(const std::string& name) {
  static const std::map<std::string, ExperimentKind> kinds = {
      {"simulate", ExperimentKind::kSimulate},
      {"divergence", ExperimentKind::kDivergence},
      {"volume", ExperimentKind::kVolume},
      {"recurrence", ExperimentKind::kRecurrence},
      {"stability", ExperimentKind::kStability},
      {"collapse", ExperimentKind::kCollapse},
      {"classify", ExperimentKind::kClassify},
      {"enumerate", ExperimentKind::kEnumerate},
  };
  const auto it = kinds.find(name);
  if (it == kinds.end()) {
    throw ParseError("unknown experiment kind '" + name + "'");
  }
  return it->second;
}

std::string experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSimulate: return "simulate";
    case ExperimentKind::kDivergence: return "divergence";
    case ExperimentKind::kVolume: return "volume";
    case ExperimentKind::kRecurrence: return "recurrence";
    case ExperimentKind::kStability: return "stability";
    case ExperimentKind::kCollapse: return "collapse";
    case ExperimentKind::kClassify: return "classify";
    case ExperimentKind::kEnumerate: return "enumerate";
  }
  return "";
}

namespace {

StateSpace parse_space(const std::string& name) {
  if (name == "score") return StateSpace::kScore;
  if (name == "reduced") return StateSpace::kReduced;
  if (name == "primal") return StateSpace::kPrimal;
  throw ParseError("unknown state space '" + name + "'");
}

std::string space_name(StateSpace space) {
  switch (space) {
    case StateSpace::kScore: return "score";
    case StateSpace::kReduced: return "reduced";
    case StateSpace::kPrimal: return "primal";
  }
  return "";
}

MixedProfile profile_from_json(const json& j) {
  MixedProfile x;
  for (const auto& row : j) {
    x.strategies.emplace_back();
    for (const auto& v : row) x.strategies.back().push_back(v.get<double>());
  }
  return x;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.kind = parse_experiment_kind(j.at("kind").get<std::string>());
  c.game = j.at("game").get<std::string>();
  if (j.contains("reg")) c.regularizer = j.at("reg").get<std::string>();
  if (j.contains("space")) c.space = parse_space(j.at("space").get<std::string>());
  if (j.contains("method")) {
    const std::string m = j.at("method").get<std::string>();
    if (m == "rk4_fixed") {
      c.integrator.method = IntegrationMethod::kRk4Fixed;
    } else if (m == "rk45_adaptive") {
      c.integrator.method = IntegrationMethod::kRk45Adaptive;
    } else {
      throw ParseError("unknown integration method '" + m + "'");
    }
  }
  if (j.contains("step")) c.integrator.step = j.at("step").get<double>();
  if (j.contains("rtol")) c.integrator.rtol = j.at("rtol").get<double>();
  if (j.contains("atol")) c.integrator.atol = j.at("atol").get<double>();
  if (j.contains("horizon")) c.integrator.horizon = j.at("horizon").get<double>();
  if (j.contains("sample_interval")) {
    c.integrator.sample_interval = j.at("sample_interval").get<double>();
  }
  if (j.contains("event_tolerance")) {
    c.integrator.event_tolerance = j.at("event_tolerance").get<double>();
  }
  if (j.contains("radius")) c.radius = j.at("radius").get<double>();
  if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("conv_tol")) c.conv_tol = j.at("conv_tol").get<double>();
  if (j.contains("tol")) c.tol = j.at("tol").get<double>();
  if (j.contains("samples")) c.n_samples = j.at("samples").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("profile")) c.profile = profile_from_json(j.at("profile"));
  if (j.contains("benchmarks")) {
    for (const auto& b : j.at("benchmarks")) c.benchmarks.push_back(b.get<int>());
  }
  if (j.contains("out")) c.out_path = j.at("out").get<std::string>();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = experiment_kind_name(c.kind);
  j["game"] = c.game;
  j["reg"] = c.regularizer;
  j["space"] = space_name(c.space);
  j["method"] = c.integrator.method == IntegrationMethod::kRk4Fixed
                    ? "rk4_fixed"
                    : "rk45_adaptive";
  j["step"] = c.integrator.step;
  j["rtol"] = c.integrator.rtol;
  j["atol"] = c.integrator.atol;
  j["horizon"] = c.integrator.horizon;
  j["sample_interval"] = c.integrator.sample_interval;
  j["event_tolerance"] = c.integrator.event_tolerance;
  j["radius"] = c.radius;
  j["epsilon"] = c.epsilon;
  j["conv_tol"] = c.conv_tol;
  j["tol"] = c.tol;
  j["samples"] = c.n_samples;
  if (c.seed) j["seed"] = *c.seed;
  if (c.profile) j["profile"] = *c.profile;
  if (!c.benchmarks.empty()) j["benchmarks"] = c.benchmarks;
  if (!c.out_path.empty()) j["out"] = c.out_path;
  return j;
}

// ---------------------------------------------------------------------------
// Trajectory export.

std::string trajectory_csv(const FiniteGame& game, const Regularizer& reg,
                           const Trajectory& traj) {
  std::ostringstream out;
  out.precision(17);

  out << "t";
  for (int i = 0; i < game.num_players(); ++i) {
    for (int a = 0; a < game.action_counts()[i]; ++a) {
      out << ",y" << i << "_" << a;
    }
  }
  for (int i = 0; i < game.num_players(); ++i) {
    for (int a = 0; a < game.action_counts()[i]; ++a) {
      out << ",x" << i << "_" << a;
    }
  }
  out << "\n";

  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << traj.times[k];
    if (traj.space == StateSpace::kScore) {
      for (const auto& yi : traj.scores[k].scores) {
        for (double v : yi) out << "," << v;
      }
    } else if (traj.space == StateSpace::kReduced) {
      const ScoreProfile y = lift_scores(traj.reduced[k]);
      for (const auto& yi : y.scores) {
        for (double v : yi) out << "," << v;
      }
    } else {
      // Primal runs carry no score state; the gradient lift is emitted on the
      // support, NaN off it.
      for (const auto& xi : traj.mixed[k].strategies) {
        for (double v : xi) {
          if (v > kSupportEpsilon) {
            const std::vector<double> g = reg.gradient({v});
            out << "," << g[0];
          } else {
            out << ",nan";
          }
        }
      }
    }
    for (const auto& xi : traj.mixed[k].strategies) {
      for (double v : xi) out << "," << v;
    }
    out << "\n";
  }
  return out.str();
}

json trajectory_json(const FiniteGame& game, const Trajectory& traj) {
  (void)game;
  json j;
  j["space"] = space_name(traj.space);
  j["times"] = traj.times;
  j["mixed"] = traj.mixed;
  if (traj.space == StateSpace::kScore) {
    json scores = json::array();
    for (const auto& y : traj.scores) scores.push_back(y.scores);
    j["scores"] = scores;
  } else if (traj.space == StateSpace::kReduced) {
    json diffs = json::array();
    for (const auto& z : traj.reduced) diffs.push_back(z.diffs);
    j["reduced"] = diffs;
  }
  j["events"] = traj.events;
  j["integrator_stats"] = traj.stats;
  return j;
}

// ---------------------------------------------------------------------------
// Experiment runner.

namespace {

void require_seed(const ExperimentConfig& c) {
  if (!c.seed) {
    throw InvalidArgumentError("experiment kind '" +
                               experiment_kind_name(c.kind) +
                               "' requires a seed");
  }
}

MixedProfile require_profile(const ExperimentConfig& c) {
  if (!c.profile) {
    throw InvalidArgumentError("experiment kind '" +
                               experiment_kind_name(c.kind) +
                               "' requires a profile");
  }
  return *c.profile;
}

MixedProfile random_interior_profile(const FiniteGame& game,
                                     std::uint64_t seed) {
  Rng rng(seed);
  MixedProfile x;
  for (int m : game.action_counts()) x.strategies.push_back(rng.simplex_point(m));
  return x;
}

std::vector<int> effective_benchmarks(const ExperimentConfig& c,
                                      const FiniteGame& game) {
  if (c.benchmarks.empty()) {
    return std::vector<int>(game.num_players(), 0);
  }
  if (static_cast<int>(c.benchmarks.size()) != game.num_players()) {
    throw InvalidArgumentError("one benchmark action per player required");
  }
  return c.benchmarks;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

std::string csv_path_for(const std::string& json_path) {
  const std::size_t dot = json_path.rfind('.');
  if (dot != std::string::npos && json_path.substr(dot) == ".json") {
    return json_path.substr(0, dot) + ".csv";
  }
  return json_path + ".csv";
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  const FiniteGame game = load_game(config.game);
  const Regularizer reg = Regularizer::parse(config.regularizer);

  ExperimentOutcome outcome;
  json result;
  bool pass = true;
  bool has_pass = false;
  std::ostringstream summary;
  summary.precision(6);
  summary << experiment_kind_name(config.kind) << " " << config.game << " "
          << config.regularizer;

  std::string extra_file;

  switch (config.kind) {
    case ExperimentKind::kSimulate: {
      MixedProfile x0;
      if (config.profile) {
        x0 = *config.profile;
        validate_profile(game, x0);
      } else {
        require_seed(config);
        x0 = random_interior_profile(game, *config.seed);
      }
      Trajectory traj;
      if (config.space == StateSpace::kPrimal) {
        traj = integrate_strategies_steep(game, reg, x0, config.integrator);
      } else if (config.space == StateSpace::kReduced) {
        const ReducedScore z0 = reduce_scores(
            score_lift(reg, x0), effective_benchmarks(config, game));
        traj = integrate_reduced(game, reg, z0, config.integrator);
      } else {
        traj = integrate_scores(game, reg, score_lift(reg, x0),
                                config.integrator);
      }
      if (config.space != StateSpace::kPrimal && !reg.steep()) {
        traj.events = detect_support_events(game, reg, traj, config.integrator);
      }
      result = trajectory_json(game, traj);
      if (!config.out_path.empty()) {
        write_file(csv_path_for(config.out_path),
                   trajectory_csv(game, reg, traj));
        extra_file = csv_path_for(config.out_path);
      }
      summary << " T=" << config.integrator.horizon
              << " samples=" << traj.times.size()
              << " events=" << traj.events.size();
      break;
    }
    case ExperimentKind::kDivergence: {
      require_seed(config);
      const VolumeReport report = check_incompressibility(
          game, reg, config.n_samples, config.tol, *config.seed);
      result = report;
      pass = report.pass;
      has_pass = true;
      summary << " max|div|=" << report.max_abs_divergence << " "
              << (pass ? "pass" : "FAIL");
      break;
    }
    case ExperimentKind::kVolume: {
      MixedProfile x0;
      if (config.profile) {
        x0 = *config.profile;
        validate_profile(game, x0);
      } else {
        require_seed(config);
        x0 = random_interior_profile(game, *config.seed);
      }
      const ReducedScore z0 = reduce_scores(
          score_lift(reg, x0), effective_benchmarks(config, game));
      const VolumeReport report = volume_preservation_test(
          game, reg, z0, config.integrator.horizon, config.integrator,
          config.tol, config.n_samples > 1 ? config.n_samples : 0,
          config.radius, config.seed.value_or(0));
      result = report;
      pass = report.pass;
      has_pass = true;
      summary << " max|log det|=" << report.max_abs_log_det << " "
              << (pass ? "pass" : "FAIL");
      break;
    }
    case ExperimentKind::kRecurrence: {
      MixedProfile x0;
      if (config.profile) {
        x0 = *config.profile;
        validate_profile(game, x0);
      } else {
        require_seed(config);
        x0 = random_interior_profile(game, *config.seed);
      }
      const RecurrenceReport report =
          recurrence_probe(game, reg, x0, config.epsilon,
                           config.integrator.horizon, config.integrator);
      result = report;
      summary << " recurrent=" << (report.recurrent ? "true" : "false")
              << " returns=" << report.return_times.size();
      break;
    }
    case ExperimentKind::kStability: {
      require_seed(config);
      const MixedProfile candidate = require_profile(config);
      validate_profile(game, candidate);
      StabilityOptions options;
      options.radius = config.radius;
      options.n_samples = config.n_samples;
      options.horizon = config.integrator.horizon;
      options.conv_tol = config.conv_tol;
      options.seed = *config.seed;
      options.integrator = config.integrator;
      const StabilityReport report =
          stability_probe(game, reg, candidate, options);
      result = report;
      summary << " verdict=" << verdict_name(report.verdict)
              << " conv=" << report.fraction_converged;
      break;
    }
    case ExperimentKind::kCollapse: {
      require_seed(config);
      MixedProfile target;
      if (config.profile) {
        target = *config.profile;
        validate_profile(game, target);
      } else {
        const EnumerationResult eqs = enumerate_equilibria(game, 1e-8);
        const auto it = std::find_if(
            eqs.equilibria.begin(), eqs.equilibria.end(),
            [](const EquilibriumReport& r) { return r.is_strict; });
        if (it == eqs.equilibria.end()) {
          throw InvalidArgumentError(
              "no strict equilibrium found; pass a target profile");
        }
        target = it->profile;
      }
      const std::vector<MixedProfile> starts = sample_profiles_near(
          game, target, config.radius, config.n_samples, *config.seed);
      const SupportCollapseReport report = support_collapse_time(
          game, reg, target, starts, config.integrator.horizon,
          config.integrator);
      result = report;
      pass = report.all_within_bound;
      has_pass = true;
      summary << " max_time=" << report.max_collapse_time
              << " bound=" << report.bound_t0 << " "
              << (pass ? "pass" : "FAIL");
      break;
    }
    case ExperimentKind::kClassify: {
      const MixedProfile x = require_profile(config);
      validate_profile(game, x);
      const EquilibriumReport report = classify_equilibrium(game, x, 1e-8);
      result = report;
      result["classification"] = classification_label(report);
      summary << " " << classification_label(report);
      break;
    }
    case ExperimentKind::kEnumerate: {
      const EnumerationResult res = enumerate_equilibria(game, 1e-8);
      json eqs = json::array();
      for (const auto& eq : res.equilibria) {
        json e = eq;
        e["classification"] = classification_label(eq);
        eqs.push_back(e);
      }
      json skipped = json::array();
      for (const auto& s : res.skipped) {
        skipped.push_back(
            json{{"support", s.support.actions}, {"reason", s.reason}});
      }
      result = json{{"equilibria", eqs},
                    {"skipped_supports", skipped},
                    {"generic", is_generic_game(game)}};
      summary << " equilibria=" << res.equilibria.size();
      break;
    }
  }

  json report;
  report["schema"] = "ftrl-report/1";
  report["experiment"] = experiment_kind_name(config.kind);
  report["game"] = json{{"source", config.game},
                        {"hash", game_hash(game)},
                        {"players", game.num_players()},
                        {"actions", game.action_counts()},
                        {"zero_sum", game.zero_sum()}};
  report["regularizer"] = config.regularizer;
  report["config"] = config_to_json(config);
  if (config.seed) {
    report["seed"] = *config.seed;
  } else {
    report["seed"] = nullptr;
  }
  report["result"] = result;
  if (has_pass) {
    report["pass"] = pass;
  } else {
    report["pass"] = nullptr;
  }

  if (!config.out_path.empty()) {
    write_file(config.out_path, report.dump(2) + "\n");
  }

  outcome.exit_code = has_pass && !pass ? 2 : 0;
  outcome.summary = summary.str();
  outcome.report = std::move(report);
  if (!extra_file.empty()) outcome.summary += " csv=" + extra_file;
  return outcome;
}

}  // namespace ftrl
