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

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <doctest.h>

#include "ftrl/errors.hpp"
#include "ftrl/rng.hpp"

namespace ftrl {
namespace {

std::string temp_path(const std::string& name) {
  return std::string("harness_test_") + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("builtin corpus spans the equilibrium classes") {
  const auto corpus = builtin_games();
  CHECK(corpus.size() >= 6);

  std::set<std::string> classes;
  bool has_multi_equilibrium_game = false;
  for (const auto& info : corpus) {
    if (info.equilibria.size() > 1) has_multi_equilibrium_game = true;
    for (const auto& eq : info.equilibria) {
      classes.insert(eq.classification);
      // Stored equilibria must actually be equilibria...
      CHECK(is_nash(info.game, eq.profile, 1e-8));
      // ...and carry the classification the classifier computes.
      const auto report = classify_equilibrium(info.game, eq.profile, 1e-8);
      CHECK(classification_label(report) == eq.classification);
      CHECK_FALSE(eq.source.empty());
    }
  }
  CHECK(classes.count("strict") == 1);
  CHECK(classes.count("fully_mixed") == 1);
  CHECK(classes.count("partially_mixed") == 1);
  CHECK(has_multi_equilibrium_game);

  // Every builtin game is generic, so the collapse experiments accept them.
  for (const auto& info : corpus) {
    CHECK(is_generic_game(info.game));
  }
}

TEST_CASE("builtin corpus fixture values") {
  const FiniteGame& mp = builtin_game_info("matching_pennies").game;
  CHECK(mp.zero_sum());
  CHECK(mp.payoff(0, {0, 0}) == doctest::Approx(1.0));
  CHECK(mp.payoff(0, {0, 1}) == doctest::Approx(-1.0));

  const FiniteGame& z3 = builtin_game_info("zero_sum_2x2x2").game;
  CHECK(z3.zero_sum());
  CHECK(z3.num_players() == 3);

  CHECK_THROWS_AS(builtin_game_info("chicken"), UnknownBuiltinError);
  CHECK_THROWS_AS(load_game("not_a_builtin"), UnknownBuiltinError);
}

TEST_CASE("game files round-trip") {
  Rng rng(5);
  std::vector<double> payoffs(2 * 6);
  for (double& u : payoffs) u = rng.uniform(-1, 1);
  const FiniteGame game({2, 3}, payoffs,
                        {{"row", "col"}, {{"a", "b"}, {"x", "y", "z"}}});

  const std::string path = temp_path("roundtrip.json");
  save_game(game, path);
  const FiniteGame loaded = load_game(path);
  CHECK(loaded.action_counts() == game.action_counts());
  CHECK(loaded.payoffs() == game.payoffs());
  CHECK(loaded.labels().players == game.labels().players);
  CHECK(game_hash(loaded) == game_hash(game));
  std::remove(path.c_str());
}

TEST_CASE("malformed game files raise parse errors with context") {
  const std::string path = temp_path("broken.json");
  {
    std::ofstream out(path);
    out << R"({"players": 2, "actions": [2, 2], "payoffs": [1, 2, 3]})";
  }
  try {
    load_game(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("8") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_game(path), ParseError);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_game("./does_not_exist.json"), ParseError);
}

TEST_CASE("game hashes separate games") {
  const auto h1 = game_hash(builtin_game_info("matching_pennies").game);
  const auto h2 = game_hash(builtin_game_info("coordination_2x2").game);
  CHECK(h1 != h2);
  CHECK(h1.size() == 16);
  CHECK(h1 == game_hash(builtin_game_info("matching_pennies").game));
}

TEST_CASE("simulate experiment writes a report and a csv") {
  ExperimentConfig config;
  config.kind = ExperimentKind::kSimulate;
  config.game = "matching_pennies";
  config.regularizer = "negentropy";
  config.integrator.horizon = 10.0;
  config.integrator.sample_interval = 0.5;
  config.seed = 42;
  config.out_path = temp_path("simulate.json");

  const ExperimentOutcome outcome = run_experiment(config);
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.report.at("schema") == "ftrl-report/1");

  const std::string csv = slurp(temp_path("simulate.csv"));
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "t,y0_0,y0_1,y1_0,y1_1,x0_0,x0_1,x1_0,x1_1");
  double prev_t = -1.0;
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    REQUIRE(row.size() == 9);
    CHECK(row[0] > prev_t);
    prev_t = row[0];
    CHECK(row[5] + row[6] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(row[7] + row[8] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(row[5] >= 0.0);
    CHECK(row[7] >= 0.0);
    ++rows;
  }
  CHECK(rows == 21);
  std::remove(temp_path("simulate.json").c_str());
  std::remove(temp_path("simulate.csv").c_str());
}

TEST_CASE("simulate covers the reduced and primal spaces and emits events") {
  ExperimentConfig config;
  config.kind = ExperimentKind::kSimulate;
  config.game = "dominance_2x2";
  config.regularizer = "euclidean";
  config.integrator.horizon = 3.0;
  config.integrator.sample_interval = 0.05;
  config.profile = MixedProfile{{{0.4, 0.6}, {0.45, 0.55}}};

  const ExperimentOutcome euclid = run_experiment(config);
  CHECK(euclid.exit_code == 0);
  // Both players shed their dominated action in finite time.
  REQUIRE(euclid.report.at("result").at("events").size() == 2);
  for (const auto& ev : euclid.report.at("result").at("events")) {
    CHECK(ev.at("kind") == "support_exit");
    CHECK(ev.at("time").get<double>() > 0.0);
  }

  config.space = StateSpace::kReduced;
  const ExperimentOutcome reduced = run_experiment(config);
  CHECK(reduced.exit_code == 0);
  CHECK(reduced.report.at("result").at("space") == "reduced");
  CHECK(reduced.report.at("result").contains("reduced"));

  config.game = "matching_pennies";
  config.regularizer = "negentropy";
  config.space = StateSpace::kPrimal;
  config.profile = MixedProfile{{{0.7, 0.3}, {0.6, 0.4}}};
  const ExperimentOutcome primal = run_experiment(config);
  CHECK(primal.exit_code == 0);
  CHECK(primal.report.at("result").at("space") == "primal");
  CHECK(primal.report.at("result").at("events").empty());
}

TEST_CASE("reports are byte-identical for identical config and seed") {
  ExperimentConfig config;
  config.kind = ExperimentKind::kStability;
  config.game = "rock_paper_scissors";
  config.regularizer = "negentropy";
  config.integrator.horizon = 50.0;
  config.radius = 0.02;
  config.n_samples = 10;
  config.seed = 9;
  config.profile = MixedProfile{
      {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}}};

  const ExperimentOutcome a = run_experiment(config);
  const ExperimentOutcome b = run_experiment(config);
  CHECK(a.report.dump() == b.report.dump());
  CHECK(a.exit_code == 0);
  CHECK(a.report.at("result").at("verdict") == "unstable_evidence");
}

TEST_CASE("experiment exit codes follow the pass flag") {
  ExperimentConfig config;
  config.kind = ExperimentKind::kDivergence;
  config.game = "battle_of_sexes";
  config.regularizer = "euclidean";
  config.n_samples = 25;
  config.tol = 1e-6;
  config.seed = 4;
  CHECK(run_experiment(config).exit_code == 0);

  // An impossible tolerance turns the same experiment into a failed check.
  config.tol = 1e-30;
  CHECK(run_experiment(config).exit_code == 2);

  // Randomized kinds refuse to run unseeded.
  config.seed.reset();
  CHECK_THROWS_AS(run_experiment(config), InvalidArgumentError);
}

TEST_CASE("classify and enumerate experiments") {
  ExperimentConfig config;
  config.kind = ExperimentKind::kClassify;
  config.game = "dominance_2x2";
  config.profile = MixedProfile{{{0.0, 1.0}, {0.0, 1.0}}};
  const ExperimentOutcome c = run_experiment(config);
  CHECK(c.exit_code == 0);
  CHECK(c.report.at("result").at("classification") == "strict");

  ExperimentConfig e;
  e.kind = ExperimentKind::kEnumerate;
  e.game = "coordination_2x2";
  const ExperimentOutcome out = run_experiment(e);
  CHECK(out.exit_code == 0);
  CHECK(out.report.at("result").at("equilibria").size() == 3);
  CHECK(out.report.at("result").at("generic") == true);
}

TEST_CASE("config json round-trip") {
  ExperimentConfig config;
  config.kind = ExperimentKind::kRecurrence;
  config.game = "matching_pennies";
  config.regularizer = "tsallis:q=0.5";
  config.epsilon = 0.02;
  config.integrator.horizon = 123.0;
  config.seed = 77;
  config.benchmarks = {1, 0};
  config.out_path = "x.json";

  const ExperimentConfig back = config_from_json(config_to_json(config));
  CHECK(back.kind == config.kind);
  CHECK(back.game == config.game);
  CHECK(back.regularizer == config.regularizer);
  CHECK(back.epsilon == config.epsilon);
  CHECK(back.integrator.horizon == config.integrator.horizon);
  CHECK(back.seed == config.seed);
  CHECK(back.benchmarks == config.benchmarks);
  CHECK(back.out_path == config.out_path);

  CHECK_THROWS_AS(
      config_from_json(nlohmann::json{{"kind", "warp"}, {"game", "x"}}),
      ParseError);
}

}  // namespace
}  // namespace ftrl
