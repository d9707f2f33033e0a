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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ftrl/errors.hpp"
#include "ftrl/harness.hpp"

namespace {

// "0.5,0.5;0.3,0.7" -> one simplex vector per player.
ftrl::MixedProfile parse_profile_arg(const std::string& arg) {
  ftrl::MixedProfile x;
  std::stringstream players(arg);
  std::string player;
  while (std::getline(players, player, ';')) {
    x.strategies.emplace_back();
    std::stringstream coords(player);
    std::string coord;
    while (std::getline(coords, coord, ',')) {
      try {
        x.strategies.back().push_back(std::stod(coord));
      } catch (const std::exception&) {
        throw ftrl::ParseError("bad profile coordinate '" + coord + "'");
      }
    }
  }
  if (x.strategies.empty()) throw ftrl::ParseError("empty profile");
  return x;
}

struct CliOptions {
  std::string game;
  std::string reg = "negentropy";
  std::string space = "score";
  std::string method = "rk45_adaptive";
  std::string profile;
  std::string out;
  double horizon = 10.0;
  double sample_interval = 0.1;
  double step = 0.01;
  double rtol = 1e-8;
  double atol = 1e-10;
  double event_tolerance = 1e-8;
  double radius = 0.02;
  double epsilon = 1e-2;
  double conv_tol = 1e-6;
  double tol = 1e-6;
  int samples = 50;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--game", opt.game, "builtin key or game JSON path")
      ->required();
  cmd->add_option("--reg", opt.reg,
                  "negentropy | euclidean | tsallis:q=<float>");
  cmd->add_option("--horizon", opt.horizon, "integration horizon T");
  cmd->add_option("--sample-interval", opt.sample_interval,
                  "trajectory sampling interval");
  cmd->add_option("--method", opt.method, "rk4_fixed | rk45_adaptive");
  cmd->add_option("--step", opt.step, "fixed step size (rk4_fixed)");
  cmd->add_option("--rtol", opt.rtol, "relative tolerance (rk45_adaptive)");
  cmd->add_option("--atol", opt.atol, "absolute tolerance (rk45_adaptive)");
  cmd->add_option("--event-tolerance", opt.event_tolerance,
                  "support event bisection tolerance");
  cmd->add_option("--radius", opt.radius, "probe ball radius");
  cmd->add_option("--epsilon", opt.epsilon, "recurrence ball radius");
  cmd->add_option("--conv-tol", opt.conv_tol, "convergence tolerance");
  cmd->add_option("--tol", opt.tol, "pass/fail tolerance");
  cmd->add_option("--samples", opt.samples, "number of sampled states/starts");
  cmd->add_option("--seed", opt.seed, "RNG seed")
      ->each([&opt](const std::string&) { opt.seed_set = true; });
  cmd->add_option("--space", opt.space, "score | reduced | primal");
  cmd->add_option("--profile", opt.profile,
                  "profile as p0,p1;q0,q1 (start / candidate / target)");
  cmd->add_option("--out", opt.out, "report output path (JSON)");
}

ftrl::ExperimentConfig to_config(ftrl::ExperimentKind kind,
                                 const CliOptions& opt) {
  ftrl::ExperimentConfig c;
  c.kind = kind;
  c.game = opt.game;
  c.regularizer = opt.reg;
  c.integrator.method = opt.method == "rk4_fixed"
                            ? ftrl::IntegrationMethod::kRk4Fixed
                            : ftrl::IntegrationMethod::kRk45Adaptive;
  if (opt.method != "rk4_fixed" && opt.method != "rk45_adaptive") {
    throw ftrl::ParseError("unknown integration method '" + opt.method + "'");
  }
  c.integrator.step = opt.step;
  c.integrator.rtol = opt.rtol;
  c.integrator.atol = opt.atol;
  c.integrator.horizon = opt.horizon;
  c.integrator.sample_interval = opt.sample_interval;
  c.integrator.event_tolerance = opt.event_tolerance;
  if (opt.space == "score") {
    c.space = ftrl::StateSpace::kScore;
  } else if (opt.space == "reduced") {
    c.space = ftrl::StateSpace::kReduced;
  } else if (opt.space == "primal") {
    c.space = ftrl::StateSpace::kPrimal;
  } else {
    throw ftrl::ParseError("unknown state space '" + opt.space + "'");
  }
  c.radius = opt.radius;
  c.epsilon = opt.epsilon;
  c.conv_tol = opt.conv_tol;
  c.tol = opt.tol;
  c.n_samples = opt.samples;
  if (opt.seed_set) c.seed = opt.seed;
  if (!opt.profile.empty()) c.profile = parse_profile_arg(opt.profile);
  c.out_path = opt.out;
  return c;
}

int run_config(const ftrl::ExperimentConfig& config) {
  const ftrl::ExperimentOutcome outcome = ftrl::run_experiment(config);
  std::cout << outcome.summary << "\n";
  return outcome.exit_code;
}

void print_corpus() {
  nlohmann::json listing = nlohmann::json::array();
  for (const auto& info : ftrl::builtin_games()) {
    nlohmann::json eqs = nlohmann::json::array();
    for (const auto& eq : info.equilibria) {
      eqs.push_back(nlohmann::json{{"profile", eq.profile},
                                   {"classification", eq.classification},
                                   {"source", eq.source}});
    }
    listing.push_back(nlohmann::json{{"key", info.key},
                                     {"players", info.game.num_players()},
                                     {"actions", info.game.action_counts()},
                                     {"zero_sum", info.game.zero_sum()},
                                     {"equilibria", eqs}});
  }
  std::cout << listing.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous-time FTRL game dynamics: simulation and checks"};
  app.require_subcommand(1);

  CliOptions opt;
  const std::vector<std::string> kinds = {
      "simulate",  "divergence", "volume",   "recurrence",
      "stability", "collapse",   "classify", "enumerate"};
  for (const std::string& kind : kinds) {
    CLI::App* cmd = app.add_subcommand(kind, kind + " experiment");
    add_common_options(cmd, opt);
  }

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run an experiment config file");
  run->add_option("--config", config_path, "experiment JSON")->required();

  CLI::App* games = app.add_subcommand("games", "list the builtin corpus");

  CLI11_PARSE(app, argc, argv);

  try {
    if (games->parsed()) {
      print_corpus();
      return 0;
    }
    if (run->parsed()) {
      std::ifstream in(config_path);
      if (!in) {
        throw ftrl::ParseError("cannot open config '" + config_path + "'");
      }
      nlohmann::json j;
      in >> j;
      return run_config(ftrl::config_from_json(j));
    }
    for (const std::string& kind : kinds) {
      if (app.get_subcommand(kind)->parsed()) {
        return run_config(to_config(ftrl::parse_experiment_kind(kind), opt));
      }
    }
  } catch (const ftrl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
