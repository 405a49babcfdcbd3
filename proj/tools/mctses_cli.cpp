// Copyright 2026 The mctses Authors
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

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mctses/bench.hpp"
#include "mctses/error.hpp"
#include "mctses/sokoban.hpp"

namespace {

using mctses::ExperimentConfig;

void AddRunFlags(CLI::App& run, ExperimentConfig& c) {
  run.add_option("--env", c.env, "navigation | sokoban | tsp | vkcp | mdp")->capture_default_str();
  run.add_option("--size", c.size, "cities / points / targets (0 = default)");
  run.add_option("--k", c.k, "subset size for vkcp / mdp (0 = default)");
  run.add_option("--horizon", c.horizon, "episode horizon for navigation / sokoban");
  run.add_option("--levels", c.levels, "Boxoban level file for sokoban");

  run.add_option("--es", c.es, "trainer flag, repeatable: 0 = planning loss, 1 = ES")
      ->capture_default_str();
  run.add_option("--lr", c.lrs, "learning rate, repeatable")->capture_default_str();
  run.add_option("--trials", c.trials)->capture_default_str();
  run.add_option("--epochs", c.epochs)->capture_default_str();
  run.add_option("--batch", c.batch, "episodes per epoch")->capture_default_str();
  run.add_option("--time-limit", c.time_limit_s, "wall-clock seconds per run, 0 = none");

  run.add_option("--hidden", c.hidden)->capture_default_str();
  run.add_option("--num-equivariant", c.num_equivariant)->capture_default_str();
  run.add_option("--budget", c.search.budget, "MCTS simulations per move")->capture_default_str();
  run.add_option("--max-considered", c.search.max_considered)->capture_default_str();
  run.add_option("--c-visit", c.search.c_visit)->capture_default_str();
  run.add_option("--c-scale", c.search.c_scale)->capture_default_str();
  run.add_option("--optimizer", c.optimizer, "adabelief | sgd")->capture_default_str();

  run.add_option("--sigma", c.sigma)->capture_default_str();
  run.add_option("--workers", c.workers, "ES workers = antithetic pairs per iteration")
      ->capture_default_str();
  run.add_option("--episodes-per-eval", c.episodes_per_eval)->capture_default_str();
  run.add_flag("--centered-ranks", c.centered_ranks);

  run.add_option("--pool", c.pool, "inproc | tcp")->capture_default_str();
  run.add_option("--rank", c.rank, "worker rank for --pool tcp")->envname("MCTSES_RANK");
  run.add_option("--peers", c.peers, "host:port,... for --pool tcp")->envname("MCTSES_PEERS");
  run.add_option("--timeout-ms", c.timeout_ms)->capture_default_str();

  run.add_option("--seed", c.seed)->capture_default_str();
  run.add_option("--threads", c.threads, "rollout threads per worker")->capture_default_str();
  run.add_option("--out", c.out)->capture_default_str();
  run.add_option("--params-out", c.params_out, "checkpoint of the last run's parameters");
  run.add_flag("--force", c.force, "rerun even if the output is complete");
  run.add_flag("--wall-time", c.wall_time, "record wall_ms (breaks byte-identical reruns)");
}

// CLI11 reads config files at the top level only, so "run --config f" is
// rewritten to "--config f run".
std::vector<std::string> HoistConfig(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      std::vector<std::string> moved = {args[i], args[i + 1]};
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      args.insert(args.begin(), moved.begin(), moved.end());
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      std::string moved = args[i];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      args.insert(args.begin(), moved);
      break;
    }
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MCTS planning agents trained by planning loss or evolution strategies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mctses::Version());

  ExperimentConfig config;
  CLI::App* run = app.add_subcommand("run", "train and write a metrics CSV");
  app.set_config("--config", "", "TOML/INI file; run flags go in a [run] section; flags win");
  AddRunFlags(*run, config);
  bool quiet = false;
  run->add_flag("-q,--quiet", quiet);

  std::vector<std::string> inputs;
  std::string summary_out;
  CLI::App* agg = app.add_subcommand("aggregate", "mean and SEM across trials");
  agg->add_option("inputs", inputs, "metrics CSV files")->required();
  agg->add_option("-o,--out", summary_out, "summary CSV (default stdout)");

  std::string level_file;
  bool render = false;
  CLI::App* levels = app.add_subcommand("levels", "validate a Boxoban level file");
  levels->add_option("file", level_file)->required();
  levels->add_flag("--render", render, "print the canonical rendering");

  try {
    app.parse(HoistConfig(argc, argv));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      const auto outcome = mctses::RunExperiment(config, [&](const mctses::MetricsRow& row) {
        if (quiet) return;
        std::cerr << "es=" << row.es << " lr=" << row.lr << " trial=" << row.trial
                  << " epoch=" << row.epoch << " score=" << row.mean_score << '\n';
      });
      if (outcome == mctses::RunOutcome::kSkipped) {
        std::cerr << "mctses: " << config.out << " is complete for this config; use --force\n";
      }
    } else if (*agg) {
      const auto summary = mctses::AggregateFiles(inputs);
      if (summary_out.empty()) {
        mctses::WriteSummary(std::cout, summary);
      } else {
        std::ofstream out(summary_out);
        if (!out) throw mctses::ConfigError("cannot write " + summary_out);
        mctses::WriteSummary(out, summary);
      }
    } else if (*levels) {
      const auto set = mctses::LoadBoxoban(level_file);
      if (render) {
        std::cout << mctses::RenderBoxoban(set);
      } else {
        std::cout << set.size() << " levels ok\n";
      }
    }
  } catch (const mctses::ParseError& e) {
    std::cerr << "mctses: " << e.what() << '\n';
    return 3;
  } catch (const mctses::ConfigError& e) {
    std::cerr << "mctses: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mctses: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
