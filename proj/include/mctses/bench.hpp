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

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mctses/env.hpp"
#include "mctses/mcts.hpp"
#include "mctses/optim.hpp"
#include "mctses/train_es.hpp"

namespace mctses {

struct ExperimentConfig {
  // Environment.
  std::string env = "tsp";  // navigation | sokoban | tsp | vkcp | mdp
  int size = 0;             // cities / points / targets; 0 = environment default
  int k = 0;                // subset size; 0 = default
  int horizon = 0;          // navigation / sokoban time limit; 0 = default
  std::string levels;       // Boxoban level file (sokoban)

  // Protocol.
  std::vector<int> es = {0, 1};
  std::vector<double> lrs = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  int trials = 1;
  int epochs = 10;
  int batch = 32;  // episodes per epoch (planning-loss updates and metrics)
  double time_limit_s = 0.0;  // wall-clock cap per run; 0 = none

  // Agent.
  int hidden = 16;
  int num_equivariant = 1;
  SearchConfig search;
  std::string optimizer = "adabelief";

  // ES.
  double sigma = 0.1;
  int workers = 8;  // antithetic pairs per iteration = worker count
  int episodes_per_eval = 1;
  bool centered_ranks = false;

  // Distribution.
  std::string pool = "inproc";  // inproc | tcp
  int rank = 0;
  std::string peers;            // host:port list for tcp
  int timeout_ms = 120000;

  std::uint64_t seed = 0;
  int threads = 1;  // rollout threads inside a worker
  std::string out = "metrics.csv";
  std::string params_out;  // optional final-parameter checkpoint (last run)
  bool force = false;
  bool wall_time = false;  // fill wall_ms (makes the CSV non-reproducible)
};

// Throws ConfigError before any compute starts.
void ValidateExperiment(const ExperimentConfig& config);
EnvSpec BuildEnv(const ExperimentConfig& config);
nlohmann::json ConfigToJson(const ExperimentConfig& config);

struct MetricsRow {
  std::string env;
  int es = 0;
  double lr = 0.0;
  int trial = 0;
  int epoch = 0;
  double mean_score = 0.0;
  double value_loss = 0.0;
  double policy_loss = 0.0;
  double wall_ms = 0.0;
};

extern const char* const kMetricsHeader;
// 17 significant digits so values round-trip exactly.
std::string FormatDouble(double v);
std::string FormatRow(const MetricsRow& row);
std::vector<MetricsRow> ReadMetrics(const std::string& path);

std::string ManifestPath(const std::string& metrics_path);
std::string Version();

enum class RunOutcome { kCompleted, kSkipped };

using RowCallback = std::function<void(const MetricsRow&)>;

/// Runs every (trial, es, lr) combination and writes the metrics CSV and
/// its manifest. In a TCP pool only rank 0 writes files; all ranks compute.
RunOutcome RunExperiment(const ExperimentConfig& config, const RowCallback& on_row = {});

/// Per-(env, es, lr, epoch) mean and standard error across trials.
struct SummaryRow {
  std::string env;
  int es = 0;
  double lr = 0.0;
  int epoch = 0;
  int trials = 0;
  double score_mean = 0.0, score_sem = 0.0;
  double value_loss_mean = 0.0, value_loss_sem = 0.0;
  double policy_loss_mean = 0.0, policy_loss_sem = 0.0;
};

// Mean and SEM = sample stddev / sqrt(n); SEM is 0 for n = 1. The input is
// summed in sorted order, so the result does not depend on input order.
std::pair<double, double> MeanSem(std::vector<double> values);

std::vector<SummaryRow> Aggregate(const std::vector<MetricsRow>& rows);
std::vector<SummaryRow> AggregateFiles(const std::vector<std::string>& paths);
void WriteSummary(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace mctses
