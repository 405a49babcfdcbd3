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
#include <vector>

#include "mctses/deepsets.hpp"
#include "mctses/env.hpp"
#include "mctses/loss.hpp"
#include "mctses/mcts.hpp"
#include "mctses/optim.hpp"
#include "mctses/worker_pool.hpp"

namespace mctses {

struct EsConfig {
  double sigma = 0.1;
  int population = 8;  // antithetic pairs per iteration
  int episodes_per_eval = 1;
  double lr = 1e-2;
  // Replace deltas by their centered ranks in [-0.5, 0.5]. Off by default.
  bool centered_ranks = false;
};

void ValidateEsConfig(const EsConfig& config);

/// Maps flat parameters and an evaluation seed to a scalar to maximize.
using FitnessFn = std::function<double(const std::vector<double>& x, std::uint64_t seed)>;

/// Mean score of `episodes` search-guided rollouts, episode e seeded with
/// DeriveSeed(seed, {e}).
double Fitness(const std::vector<double>& x, const NetDims& dims, const EnvSpec& env,
               const SearchConfig& search, int episodes, std::uint64_t seed);

FitnessFn MakeEpisodeFitness(const NetDims& dims, const EnvSpec& env,
                             const SearchConfig& search, int episodes);

/// f(x + sigma z) - f(x - sigma z), both sides evaluated with `seed`.
double EsDelta(const std::vector<double>& x, const std::vector<double>& z, double sigma,
               const FitnessFn& fitness, std::uint64_t seed);

/// g = 1 / (2 sigma |I|) sum_i delta_i z_i, summed in ascending index order.
std::vector<double> Pseudogradient(const std::vector<double>& deltas,
                                   const std::vector<std::vector<double>>& zs, double sigma);

// Perturbation z_i for (master_seed, iteration, pair), regenerated on demand.
std::vector<double> Perturbation(std::uint64_t master_seed, std::uint64_t iteration, int pair,
                                 std::size_t dim);
std::uint64_t EvalSeed(std::uint64_t master_seed, std::uint64_t iteration, int pair);

std::vector<double> CenteredRanks(const std::vector<double>& values);

struct EsIterationResult {
  std::vector<double> deltas;  // allgathered, by pair index
  std::vector<double> pseudogradient;
};

/// One synchronized ES step on this worker. Every worker derives all
/// perturbations from (master_seed, iteration), evaluates only the pairs it
/// owns, allgathers the deltas, and applies the identical update.
EsIterationResult EsIteration(OptState& opt, const FitnessFn& fitness, const EsConfig& config,
                              const OptimizerConfig& optimizer, WorkerPool& pool,
                              std::uint64_t master_seed, std::uint64_t iteration);

}  // namespace mctses
