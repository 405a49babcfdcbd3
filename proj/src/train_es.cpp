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

#include "mctses/train_es.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mctses/error.hpp"

namespace mctses {

void ValidateEsConfig(const EsConfig& config) {
  if (!(config.sigma > 0.0)) throw ConfigError("es: sigma must be > 0");
  if (config.population < 1) throw ConfigError("es: population must be >= 1");
  if (config.episodes_per_eval < 1) throw ConfigError("es: episodes_per_eval must be >= 1");
  if (!(config.lr >= 0.0)) throw ConfigError("es: lr must be >= 0");
}

double Fitness(const std::vector<double>& x, const NetDims& dims, const EnvSpec& env,
               const SearchConfig& search, int episodes, std::uint64_t seed) {
  const Agent agent = MakeSearchAgent(Unflatten(x, dims), search);
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    total += Rollout(env, agent, DeriveSeed(seed, {static_cast<std::uint64_t>(e)})).score;
  }
  return total / episodes;
}

FitnessFn MakeEpisodeFitness(const NetDims& dims, const EnvSpec& env,
                             const SearchConfig& search, int episodes) {
  return [dims, env, search, episodes](const std::vector<double>& x, std::uint64_t seed) {
    return Fitness(x, dims, env, search, episodes, seed);
  };
}

double EsDelta(const std::vector<double>& x, const std::vector<double>& z, double sigma,
               const FitnessFn& fitness, std::uint64_t seed) {
  if (z.size() != x.size()) throw ContractError("es_delta: z has the wrong dimension");
  std::vector<double> plus(x.size()), minus(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    plus[i] = x[i] + sigma * z[i];
    minus[i] = x[i] - sigma * z[i];
  }
  const double f_plus = fitness(plus, seed);
  const double f_minus = fitness(minus, seed);
  if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
    throw ContractError("es_delta: non-finite fitness");
  }
  return f_plus - f_minus;
}

std::vector<double> Pseudogradient(const std::vector<double>& deltas,
                                   const std::vector<std::vector<double>>& zs, double sigma) {
  if (deltas.size() != zs.size() || deltas.empty()) {
    throw ContractError("pseudogradient: need one perturbation per delta");
  }
  const std::size_t dim = zs.front().size();
  std::vector<double> g(dim, 0.0);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (zs[i].size() != dim) throw ContractError("pseudogradient: ragged perturbations");
    for (std::size_t k = 0; k < dim; ++k) g[k] += deltas[i] * zs[i][k];
  }
  const double scale = 1.0 / (2.0 * sigma * static_cast<double>(deltas.size()));
  for (double& v : g) v *= scale;
  return g;
}

std::vector<double> Perturbation(std::uint64_t master_seed, std::uint64_t iteration, int pair,
                                 std::size_t dim) {
  Rng rng(DeriveSeed(master_seed, {iteration, static_cast<std::uint64_t>(pair), 0}));
  std::vector<double> z(dim);
  for (double& v : z) v = rng.Normal();
  return z;
}

std::uint64_t EvalSeed(std::uint64_t master_seed, std::uint64_t iteration, int pair) {
  return DeriveSeed(master_seed, {iteration, static_cast<std::uint64_t>(pair), 1});
}

std::vector<double> CenteredRanks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  if (n < 2) return ranks;
  for (std::size_t r = 0; r < n; ++r) {
    ranks[order[r]] = static_cast<double>(r) / static_cast<double>(n - 1) - 0.5;
  }
  return ranks;
}

EsIterationResult EsIteration(OptState& opt, const FitnessFn& fitness, const EsConfig& config,
                              const OptimizerConfig& optimizer, WorkerPool& pool,
                              std::uint64_t master_seed, std::uint64_t iteration) {
  ValidateEsConfig(config);
  const std::vector<double>& x = GetParameters(opt);
  const std::size_t dim = x.size();

  std::vector<WorkerMsg> mine;
  for (int i = 0; i < config.population; ++i) {
    if (OwnerOf(i, pool.size()) != pool.rank()) continue;
    const std::vector<double> z = Perturbation(master_seed, iteration, i, dim);
    const double delta = EsDelta(x, z, config.sigma, fitness, EvalSeed(master_seed, iteration, i));
    mine.push_back({iteration, static_cast<std::uint32_t>(i), delta});
  }

  EsIterationResult result;
  result.deltas = pool.Allgather(iteration, mine, config.population);
  const std::vector<double> weights =
      config.centered_ranks ? CenteredRanks(result.deltas) : result.deltas;

  std::vector<std::vector<double>> zs;
  zs.reserve(config.population);
  for (int i = 0; i < config.population; ++i) {
    zs.push_back(Perturbation(master_seed, iteration, i, dim));
  }
  result.pseudogradient = Pseudogradient(weights, zs, config.sigma);

  // Optimizers minimize; ascend on fitness by descending on -g.
  std::vector<double> descent(dim);
  for (std::size_t k = 0; k < dim; ++k) descent[k] = -result.pseudogradient[k];
  opt = UpdateState(std::move(opt), descent, config.lr, optimizer);
  return result;
}

}  // namespace mctses
