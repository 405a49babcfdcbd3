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
#include <string>
#include <variant>
#include <vector>

#include "mctses/envs.hpp"
#include "mctses/observation.hpp"
#include "mctses/rng.hpp"
#include "mctses/sokoban.hpp"

namespace mctses {

using EnvConfig =
    std::variant<NavConfig, SokobanConfig, TspConfig, SubsetConfig, BanditConfig>;
using State = std::variant<NavState, SokobanState, TspState, SubsetState, BanditState>;

/// Environment description: which problem and its size parameters.
struct EnvSpec {
  EnvConfig config;

  std::string name() const;
  // Hard step cap; every built-in episode ends within it.
  int horizon() const;
};

EnvSpec MakeNavigation(NavConfig config = {});
EnvSpec MakeSokoban(SokobanConfig config);
EnvSpec MakeTsp(int num_cities = 20);
EnvSpec MakeKCenter(int num_points = 40, int k = 20);
EnvSpec MakeMaxDiversity(int num_points = 40, int k = 20);
EnvSpec MakeBandit(std::vector<double> rewards);

// Throws ConfigError.
void Validate(const EnvSpec& spec);

struct StepResult {
  double reward = 0.0;
  double discount = 1.0;
  State next;
};

State Reset(const EnvSpec& spec, std::uint64_t seed);
// Throws ContractError on an illegal action or a terminal state.
StepResult Step(const State& state, int action);
Observation Observe(const State& state);
bool IsTerminal(const State& state);
std::vector<std::uint8_t> LegalMask(const State& state);

// ---------------------------------------------------------------------------
// Episodes

struct EpisodeStep {
  Observation observation;
  int action = 0;
  std::vector<double> weights;  // search root weights w_t
  double reward = 0.0;
  double discount = 1.0;
};

struct EpisodeRecord {
  std::vector<EpisodeStep> steps;
  std::vector<double> returns;
  double score = 0.0;
};

/// R_t = r_t + g_t * R_{t+1}; the last discount must be 0.
std::vector<double> ComputeReturns(const std::vector<double>& rewards,
                                   const std::vector<double>& discounts);

struct Decision {
  int action = 0;
  std::vector<double> weights;
};

using Agent = std::function<Decision(const State&, Rng&)>;

/// Runs one episode from Reset(spec, seed) to termination. The agent draws
/// from its own stream derived from `seed`.
EpisodeRecord Rollout(const EnvSpec& spec, const Agent& agent, std::uint64_t seed);

}  // namespace mctses
