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

#include "mctses/env.hpp"

#include <cmath>
#include <string>
#include <type_traits>

#include "mctses/error.hpp"

namespace mctses {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <typename S>
StepResult Wrap(Transition<S> t) {
  return StepResult{t.reward, t.discount, State(std::move(t.next))};
}

}  // namespace

std::string EnvSpec::name() const {
  return std::visit(Overloaded{
                        [](const NavConfig&) { return std::string("navigation"); },
                        [](const SokobanConfig&) { return std::string("sokoban"); },
                        [](const TspConfig&) { return std::string("tsp"); },
                        [](const SubsetConfig& c) {
                          return std::string(c.objective == SubsetObjective::kKCenter
                                                 ? "vkcp"
                                                 : "mdp");
                        },
                        [](const BanditConfig&) { return std::string("bandit"); },
                    },
                    config);
}

int EnvSpec::horizon() const {
  return std::visit(Overloaded{
                        [](const NavConfig& c) { return c.horizon; },
                        [](const SokobanConfig& c) { return c.horizon; },
                        [](const TspConfig& c) { return c.num_cities; },
                        [](const SubsetConfig& c) { return c.k; },
                        [](const BanditConfig&) { return 1; },
                    },
                    config);
}

EnvSpec MakeNavigation(NavConfig config) { return EnvSpec{config}; }
EnvSpec MakeSokoban(SokobanConfig config) { return EnvSpec{std::move(config)}; }
EnvSpec MakeTsp(int num_cities) { return EnvSpec{TspConfig{num_cities}}; }
EnvSpec MakeKCenter(int num_points, int k) {
  return EnvSpec{SubsetConfig{SubsetObjective::kKCenter, num_points, k}};
}
EnvSpec MakeMaxDiversity(int num_points, int k) {
  return EnvSpec{SubsetConfig{SubsetObjective::kMaxDiversity, num_points, k}};
}
EnvSpec MakeBandit(std::vector<double> rewards) {
  return EnvSpec{BanditConfig{std::move(rewards)}};
}

void Validate(const EnvSpec& spec) {
  std::visit(Overloaded{
                 [](const NavConfig& c) { ValidateNavConfig(c); },
                 [](const SokobanConfig& c) { ValidateSokobanConfig(c); },
                 [](const TspConfig& c) { ValidateTspConfig(c); },
                 [](const SubsetConfig& c) { ValidateSubsetConfig(c); },
                 [](const BanditConfig& c) { ValidateBanditConfig(c); },
             },
             spec.config);
}

State Reset(const EnvSpec& spec, std::uint64_t seed) {
  return std::visit(Overloaded{
                        [&](const NavConfig& c) { return State(NavReset(c, seed)); },
                        [&](const SokobanConfig& c) { return State(SokobanReset(c, seed)); },
                        [&](const TspConfig& c) { return State(TspReset(c, seed)); },
                        [&](const SubsetConfig& c) { return State(SubsetReset(c, seed)); },
                        [&](const BanditConfig& c) { return State(BanditReset(c)); },
                    },
                    spec.config);
}

StepResult Step(const State& state, int action) {
  return std::visit(Overloaded{
                        [&](const NavState& s) { return Wrap(NavStep(s, action)); },
                        [&](const SokobanState& s) { return Wrap(SokobanStep(s, action)); },
                        [&](const TspState& s) { return Wrap(TspStep(s, action)); },
                        [&](const SubsetState& s) { return Wrap(SubsetStep(s, action)); },
                        [&](const BanditState& s) { return Wrap(BanditStep(s, action)); },
                    },
                    state);
}

Observation Observe(const State& state) {
  return std::visit(Overloaded{
                        [](const NavState& s) { return NavObserve(s); },
                        [](const SokobanState& s) { return SokobanObserve(s); },
                        [](const TspState& s) { return TspObserve(s); },
                        [](const SubsetState& s) { return SubsetObserve(s); },
                        [](const BanditState& s) { return BanditObserve(s); },
                    },
                    state);
}

bool IsTerminal(const State& state) {
  return std::visit([](const auto& s) { return s.terminal(); }, state);
}

std::vector<std::uint8_t> LegalMask(const State& state) {
  return std::visit(
      Overloaded{
          [](const NavState& s) {
            return std::vector<std::uint8_t>(kNumMoves, s.terminal() ? 0 : 1);
          },
          [](const SokobanState& s) {
            return std::vector<std::uint8_t>(kNumMoves, s.terminal() ? 0 : 1);
          },
          [](const TspState& s) {
            std::vector<std::uint8_t> m(s.size());
            for (int i = 0; i < s.size(); ++i) m[i] = s.visited[i] ? 0 : 1;
            return m;
          },
          [](const SubsetState& s) {
            std::vector<std::uint8_t> m(s.size());
            for (int i = 0; i < s.size(); ++i) {
              m[i] = (s.selected[i] || s.terminal()) ? 0 : 1;
            }
            return m;
          },
          [](const BanditState& s) {
            return std::vector<std::uint8_t>(s.rewards.size(), s.terminal() ? 0 : 1);
          },
      },
      state);
}

std::vector<double> ComputeReturns(const std::vector<double>& rewards,
                                   const std::vector<double>& discounts) {
  if (rewards.empty()) throw ContractError("compute_returns: empty episode");
  if (rewards.size() != discounts.size()) {
    throw ContractError("compute_returns: rewards and discounts differ in length");
  }
  if (discounts.back() != 0.0) {
    throw ContractError("compute_returns: final discount must be 0");
  }
  std::vector<double> returns(rewards.size());
  double next = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    next = rewards[t] + discounts[t] * next;
    returns[t] = next;
  }
  return returns;
}

EpisodeRecord Rollout(const EnvSpec& spec, const Agent& agent, std::uint64_t seed) {
  State state = Reset(spec, DeriveSeed(seed, {0}));
  Rng agent_rng(DeriveSeed(seed, {1}));
  const int cap = spec.horizon();
  EpisodeRecord record;
  while (!IsTerminal(state)) {
    if (static_cast<int>(record.steps.size()) >= cap) {
      throw ContractError("rollout: episode exceeded horizon " + std::to_string(cap));
    }
    EpisodeStep step;
    step.observation = Observe(state);
    Decision decision = agent(state, agent_rng);
    const int n = step.observation.num_actions();
    if (decision.action < 0 || decision.action >= n ||
        !step.observation.legal[decision.action]) {
      throw ContractError("rollout: agent chose illegal action " +
                          std::to_string(decision.action));
    }
    if (decision.weights.empty()) {
      // Agents without a search report a one-hot weight on their action.
      decision.weights.assign(n, 0.0);
      decision.weights[decision.action] = 1.0;
    }
    StepResult result = Step(state, decision.action);
    step.action = decision.action;
    step.weights = std::move(decision.weights);
    step.reward = result.reward;
    step.discount = result.discount;
    record.steps.push_back(std::move(step));
    state = std::move(result.next);
  }
  if (record.steps.empty()) {
    // Degenerate instance that starts terminal (e.g. VKCP with k = 0 is
    // rejected by validation, so this only guards custom environments).
    return record;
  }
  std::vector<double> rewards, discounts;
  for (const auto& s : record.steps) {
    rewards.push_back(s.reward);
    discounts.push_back(s.discount);
  }
  record.returns = ComputeReturns(rewards, discounts);
  record.score = record.returns.front();
  return record;
}

}  // namespace mctses
