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

#include "mctses/envs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mctses/error.hpp"

namespace mctses {
namespace {

double Distance(const Matrix& pts, int i, int j) {
  const double dx = pts(i, 0) - pts(j, 0);
  const double dy = pts(i, 1) - pts(j, 1);
  return std::sqrt(dx * dx + dy * dy);
}

Matrix UniformPoints(int n, Rng& rng) {
  Matrix pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = rng.Uniform();
    pts(i, 1) = rng.Uniform();
  }
  return pts;
}

void CheckAction(int action, int num_actions, const char* env) {
  if (action < 0 || action >= num_actions) {
    throw ContractError(std::string(env) + ": action " + std::to_string(action) +
                        " out of range [0, " + std::to_string(num_actions) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Navigation

void ValidateNavConfig(const NavConfig& config) {
  if (config.grid < 2) throw ConfigError("navigation: grid must be >= 2");
  if (config.num_targets < 0) throw ConfigError("navigation: num_targets must be >= 0");
  if (config.num_targets + 1 > config.grid * config.grid) {
    throw ConfigError("navigation: too many targets for the grid");
  }
  if (config.horizon < 1) throw ConfigError("navigation: horizon must be >= 1");
}

NavState NavReset(const NavConfig& config, std::uint64_t seed) {
  ValidateNavConfig(config);
  Rng rng(seed);
  const int cells = config.grid * config.grid;
  std::vector<int> order(cells);
  std::iota(order.begin(), order.end(), 0);
  // Partial Fisher-Yates: first num_targets + 1 entries are distinct tiles.
  for (int i = 0; i <= config.num_targets; ++i) {
    const int j = i + static_cast<int>(rng.Below(cells - i));
    std::swap(order[i], order[j]);
  }
  NavState s;
  s.grid = config.grid;
  s.horizon = config.horizon;
  s.steps_remaining = config.horizon;
  s.agent = {order[0] % config.grid, order[0] / config.grid};
  for (int i = 1; i <= config.num_targets; ++i) {
    s.targets.push_back({order[i] % config.grid, order[i] / config.grid});
  }
  s.reached.assign(s.targets.size(), 0);
  return s;
}

Transition<NavState> NavStep(const NavState& state, int action) {
  if (state.terminal()) throw ContractError("navigation: step on a terminal state");
  CheckAction(action, kNumMoves, "navigation");
  Transition<NavState> out{0.0, 1.0, state};
  NavState& s = out.next;
  switch (action) {
    case kUp: s.agent.y = std::min(s.agent.y + 1, s.grid - 1); break;
    case kDown: s.agent.y = std::max(s.agent.y - 1, 0); break;
    case kLeft: s.agent.x = std::max(s.agent.x - 1, 0); break;
    case kRight: s.agent.x = std::min(s.agent.x + 1, s.grid - 1); break;
  }
  for (std::size_t i = 0; i < s.targets.size(); ++i) {
    if (!s.reached[i] && s.targets[i] == s.agent) {
      s.reached[i] = 1;
      out.reward = 1.0;
    }
  }
  --s.steps_remaining;
  out.discount = s.steps_remaining == 0 ? 0.0 : 1.0;
  return out;
}

Observation NavObserve(const NavState& state) {
  Observation obs;
  const double scale = 1.0 / (state.grid - 1);
  const int n = static_cast<int>(state.targets.size());
  obs.features.resize(n, 6);
  for (int i = 0; i < n; ++i) {
    obs.features(i, 0) = state.targets[i].x * scale;
    obs.features(i, 1) = state.targets[i].y * scale;
    obs.features(i, 2) = state.agent.x * scale;
    obs.features(i, 3) = state.agent.y * scale;
    obs.features(i, 4) = state.reached[i] ? 1.0 : 0.0;
    obs.features(i, 5) = static_cast<double>(state.steps_remaining) / state.horizon;
  }
  obs.mode = ActionMode::kFixedActions;
  obs.num_fixed_actions = kNumMoves;
  obs.legal.assign(kNumMoves, state.terminal() ? 0 : 1);
  return obs;
}

// ---------------------------------------------------------------------------
// TSP

void ValidateTspConfig(const TspConfig& config) {
  if (config.num_cities < 1) throw ConfigError("tsp: num_cities must be >= 1");
}

TspState TspFromCities(Matrix cities) {
  if (cities.cols() != 2 || cities.rows() < 1) {
    throw ConfigError("tsp: cities must be an n x 2 matrix with n >= 1");
  }
  TspState s;
  s.visited.assign(cities.rows(), 0);
  s.cities = std::move(cities);
  return s;
}

TspState TspReset(const TspConfig& config, std::uint64_t seed) {
  ValidateTspConfig(config);
  Rng rng(seed);
  return TspFromCities(UniformPoints(config.num_cities, rng));
}

double TourLength(const Matrix& cities, const std::vector<int>& order) {
  const int n = static_cast<int>(order.size());
  double length = 0.0;
  for (int t = 0; t < n; ++t) length += Distance(cities, order[t], order[(t + 1) % n]);
  return length;
}

Transition<TspState> TspStep(const TspState& state, int action) {
  if (state.terminal()) throw ContractError("tsp: step on a terminal state");
  CheckAction(action, state.size(), "tsp");
  if (state.visited[action]) {
    throw ContractError("tsp: city " + std::to_string(action) + " already visited");
  }
  Transition<TspState> out{0.0, 1.0, state};
  out.next.visit_order.push_back(action);
  out.next.visited[action] = 1;
  if (out.next.terminal()) {
    out.reward = -TourLength(out.next.cities, out.next.visit_order);
    out.discount = 0.0;
  }
  return out;
}

Observation TspObserve(const TspState& state) {
  Observation obs;
  const int n = state.size();
  obs.features.resize(n, 5);
  const int initial = state.visit_order.empty() ? -1 : state.visit_order.front();
  const int current = state.visit_order.empty() ? -1 : state.visit_order.back();
  obs.legal.resize(n);
  for (int i = 0; i < n; ++i) {
    obs.features(i, 0) = state.cities(i, 0);
    obs.features(i, 1) = state.cities(i, 1);
    obs.features(i, 2) = state.visited[i] ? 1.0 : 0.0;
    obs.features(i, 3) = i == initial ? 1.0 : 0.0;
    obs.features(i, 4) = i == current ? 1.0 : 0.0;
    obs.legal[i] = state.visited[i] ? 0 : 1;
  }
  obs.mode = ActionMode::kSetIndexed;
  return obs;
}

// ---------------------------------------------------------------------------
// VKCP / MDP

void ValidateSubsetConfig(const SubsetConfig& config) {
  if (config.num_points < 1) throw ConfigError("subset: num_points must be >= 1");
  if (config.k < 1) throw ConfigError("subset: k must be >= 1");
  if (config.k > config.num_points) {
    throw ConfigError("subset: k = " + std::to_string(config.k) +
                      " exceeds n = " + std::to_string(config.num_points));
  }
  if (config.objective == SubsetObjective::kMaxDiversity && config.k < 2) {
    throw ConfigError("mdp: k must be >= 2 (score is a pairwise minimum)");
  }
}

SubsetState SubsetFromPoints(SubsetObjective objective, Matrix points, int k) {
  ValidateSubsetConfig({objective, static_cast<int>(points.rows()), k});
  if (points.cols() != 2) throw ConfigError("subset: points must be n x 2");
  SubsetState s;
  s.objective = objective;
  s.k = k;
  s.selected.assign(points.rows(), 0);
  s.points = std::move(points);
  return s;
}

SubsetState SubsetReset(const SubsetConfig& config, std::uint64_t seed) {
  ValidateSubsetConfig(config);
  Rng rng(seed);
  return SubsetFromPoints(config.objective, UniformPoints(config.num_points, rng),
                          config.k);
}

double KCenterScore(const Matrix& points, const std::vector<std::uint8_t>& selected) {
  double worst = 0.0;
  for (int i = 0; i < points.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int j = 0; j < points.rows(); ++j) {
      if (selected[j]) nearest = std::min(nearest, Distance(points, i, j));
    }
    worst = std::max(worst, nearest);
  }
  return -worst;
}

double MaxDiversityScore(const Matrix& points, const std::vector<std::uint8_t>& selected) {
  double closest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points.rows(); ++i) {
    if (!selected[i]) continue;
    for (int j = i + 1; j < points.rows(); ++j) {
      if (selected[j]) closest = std::min(closest, Distance(points, i, j));
    }
  }
  return closest;
}

Transition<SubsetState> SubsetStep(const SubsetState& state, int action) {
  if (state.terminal()) throw ContractError("subset: step on a terminal state");
  CheckAction(action, state.size(), "subset");
  if (state.selected[action]) {
    throw ContractError("subset: point " + std::to_string(action) + " already selected");
  }
  Transition<SubsetState> out{0.0, 1.0, state};
  out.next.selected[action] = 1;
  ++out.next.num_selected;
  if (out.next.terminal()) {
    out.reward = state.objective == SubsetObjective::kKCenter
                     ? KCenterScore(out.next.points, out.next.selected)
                     : MaxDiversityScore(out.next.points, out.next.selected);
    out.discount = 0.0;
  }
  return out;
}

Observation SubsetObserve(const SubsetState& state) {
  Observation obs;
  const int n = state.size();
  obs.features.resize(n, 3);
  obs.legal.resize(n);
  for (int i = 0; i < n; ++i) {
    obs.features(i, 0) = state.points(i, 0);
    obs.features(i, 1) = state.points(i, 1);
    obs.features(i, 2) = state.selected[i] ? 1.0 : 0.0;
    obs.legal[i] = (state.selected[i] || state.terminal()) ? 0 : 1;
  }
  obs.mode = ActionMode::kSetIndexed;
  return obs;
}

// ---------------------------------------------------------------------------
// Bandit

void ValidateBanditConfig(const BanditConfig& config) {
  if (config.rewards.empty()) throw ConfigError("bandit: needs at least one arm");
  for (double r : config.rewards) {
    if (!std::isfinite(r)) throw ConfigError("bandit: rewards must be finite");
  }
}

BanditState BanditReset(const BanditConfig& config) {
  ValidateBanditConfig(config);
  return BanditState{config.rewards, false};
}

Transition<BanditState> BanditStep(const BanditState& state, int action) {
  if (state.terminal()) throw ContractError("bandit: step on a terminal state");
  CheckAction(action, static_cast<int>(state.rewards.size()), "bandit");
  Transition<BanditState> out{state.rewards[action], 0.0, state};
  out.next.done = true;
  return out;
}

Observation BanditObserve(const BanditState& state) {
  Observation obs;
  const int k = static_cast<int>(state.rewards.size());
  obs.features.resize(k, 2);
  for (int i = 0; i < k; ++i) {
    obs.features(i, 0) = k > 1 ? static_cast<double>(i) / (k - 1) : 0.0;
    obs.features(i, 1) = 1.0;
  }
  obs.mode = ActionMode::kFixedActions;
  obs.num_fixed_actions = k;
  obs.legal.assign(k, state.terminal() ? 0 : 1);
  return obs;
}

}  // namespace mctses
