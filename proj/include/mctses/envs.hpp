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
#include <vector>

#include "mctses/observation.hpp"
#include "mctses/rng.hpp"

namespace mctses {

// Grid moves shared by navigation and Sokoban. Navigation uses (x, y) with
// "up" meaning y + 1; Sokoban uses text (row, col) with "up" meaning row - 1.
enum Move : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr int kNumMoves = 4;

// ---------------------------------------------------------------------------
// Navigation

struct NavConfig {
  int grid = 10;
  int num_targets = 20;
  int horizon = 50;
};

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct NavState {
  int grid = 10;
  int horizon = 50;
  Cell agent;
  std::vector<Cell> targets;
  std::vector<std::uint8_t> reached;
  int steps_remaining = 0;

  bool terminal() const { return steps_remaining <= 0; }
  friend bool operator==(const NavState&, const NavState&) = default;
};

void ValidateNavConfig(const NavConfig& config);
NavState NavReset(const NavConfig& config, std::uint64_t seed);
Transition<NavState> NavStep(const NavState& state, int action);
Observation NavObserve(const NavState& state);

// ---------------------------------------------------------------------------
// Traveling salesman

struct TspConfig {
  int num_cities = 20;
};

struct TspState {
  Matrix cities;  // n x 2 in [0,1]^2
  std::vector<int> visit_order;
  std::vector<std::uint8_t> visited;

  int size() const { return static_cast<int>(cities.rows()); }
  bool terminal() const { return static_cast<int>(visit_order.size()) == size(); }
  friend bool operator==(const TspState& a, const TspState& b) {
    return a.cities == b.cities && a.visit_order == b.visit_order &&
           a.visited == b.visited;
  }
};

void ValidateTspConfig(const TspConfig& config);
TspState TspReset(const TspConfig& config, std::uint64_t seed);
TspState TspFromCities(Matrix cities);
Transition<TspState> TspStep(const TspState& state, int action);
Observation TspObserve(const TspState& state);
// Closed tour length for a visiting order over `cities`.
double TourLength(const Matrix& cities, const std::vector<int>& order);

// ---------------------------------------------------------------------------
// Subset selection: vertex k-center (VKCP) and maximum diversity (MDP)

enum class SubsetObjective { kKCenter, kMaxDiversity };

struct SubsetConfig {
  SubsetObjective objective = SubsetObjective::kKCenter;
  int num_points = 40;
  int k = 20;
};

struct SubsetState {
  SubsetObjective objective = SubsetObjective::kKCenter;
  Matrix points;  // n x 2
  std::vector<std::uint8_t> selected;
  int k = 0;
  int num_selected = 0;

  int size() const { return static_cast<int>(points.rows()); }
  bool terminal() const { return num_selected == k; }
  friend bool operator==(const SubsetState& a, const SubsetState& b) {
    return a.objective == b.objective && a.points == b.points &&
           a.selected == b.selected && a.k == b.k;
  }
};

void ValidateSubsetConfig(const SubsetConfig& config);
SubsetState SubsetReset(const SubsetConfig& config, std::uint64_t seed);
SubsetState SubsetFromPoints(SubsetObjective objective, Matrix points, int k);
Transition<SubsetState> SubsetStep(const SubsetState& state, int action);
Observation SubsetObserve(const SubsetState& state);
// -max_i min_{j in S} d(x_i, x_j)
double KCenterScore(const Matrix& points, const std::vector<std::uint8_t>& selected);
// min_{i != j in S} d(x_i, x_j)
double MaxDiversityScore(const Matrix& points, const std::vector<std::uint8_t>& selected);

// ---------------------------------------------------------------------------
// One-step deterministic bandit. Not one of the benchmarks; used to check the
// planner against exhaustively known action values.

struct BanditConfig {
  std::vector<double> rewards;
};

struct BanditState {
  std::vector<double> rewards;
  bool done = false;

  bool terminal() const { return done; }
  friend bool operator==(const BanditState&, const BanditState&) = default;
};

void ValidateBanditConfig(const BanditConfig& config);
BanditState BanditReset(const BanditConfig& config);
Transition<BanditState> BanditStep(const BanditState& state, int action);
Observation BanditObserve(const BanditState& state);

}  // namespace mctses
