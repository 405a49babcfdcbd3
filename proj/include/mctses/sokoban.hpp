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

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mctses/observation.hpp"
#include "mctses/rng.hpp"

namespace mctses {

inline constexpr int kSokobanSize = 10;
inline constexpr int kSokobanTiles = kSokobanSize * kSokobanSize;

enum TileFlag : std::uint8_t { kWall = 1, kGoal = 2, kBox = 4 };

/// One parsed level. Tiles are row-major in text order; the agent is kept
/// separately.
struct SokobanLevel {
  std::string id;
  std::array<std::uint8_t, kSokobanTiles> tiles{};
  int agent_row = 0;
  int agent_col = 0;

  int count(std::uint8_t flag) const;
  friend bool operator==(const SokobanLevel&, const SokobanLevel&) = default;
};

using LevelSet = std::vector<SokobanLevel>;

// Boxoban text format: "; <id>" then 10 rows of 10 characters
// ('#' wall, ' ' floor, '@' agent, '$' box, '.' goal, '*' box on goal,
// '+' agent on goal). Blank lines separate levels; CRLF is accepted.
LevelSet ParseBoxoban(std::string_view text);
LevelSet LoadBoxoban(const std::string& path);
std::string RenderBoxoban(const LevelSet& levels);
std::string RenderLevelRows(const SokobanLevel& level);

// The eight symmetries of the square. Index k applies an optional transpose
// (k >= 4) followed by k % 4 clockwise quarter turns.
inline constexpr int kNumSymmetries = 8;
SokobanLevel ApplySymmetry(const SokobanLevel& level, int symmetry);
int InverseSymmetry(int symmetry);
int ComposeSymmetry(int outer, int inner);  // outer after inner
// Image of a move under the symmetry, so that playing MapMove(s, a) on the
// transformed level mirrors playing a on the original.
int MapMove(int symmetry, int move);

struct SokobanConfig {
  std::shared_ptr<const LevelSet> levels;
  int horizon = 50;
  bool augment = true;
  // Emit the change in covered goals each step instead of a terminal count.
  bool incremental_reward = false;
};

struct SokobanState {
  SokobanLevel level;
  int horizon = 50;
  int steps_remaining = 0;
  bool incremental_reward = false;

  bool terminal() const { return steps_remaining <= 0; }
  int covered_goals() const;
  friend bool operator==(const SokobanState&, const SokobanState&) = default;
};

void ValidateSokobanConfig(const SokobanConfig& config);
SokobanState SokobanFromLevel(const SokobanLevel& level, int horizon,
                              bool incremental_reward = false);
// Picks a level uniformly, then a symmetry uniformly (if augment is set).
SokobanState SokobanReset(const SokobanConfig& config, std::uint64_t seed);
Transition<SokobanState> SokobanStep(const SokobanState& state, int action);
Observation SokobanObserve(const SokobanState& state);

}  // namespace mctses
