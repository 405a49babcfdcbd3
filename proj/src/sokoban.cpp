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

#include "mctses/sokoban.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "mctses/error.hpp"

namespace mctses {
namespace {

constexpr int kN = kSokobanSize;

struct Point {
  int r;
  int c;
  friend bool operator==(const Point&, const Point&) = default;
};

constexpr Point kMoveDelta[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};

Point TransformPoint(int symmetry, Point p) {
  if (symmetry >= 4) p = {p.c, p.r};
  for (int i = 0; i < symmetry % 4; ++i) p = {p.c, kN - 1 - p.r};
  return p;
}

Point TransformVector(int symmetry, Point d) {
  if (symmetry >= 4) d = {d.c, d.r};
  for (int i = 0; i < symmetry % 4; ++i) d = {d.c, -d.r};
  return d;
}

void CheckSymmetry(int symmetry) {
  if (symmetry < 0 || symmetry >= kNumSymmetries) {
    throw ContractError("sokoban: symmetry index out of range");
  }
}

bool InBounds(int r, int c) { return r >= 0 && r < kN && c >= 0 && c < kN; }

char TileChar(std::uint8_t tile, bool agent) {
  if (tile & kWall) return '#';
  const bool goal = tile & kGoal;
  if (agent) return goal ? '+' : '@';
  if (tile & kBox) return goal ? '*' : '$';
  return goal ? '.' : ' ';
}

}  // namespace

int SokobanLevel::count(std::uint8_t flag) const {
  int n = 0;
  for (auto t : tiles) n += (t & flag) ? 1 : 0;
  return n;
}

LevelSet ParseBoxoban(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string line(text.substr(start, end - start));
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
      start = end + 1;
    }
  }

  LevelSet levels;
  std::size_t i = 0;
  while (i < lines.size()) {
    const int lineno = static_cast<int>(i) + 1;
    const std::string& line = lines[i];
    if (line.empty()) {
      ++i;
      continue;
    }
    if (line[0] != ';') throw ParseError("expected '; <id>' level header", lineno);
    SokobanLevel level;
    level.id = line.substr(1);
    if (!level.id.empty() && level.id[0] == ' ') level.id.erase(0, 1);
    int agents = 0;
    for (int r = 0; r < kN; ++r) {
      const std::size_t li = i + 1 + r;
      const int rowno = static_cast<int>(li) + 1;
      if (li >= lines.size() || lines[li].empty() || lines[li][0] == ';') {
        throw ParseError("level '" + level.id + "' has " + std::to_string(r) +
                             " rows, expected " + std::to_string(kN),
                         rowno);
      }
      const std::string& row = lines[li];
      if (static_cast<int>(row.size()) != kN) {
        throw ParseError("row length " + std::to_string(row.size()) + ", expected " +
                             std::to_string(kN),
                         rowno);
      }
      for (int c = 0; c < kN; ++c) {
        std::uint8_t& tile = level.tiles[r * kN + c];
        switch (row[c]) {
          case '#': tile = kWall; break;
          case ' ': tile = 0; break;
          case '.': tile = kGoal; break;
          case '$': tile = kBox; break;
          case '*': tile = kBox | kGoal; break;
          case '@':
          case '+':
            tile = row[c] == '+' ? kGoal : 0;
            level.agent_row = r;
            level.agent_col = c;
            ++agents;
            break;
          default:
            throw ParseError(std::string("unknown character '") + row[c] + "'", rowno);
        }
      }
    }
    if (agents != 1) {
      throw ParseError("level '" + level.id + "' has " + std::to_string(agents) +
                           " agents, expected 1",
                       lineno);
    }
    if (level.count(kBox) != level.count(kGoal)) {
      throw ParseError("level '" + level.id + "' has unequal box and goal counts", lineno);
    }
    levels.push_back(std::move(level));
    i += 1 + kN;
  }
  return levels;
}

LevelSet LoadBoxoban(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open level file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseBoxoban(buf.str());
}

std::string RenderLevelRows(const SokobanLevel& level) {
  std::string out;
  out.reserve(kN * (kN + 1));
  for (int r = 0; r < kN; ++r) {
    for (int c = 0; c < kN; ++c) {
      const bool agent = r == level.agent_row && c == level.agent_col;
      out.push_back(TileChar(level.tiles[r * kN + c], agent));
    }
    out.push_back('\n');
  }
  return out;
}

std::string RenderBoxoban(const LevelSet& levels) {
  std::string out;
  for (const auto& level : levels) {
    out += "; " + level.id + "\n";
    out += RenderLevelRows(level);
    out += "\n";
  }
  return out;
}

SokobanLevel ApplySymmetry(const SokobanLevel& level, int symmetry) {
  CheckSymmetry(symmetry);
  SokobanLevel out;
  out.id = level.id;
  for (int r = 0; r < kN; ++r) {
    for (int c = 0; c < kN; ++c) {
      const Point p = TransformPoint(symmetry, {r, c});
      out.tiles[p.r * kN + p.c] = level.tiles[r * kN + c];
    }
  }
  const Point a = TransformPoint(symmetry, {level.agent_row, level.agent_col});
  out.agent_row = a.r;
  out.agent_col = a.c;
  return out;
}

int ComposeSymmetry(int outer, int inner) {
  CheckSymmetry(outer);
  CheckSymmetry(inner);
  // Three non-collinear probes pin down a map of the square.
  constexpr Point probes[] = {{0, 0}, {0, 1}, {2, 0}};
  for (int k = 0; k < kNumSymmetries; ++k) {
    bool match = true;
    for (Point p : probes) {
      if (!(TransformPoint(k, p) == TransformPoint(outer, TransformPoint(inner, p)))) {
        match = false;
        break;
      }
    }
    if (match) return k;
  }
  throw ContractError("sokoban: symmetry group is not closed");  // unreachable
}

int InverseSymmetry(int symmetry) {
  for (int k = 0; k < kNumSymmetries; ++k) {
    if (ComposeSymmetry(k, symmetry) == 0) return k;
  }
  throw ContractError("sokoban: symmetry has no inverse");  // unreachable
}

int MapMove(int symmetry, int move) {
  CheckSymmetry(symmetry);
  if (move < 0 || move >= 4) throw ContractError("sokoban: move out of range");
  const Point d = TransformVector(symmetry, kMoveDelta[move]);
  for (int m = 0; m < 4; ++m) {
    if (kMoveDelta[m] == d) return m;
  }
  throw ContractError("sokoban: move image not found");  // unreachable
}

int SokobanState::covered_goals() const {
  int n = 0;
  for (auto t : level.tiles) n += ((t & kBox) && (t & kGoal)) ? 1 : 0;
  return n;
}

void ValidateSokobanConfig(const SokobanConfig& config) {
  if (!config.levels || config.levels->empty()) {
    throw ConfigError("sokoban: no levels loaded");
  }
  if (config.horizon < 1) throw ConfigError("sokoban: horizon must be >= 1");
}

SokobanState SokobanFromLevel(const SokobanLevel& level, int horizon,
                              bool incremental_reward) {
  SokobanState s;
  s.level = level;
  s.horizon = horizon;
  s.steps_remaining = horizon;
  s.incremental_reward = incremental_reward;
  return s;
}

SokobanState SokobanReset(const SokobanConfig& config, std::uint64_t seed) {
  ValidateSokobanConfig(config);
  Rng rng(seed);
  const auto& levels = *config.levels;
  const auto index = rng.Below(levels.size());
  const int symmetry = config.augment ? static_cast<int>(rng.Below(kNumSymmetries)) : 0;
  return SokobanFromLevel(ApplySymmetry(levels[index], symmetry), config.horizon,
                          config.incremental_reward);
}

Transition<SokobanState> SokobanStep(const SokobanState& state, int action) {
  if (state.terminal()) throw ContractError("sokoban: step on a terminal state");
  if (action < 0 || action >= 4) throw ContractError("sokoban: action out of range");
  Transition<SokobanState> out{0.0, 1.0, state};
  SokobanLevel& lv = out.next.level;
  const Point d = kMoveDelta[action];
  const int tr = lv.agent_row + d.r;
  const int tc = lv.agent_col + d.c;
  if (InBounds(tr, tc) && !(lv.tiles[tr * kN + tc] & kWall)) {
    std::uint8_t& target = lv.tiles[tr * kN + tc];
    if (target & kBox) {
      const int br = tr + d.r;
      const int bc = tc + d.c;
      if (InBounds(br, bc) && !(lv.tiles[br * kN + bc] & (kWall | kBox))) {
        target &= static_cast<std::uint8_t>(~kBox);
        lv.tiles[br * kN + bc] |= kBox;
        lv.agent_row = tr;
        lv.agent_col = tc;
      }
    } else {
      lv.agent_row = tr;
      lv.agent_col = tc;
    }
  }
  --out.next.steps_remaining;
  const bool done = out.next.steps_remaining == 0;
  if (state.incremental_reward) {
    out.reward = out.next.covered_goals() - state.covered_goals();
    // The first step also pays for goals covered at the start, so the
    // return matches the terminal-count convention.
    if (state.steps_remaining == state.horizon) out.reward += state.covered_goals();
  } else if (done) {
    out.reward = out.next.covered_goals();
  }
  out.discount = done ? 0.0 : 1.0;
  return out;
}

Observation SokobanObserve(const SokobanState& state) {
  Observation obs;
  obs.features.resize(kSokobanTiles, 7);
  const double scale = 1.0 / (kN - 1);
  const double time = static_cast<double>(state.steps_remaining) / state.horizon;
  for (int r = 0; r < kN; ++r) {
    for (int c = 0; c < kN; ++c) {
      const int i = r * kN + c;
      const std::uint8_t t = state.level.tiles[i];
      obs.features(i, 0) = r * scale;
      obs.features(i, 1) = c * scale;
      obs.features(i, 2) = (t & kWall) ? 1.0 : 0.0;
      obs.features(i, 3) = (t & kGoal) ? 1.0 : 0.0;
      obs.features(i, 4) = (t & kBox) ? 1.0 : 0.0;
      obs.features(i, 5) =
          (r == state.level.agent_row && c == state.level.agent_col) ? 1.0 : 0.0;
      obs.features(i, 6) = time;
    }
  }
  obs.mode = ActionMode::kFixedActions;
  obs.num_fixed_actions = 4;
  obs.legal.assign(4, state.terminal() ? 0 : 1);
  return obs;
}

}  // namespace mctses
