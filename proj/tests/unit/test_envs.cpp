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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mctses/env.hpp"
#include "mctses/error.hpp"

using namespace mctses;

namespace {

// Plays uniformly random legal actions.
Agent RandomAgent() {
  return [](const State& s, Rng& rng) {
    const auto legal = LegalMask(s);
    std::vector<int> options;
    for (std::size_t a = 0; a < legal.size(); ++a) {
      if (legal[a]) options.push_back(static_cast<int>(a));
    }
    return Decision{options[rng.Below(options.size())], {}};
  };
}

NavState NavAt(Cell agent, std::vector<Cell> targets, int steps_remaining = 10) {
  NavState s;
  s.grid = 10;
  s.horizon = 50;
  s.agent = agent;
  s.targets = std::move(targets);
  s.reached.assign(s.targets.size(), 0);
  s.steps_remaining = steps_remaining;
  return s;
}

double Dist(const Matrix& p, int i, int j) {
  const double dx = p(i, 0) - p(j, 0), dy = p(i, 1) - p(j, 1);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

TEST_CASE("reset examples") {
  const State tsp = Reset(MakeTsp(3), 7);
  const auto& t = std::get<TspState>(tsp);
  CHECK(t.size() == 3);
  CHECK(t.visit_order.empty());
  for (int i = 0; i < 3; ++i) {
    for (int d = 0; d < 2; ++d) {
      CHECK(t.cities(i, d) >= 0.0);
      CHECK(t.cities(i, d) <= 1.0);
    }
    CHECK(t.visited[i] == 0);
  }
  const SubsetState v = std::get<SubsetState>(Reset(MakeKCenter(5, 5), 0));
  CHECK(v.size() == 5);
  CHECK(v.num_selected == 0);

  for (const EnvSpec& spec : {MakeNavigation(), MakeTsp(20), MakeKCenter(), MakeMaxDiversity()}) {
    CHECK(Reset(spec, 99) == Reset(spec, 99));
    CHECK_FALSE(Reset(spec, 99) == Reset(spec, 100));
  }
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(Validate(MakeTsp(0)), ConfigError);
  CHECK_THROWS_AS(Validate(MakeKCenter(5, 6)), ConfigError);
  CHECK_THROWS_AS(Validate(MakeKCenter(5, 0)), ConfigError);
  CHECK_THROWS_AS(Validate(MakeMaxDiversity(5, 1)), ConfigError);
  CHECK_THROWS_AS(Validate(MakeNavigation({10, 101, 50})), ConfigError);
  CHECK_THROWS_AS(Validate(MakeNavigation({10, 5, 0})), ConfigError);
  CHECK_THROWS_AS(Validate(MakeSokoban({})), ConfigError);
}

TEST_CASE("compute returns") {
  CHECK(ComputeReturns({1, 0, 2}, {1, 1, 0}) == std::vector<double>{3, 2, 2});
  CHECK(ComputeReturns({0, 0, 0}, {1, 1, 0}) == std::vector<double>{0, 0, 0});
  CHECK(ComputeReturns({5}, {0}) == std::vector<double>{5});
  CHECK_THROWS_AS(ComputeReturns({}, {}), ContractError);
  CHECK_THROWS_AS(ComputeReturns({1, 2}, {1}), ContractError);
  CHECK_THROWS_AS(ComputeReturns({1, 2}, {1, 1}), ContractError);
}

TEST_CASE("navigation rules") {
  SUBCASE("moving onto an unreached target pays 1") {
    const auto t = NavStep(NavAt({2, 2}, {{2, 3}}), kUp);
    CHECK(t.reward == 1.0);
    CHECK(t.discount == 1.0);
    CHECK(t.next.agent == Cell{2, 3});
    CHECK(t.next.reached[0] == 1);
    const auto again = NavStep(NavStep(t.next, kDown).next, kUp);
    CHECK(again.reward == 0.0);
  }
  SUBCASE("border clamp") {
    const auto t = NavStep(NavAt({0, 0}, {{5, 5}}), kLeft);
    CHECK(t.next.agent == Cell{0, 0});
    CHECK(t.reward == 0.0);
    CHECK(NavStep(NavAt({0, 0}, {{5, 5}}), kDown).next.agent == Cell{0, 0});
    CHECK(NavStep(NavAt({9, 9}, {{5, 5}}), kRight).next.agent == Cell{9, 9});
    CHECK(NavStep(NavAt({9, 9}, {{5, 5}}), kUp).next.agent == Cell{9, 9});
  }
  SUBCASE("last step ends the episode") {
    const auto t = NavStep(NavAt({1, 1}, {{5, 5}}, 1), kUp);
    CHECK(t.discount == 0.0);
    CHECK(IsTerminal(State(t.next)));
    CHECK_THROWS_AS(NavStep(t.next, kUp), ContractError);
  }
  SUBCASE("observation layout") {
    const auto obs = Observe(Reset(MakeNavigation(), 3));
    CHECK(obs.features.rows() == 20);
    CHECK(obs.features.cols() == 6);
    CHECK(obs.mode == ActionMode::kFixedActions);
    CHECK(obs.num_actions() == 4);
  }
  SUBCASE("no targets scores 0") {
    const auto ep = Rollout(MakeNavigation({10, 0, 20}), RandomAgent(), 5);
    CHECK(ep.score == 0.0);
    CHECK(ep.steps.size() == 20);
  }
  SUBCASE("reset places distinct tiles") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto s = std::get<NavState>(Reset(MakeNavigation(), seed));
      std::vector<int> tiles{s.agent.x * 10 + s.agent.y};
      for (const Cell& c : s.targets) tiles.push_back(c.x * 10 + c.y);
      std::sort(tiles.begin(), tiles.end());
      CHECK(std::adjacent_find(tiles.begin(), tiles.end()) == tiles.end());
    }
  }
}

TEST_CASE("tsp rules") {
  Matrix tri(3, 2);
  tri << 0, 0, 1, 0, 0, 1;
  const double perimeter = 2.0 + std::sqrt(2.0);
  const std::vector<std::vector<int>> orders = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                                {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& order : orders) {
    TspState s = TspFromCities(tri);
    double total = 0.0, last_discount = 1.0;
    for (int a : order) {
      auto t = TspStep(s, a);
      total += t.reward;
      last_discount = t.discount;
      s = t.next;
    }
    CHECK(std::abs(total + perimeter) <= 1e-12);
    CHECK(last_discount == 0.0);
  }
  TspState s = TspStep(TspFromCities(tri), 1).next;
  CHECK_THROWS_AS(TspStep(s, 1), ContractError);

  const auto obs = Observe(State(TspFromCities(tri)));
  CHECK(obs.features.cols() == 5);
  for (int i = 0; i < 3; ++i) {
    CHECK(obs.features(i, 2) == 0.0);
    CHECK(obs.features(i, 3) == 0.0);
    CHECK(obs.features(i, 4) == 0.0);
  }

  // Reversing a tour keeps its length.
  Rng rng(3);
  Matrix pts(7, 2);
  for (int i = 0; i < 7; ++i) pts.row(i) << rng.Uniform(), rng.Uniform();
  std::vector<int> order(7);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> rev(order.rbegin(), order.rend());
  CHECK(TourLength(pts, order) == doctest::Approx(TourLength(pts, rev)).epsilon(1e-14));
}

TEST_CASE("subset scores match brute force") {
  Matrix line(3, 2);
  line << 0, 0, 0.5, 0, 1, 0;
  double best = -1.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) best = std::max(best, Dist(line, i, j));
  }
  CHECK(best == 1.0);
  CHECK(MaxDiversityScore(line, {1, 0, 1}) == 1.0);

  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.Below(7));
    Matrix p(n, 2);
    for (int i = 0; i < n; ++i) p.row(i) << rng.Uniform(), rng.Uniform();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      std::vector<std::uint8_t> sel(n);
      for (int i = 0; i < n; ++i) sel[i] = (mask >> i) & 1u;
      double worst = 0.0;
      for (int i = 0; i < n; ++i) {
        double nearest = 1e300;
        for (int j = 0; j < n; ++j) {
          if (sel[j]) nearest = std::min(nearest, Dist(p, i, j));
        }
        worst = std::max(worst, nearest);
      }
      CHECK(KCenterScore(p, sel) == -worst);
      if (std::popcount(mask) >= 2) {
        double closest = 1e300;
        for (int i = 0; i < n; ++i) {
          for (int j = i + 1; j < n; ++j) {
            if (sel[i] && sel[j]) closest = std::min(closest, Dist(p, i, j));
          }
        }
        CHECK(MaxDiversityScore(p, sel) == closest);
      }
    }
  }
}

TEST_CASE("degenerate subset episodes") {
  const auto vk = Rollout(MakeKCenter(5, 5), RandomAgent(), 1);
  CHECK(vk.score == 0.0);
  const EnvSpec mdp = MakeMaxDiversity(6, 6);
  const auto ep = Rollout(mdp, RandomAgent(), 2);
  const Matrix pts = std::get<SubsetState>(Reset(mdp, DeriveSeed(2, {0}))).points;
  double closest = 1e300;
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) closest = std::min(closest, Dist(pts, i, j));
  }
  CHECK(ep.score == closest);
  CHECK_THROWS_AS(SubsetStep(SubsetStep(std::get<SubsetState>(Reset(mdp, 0)), 2).next, 2),
                  ContractError);
}

TEST_CASE("episode invariants across environments") {
  const EnvSpec specs[] = {MakeNavigation(), MakeTsp(8), MakeKCenter(10, 4),
                           MakeMaxDiversity(10, 4), MakeTsp(1)};
  for (const EnvSpec& spec : specs) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const EpisodeRecord ep = Rollout(spec, RandomAgent(), seed);
      CAPTURE(spec.name());
      CHECK(static_cast<int>(ep.steps.size()) <= spec.horizon());
      std::vector<double> r, g;
      for (const auto& st : ep.steps) {
        r.push_back(st.reward);
        g.push_back(st.discount);
        CHECK(st.observation.legal[st.action] == 1);
        CHECK(st.weights[st.action] == 1.0);
      }
      CHECK(ComputeReturns(r, g) == ep.returns);
      CHECK(ep.score == ep.returns[0]);

      const EpisodeRecord again = Rollout(spec, RandomAgent(), seed);
      CHECK(again.score == ep.score);

      const std::string name = spec.name();
      if (name == "navigation") {
        CHECK(ep.score >= 0.0);
        CHECK(ep.score <= 20.0);
      } else if (name == "tsp") {
        CHECK(ep.score <= 0.0);
        CHECK(ep.score >= -std::sqrt(2.0) * 8);
      } else if (name == "vkcp") {
        CHECK(ep.score <= 0.0);
        CHECK(ep.score >= -std::sqrt(2.0));
      } else if (name == "mdp") {
        CHECK(ep.score >= 0.0);
        CHECK(ep.score <= std::sqrt(2.0));
      }
    }
  }
}

TEST_CASE("rollout rejects an illegal agent") {
  const Agent bad = [](const State&, Rng&) { return Decision{0, {}}; };
  CHECK_THROWS_AS(Rollout(MakeTsp(4), bad, 0), ContractError);
}

TEST_CASE("bandit") {
  const auto t = BanditStep(BanditReset({{3, 1, 0, 2}}), 3);
  CHECK(t.reward == 2.0);
  CHECK(t.discount == 0.0);
  CHECK(t.next.terminal());
  const auto obs = Observe(Reset(MakeBandit({3, 1, 0, 2}), 0));
  CHECK(obs.num_actions() == 4);
  CHECK(obs.mode == ActionMode::kFixedActions);
}
