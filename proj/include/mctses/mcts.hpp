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
#include <string>
#include <vector>

#include "mctses/deepsets.hpp"
#include "mctses/env.hpp"
#include "mctses/rng.hpp"

namespace mctses {

struct SearchConfig {
  int budget = 8;           // simulations per decision (= expansions)
  int max_considered = 16;  // Gumbel top-m cap at the root
  double c_visit = 50.0;
  double c_scale = 1.0;
  bool record_backups = false;  // keep every backed-up return (tests)
};

void ValidateSearchConfig(const SearchConfig& config);

struct Edge {
  int visits = 0;
  double q = 0.0;
  double reward = 0.0;
  double discount = 1.0;
  int child = -1;
};

struct SearchNode {
  State state;
  bool terminal = false;
  double value = 0.0;
  std::vector<double> logits;  // masked prior logits
  std::vector<double> prior;
  std::vector<std::uint8_t> legal;
  std::vector<Edge> edges;
};

struct PathEdge {
  int node = 0;
  int action = 0;
};

struct SelectionPath {
  std::vector<PathEdge> edges;
  // False when the walk ended on an already expanded terminal node.
  bool needs_expansion = true;
};

struct BackupEvent {
  int node = 0;
  int action = 0;
  double value = 0.0;
};

/// Flat arena of nodes; node 0 is the root and children are addressed
/// through their parent's edge list.
struct SearchTree {
  std::vector<SearchNode> nodes;
  std::vector<double> root_gumbel;
  std::vector<int> schedule;  // considered visit count per simulation index
  int num_considered = 0;
  int simulations = 0;
  // Simulations that ended on an already expanded terminal node; they back
  // up 0 and create no node, so nodes.size() == 1 + budget - terminal_revisits.
  int terminal_revisits = 0;
  bool record_backups = false;
  std::vector<BackupEvent> backups;

  int root_visits() const;
};

struct SearchResult {
  int action = 0;
  std::vector<double> weights;
  double root_value = 0.0;  // network value estimate at the root
};

// Root considered-visit sequence for sequential halving over m actions.
std::vector<int> ConsideredVisitSchedule(int num_considered, int budget);

// Completed Q values of a node, min-max normalized over its legal actions
// and scaled by (c_visit + max N) * c_scale. Illegal entries are 0.
std::vector<double> TransformedQ(const SearchNode& node, const SearchConfig& config);

SearchTree InitTree(const State& root, const NetParams& params, const SearchConfig& config,
                    Rng& rng);
SelectionPath Select(const SearchTree& tree, const SearchConfig& config);
int Expand(SearchTree& tree, const PathEdge& edge, const NetParams& params);
void Backup(SearchTree& tree, const SelectionPath& path, double leaf_value);
std::vector<double> RootWeights(const SearchTree& tree, const SearchConfig& config);
int RootAction(const SearchTree& tree, const SearchConfig& config);

SearchResult Search(const State& root, const NetParams& params, const SearchConfig& config,
                    Rng& rng);
// Same as Search, also handing back the finished tree.
SearchResult Search(const State& root, const NetParams& params, const SearchConfig& config,
                    Rng& rng, SearchTree& tree);

/// JSON dump of node ids, values, priors and edge statistics.
std::string DumpTreeJson(const SearchTree& tree);

/// Agent that plays the searched action at every step.
Agent MakeSearchAgent(const NetParams& params, const SearchConfig& config);

}  // namespace mctses
