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

#include "mctses/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "mctses/error.hpp"

namespace mctses {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

SearchNode MakeNode(State state, const NetParams& params) {
  SearchNode node;
  node.terminal = IsTerminal(state);
  if (!node.terminal) {
    const Observation obs = Observe(state);
    const Prediction pred = Predict(params, obs);
    node.value = pred.value;
    node.prior = MaskedSoftmax(pred.logits, obs.legal);
    node.logits = pred.logits;
    node.legal = obs.legal;
    node.edges.resize(obs.legal.size());
  }
  node.state = std::move(state);
  return node;
}

int MaxVisits(const SearchNode& node) {
  int m = 0;
  for (const auto& e : node.edges) m = std::max(m, e.visits);
  return m;
}

int SumVisits(const SearchNode& node) {
  int s = 0;
  for (const auto& e : node.edges) s += e.visits;
  return s;
}

int ArgmaxLegal(const std::vector<double>& score, const std::vector<std::uint8_t>& legal) {
  int best = -1;
  for (std::size_t a = 0; a < score.size(); ++a) {
    if (!legal[a]) continue;
    if (best < 0 || score[a] > score[best]) best = static_cast<int>(a);
  }
  return best;
}

// Sequential-halving root score: Gumbel + logit + transformed Q, restricted
// to actions whose visit count equals the scheduled one.
int RootChoice(const SearchTree& tree, const SearchConfig& config, int considered_visit) {
  const SearchNode& root = tree.nodes[0];
  const std::vector<double> q = TransformedQ(root, config);
  std::vector<double> score(root.edges.size(), kNegInf);
  std::vector<double> fallback(root.edges.size(), kNegInf);
  bool any = false;
  for (std::size_t a = 0; a < root.edges.size(); ++a) {
    if (!root.legal[a]) continue;
    fallback[a] = tree.root_gumbel[a] + root.logits[a] + q[a];
    if (root.edges[a].visits == considered_visit) {
      score[a] = fallback[a];
      any = true;
    }
  }
  return ArgmaxLegal(any ? score : fallback, root.legal);
}

int InteriorChoice(const SearchNode& node, const SearchConfig& config) {
  const std::vector<double> q = TransformedQ(node, config);
  std::vector<double> improved(node.logits.size());
  for (std::size_t a = 0; a < improved.size(); ++a) improved[a] = node.logits[a] + q[a];
  const std::vector<double> pi = MaskedSoftmax(improved, node.legal);
  const double denom = 1.0 + SumVisits(node);
  std::vector<double> score(pi.size());
  for (std::size_t a = 0; a < pi.size(); ++a) score[a] = pi[a] - node.edges[a].visits / denom;
  return ArgmaxLegal(score, node.legal);
}

}  // namespace

void ValidateSearchConfig(const SearchConfig& config) {
  if (config.budget < 2) throw ConfigError("search: budget must be >= 2");
  if (config.max_considered < 2) throw ConfigError("search: max_considered must be >= 2");
  if (!(config.c_visit >= 0.0) || !(config.c_scale >= 0.0)) {
    throw ConfigError("search: c_visit and c_scale must be non-negative");
  }
}

int SearchTree::root_visits() const { return nodes.empty() ? 0 : SumVisits(nodes[0]); }

std::vector<int> ConsideredVisitSchedule(int num_considered, int budget) {
  std::vector<int> sequence;
  if (num_considered <= 1) {
    for (int i = 0; i < budget; ++i) sequence.push_back(i);
    return sequence;
  }
  const int log2max = static_cast<int>(std::ceil(std::log2(num_considered)));
  std::vector<int> visits(num_considered, 0);
  int considered = num_considered;
  while (static_cast<int>(sequence.size()) < budget) {
    const int extra = std::max(1, budget / (log2max * considered));
    for (int r = 0; r < extra; ++r) {
      sequence.insert(sequence.end(), visits.begin(), visits.begin() + considered);
      for (int i = 0; i < considered; ++i) ++visits[i];
    }
    considered = std::max(2, considered / 2);
  }
  sequence.resize(budget);
  return sequence;
}

std::vector<double> TransformedQ(const SearchNode& node, const SearchConfig& config) {
  const std::size_t n = node.edges.size();
  std::vector<double> completed(n, 0.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t a = 0; a < n; ++a) {
    if (!node.legal[a]) continue;
    completed[a] = node.edges[a].visits > 0 ? node.edges[a].q : node.value;
    lo = std::min(lo, completed[a]);
    hi = std::max(hi, completed[a]);
  }
  const double range = std::max(hi - lo, 1e-8);
  const double scale = (config.c_visit + MaxVisits(node)) * config.c_scale;
  for (std::size_t a = 0; a < n; ++a) {
    completed[a] = node.legal[a] ? scale * (completed[a] - lo) / range : 0.0;
  }
  return completed;
}

SearchTree InitTree(const State& root, const NetParams& params, const SearchConfig& config,
                    Rng& rng) {
  ValidateSearchConfig(config);
  if (IsTerminal(root)) throw ContractError("search: root state is terminal");
  SearchTree tree;
  tree.record_backups = config.record_backups;
  tree.nodes.push_back(MakeNode(root, params));
  const SearchNode& r = tree.nodes[0];
  tree.root_gumbel.resize(r.edges.size());
  for (double& g : tree.root_gumbel) g = rng.Gumbel();
  int legal = 0;
  for (auto l : r.legal) legal += l ? 1 : 0;
  tree.num_considered = std::min({config.max_considered, legal, config.budget});
  tree.schedule = ConsideredVisitSchedule(tree.num_considered, config.budget);
  return tree;
}

SelectionPath Select(const SearchTree& tree, const SearchConfig& config) {
  if (tree.nodes.empty()) throw ContractError("select: empty tree");
  SelectionPath path;
  int node = 0;
  for (;;) {
    const SearchNode& n = tree.nodes[node];
    int action;
    if (node == 0) {
      const int sim = std::min<int>(tree.simulations, static_cast<int>(tree.schedule.size()) - 1);
      action = RootChoice(tree, config, tree.schedule[sim]);
    } else {
      action = InteriorChoice(n, config);
    }
    path.edges.push_back({node, action});
    const int child = n.edges[action].child;
    if (child < 0) {
      path.needs_expansion = true;
      return path;
    }
    if (tree.nodes[child].terminal) {
      path.needs_expansion = false;
      return path;
    }
    node = child;
  }
}

int Expand(SearchTree& tree, const PathEdge& edge, const NetParams& params) {
  SearchNode& parent = tree.nodes[edge.node];
  if (parent.edges[edge.action].child >= 0) {
    throw ContractError("expand: edge already has a child");
  }
  StepResult step = Step(parent.state, edge.action);
  parent.edges[edge.action].reward = step.reward;
  parent.edges[edge.action].discount = step.discount;
  SearchNode child = MakeNode(std::move(step.next), params);
  if (step.discount == 0.0) {
    // No bootstrap past the end of the episode.
    child.value = 0.0;
  }
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back(std::move(child));
  tree.nodes[edge.node].edges[edge.action].child = id;
  return id;
}

void Backup(SearchTree& tree, const SelectionPath& path, double leaf_value) {
  double g = leaf_value;
  for (std::size_t i = path.edges.size(); i-- > 0;) {
    Edge& e = tree.nodes[path.edges[i].node].edges[path.edges[i].action];
    g = e.reward + e.discount * g;
    e.q = (e.visits * e.q + g) / (e.visits + 1);
    ++e.visits;
    if (tree.record_backups) tree.backups.push_back({path.edges[i].node, path.edges[i].action, g});
  }
  ++tree.simulations;
}

std::vector<double> RootWeights(const SearchTree& tree, const SearchConfig& config) {
  const SearchNode& root = tree.nodes[0];
  const std::vector<double> q = TransformedQ(root, config);
  std::vector<double> improved(root.logits.size());
  for (std::size_t a = 0; a < improved.size(); ++a) improved[a] = root.logits[a] + q[a];
  return MaskedSoftmax(improved, root.legal);
}

int RootAction(const SearchTree& tree, const SearchConfig& config) {
  return RootChoice(tree, config, MaxVisits(tree.nodes[0]));
}

SearchResult Search(const State& root, const NetParams& params, const SearchConfig& config,
                    Rng& rng, SearchTree& tree) {
  tree = InitTree(root, params, config, rng);
  for (int sim = 0; sim < config.budget; ++sim) {
    const SelectionPath path = Select(tree, config);
    double leaf = 0.0;
    if (path.needs_expansion) {
      const int child = Expand(tree, path.edges.back(), params);
      leaf = tree.nodes[child].value;
    } else {
      ++tree.terminal_revisits;
    }
    Backup(tree, path, leaf);
  }
  SearchResult result;
  result.action = RootAction(tree, config);
  result.weights = RootWeights(tree, config);
  result.root_value = tree.nodes[0].value;
  return result;
}

SearchResult Search(const State& root, const NetParams& params, const SearchConfig& config,
                    Rng& rng) {
  SearchTree tree;
  return Search(root, params, config, rng, tree);
}

std::string DumpTreeJson(const SearchTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const SearchNode& n = tree.nodes[id];
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t a = 0; a < n.edges.size(); ++a) {
      const Edge& e = n.edges[a];
      if (e.visits == 0 && e.child < 0) continue;
      edges.push_back({{"action", a},
                       {"N", e.visits},
                       {"Q", e.q},
                       {"reward", e.reward},
                       {"discount", e.discount},
                       {"child", e.child}});
    }
    nodes.push_back({{"id", id},
                     {"terminal", n.terminal},
                     {"value", n.value},
                     {"prior", n.prior},
                     {"edges", edges}});
  }
  nlohmann::json doc = {{"simulations", tree.simulations},
                        {"num_considered", tree.num_considered},
                        {"nodes", nodes}};
  return doc.dump(2);
}

Agent MakeSearchAgent(const NetParams& params, const SearchConfig& config) {
  return [params, config](const State& state, Rng& rng) {
    const SearchResult r = Search(state, params, config, rng);
    return Decision{r.action, r.weights};
  };
}

}  // namespace mctses
