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

#include "mctses/deepsets.hpp"
#include "mctses/env.hpp"
#include "mctses/mcts.hpp"

namespace mctses {

struct PlanningLossReport {
  double value_loss = 0.0;
  double policy_loss = 0.0;
  double total = 0.0;
};

// H(w, p) = -sum_a w[a] log p[a], over the support of w.
double CrossEntropy(const std::vector<double>& w, const std::vector<double>& p);
double Entropy(const std::vector<double>& w);
// Same quantity from raw logits via log-softmax over legal actions; stays
// finite when a softmax probability underflows.
double CrossEntropyFromLogits(const std::vector<double>& w, const std::vector<double>& logits,
                              const std::vector<std::uint8_t>& legal);

// Throws ContractError if w puts mass on an illegal action or does not sum to 1.
void CheckRootWeights(const std::vector<double>& w, const std::vector<std::uint8_t>& legal);

/// Value loss sum_t (R_t - v_t)^2 plus policy loss sum_t H(w_t, p_t),
/// re-evaluating the network on every recorded observation. Forward only.
PlanningLossReport PlanningLoss(const EpisodeRecord& episode, const NetParams& params);

/// Per-epoch statistics shared by both trainers.
struct BatchStats {
  double mean_score = 0.0;
  double value_loss = 0.0;
  double policy_loss = 0.0;
};

/// Plays `batch` search-guided episodes with seeds DeriveSeed(seed, {epoch, i}).
std::vector<EpisodeRecord> PlayEpisodes(const EnvSpec& env, const NetParams& params,
                                        const SearchConfig& search, int batch,
                                        std::uint64_t seed, std::int64_t epoch,
                                        int threads = 1);

// Means over episodes of score and per-episode summed losses.
BatchStats Summarize(const std::vector<EpisodeRecord>& episodes, const NetParams& params);

}  // namespace mctses
