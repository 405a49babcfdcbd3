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
#include "mctses/loss.hpp"
#include "mctses/mcts.hpp"
#include "mctses/optim.hpp"

namespace mctses {

struct LossAndGradient {
  PlanningLossReport report;
  std::vector<double> grad;  // aligned with FlattenValues(params)
};

/// Planning loss of one episode and its exact gradient.
LossAndGradient PlanningLossWithGradient(const EpisodeRecord& episode,
                                         const NetParams& params);

struct AzConfig {
  int batch = 32;  // episodes per epoch
  double lr = 1e-3;
  SearchConfig search;
  OptimizerConfig optimizer;
  int threads = 1;
};

/// One planning-loss training epoch: play `batch` fresh episodes with the
/// current parameters, average the per-episode loss gradients, take one
/// optimizer step. Stats describe the episodes played before the update.
BatchStats AzEpoch(const EnvSpec& env, const NetDims& dims, const AzConfig& config,
                   OptState& opt, std::uint64_t seed, std::int64_t epoch);

}  // namespace mctses
