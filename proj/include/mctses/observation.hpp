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

#include <Eigen/Core>

namespace mctses {

/// How a network's policy output maps onto environment actions.
/// kSetIndexed: one action per input item (TSP cities, subset points).
/// kFixedActions: a fixed list of m actions (grid moves).
enum class ActionMode { kSetIndexed, kFixedActions };

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

struct Observation {
  Matrix features;  // n_items x d_feat
  ActionMode mode = ActionMode::kSetIndexed;
  int num_fixed_actions = 0;  // only meaningful for kFixedActions
  std::vector<std::uint8_t> legal;

  int num_actions() const { return static_cast<int>(legal.size()); }
  int num_legal() const {
    int n = 0;
    for (auto l : legal) n += l ? 1 : 0;
    return n;
  }
};

/// Outcome of one environment transition for a concrete state type.
template <typename S>
struct Transition {
  double reward = 0.0;
  double discount = 1.0;
  S next;
};

}  // namespace mctses
