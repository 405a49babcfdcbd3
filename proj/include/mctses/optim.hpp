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

namespace mctses {

enum class OptimizerKind { kSgd, kAdaBelief };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdaBelief;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-16;
  // Rescale the gradient to at most this L2 norm; 0 disables clipping.
  double clip_norm = 0.0;
};

OptimizerKind ParseOptimizerKind(const std::string& name);

/// Optimizer state. Optimizers minimize: callers maximizing an objective
/// pass the negated ascent direction.
struct OptState {
  std::int64_t t = 0;
  std::vector<double> m;
  std::vector<double> s;
  std::vector<double> x;

  friend bool operator==(const OptState&, const OptState&) = default;
};

OptState InitOptimizer(std::vector<double> x0);
const std::vector<double>& GetParameters(const OptState& state);

// Throws ContractError on a dimension mismatch or a non-finite gradient.
OptState UpdateState(OptState state, const std::vector<double>& grad, double lr,
                     const OptimizerConfig& config = {});

// One AdaBelief update with bias correction:
//   m <- b1 m + (1 - b1) g
//   s <- b2 s + (1 - b2) (g - m)^2 + eps
//   x <- x - lr * m_hat / (sqrt(s_hat) + eps)
OptState AdaBeliefStep(OptState state, const std::vector<double>& grad, double lr,
                       const OptimizerConfig& config = {});
OptState SgdStep(OptState state, const std::vector<double>& grad, double lr);

}  // namespace mctses
