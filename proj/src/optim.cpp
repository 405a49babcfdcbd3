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

#include "mctses/optim.hpp"

#include <cmath>

#include "mctses/error.hpp"

namespace mctses {
namespace {

void CheckGradient(const OptState& state, const std::vector<double>& grad) {
  if (grad.size() != state.x.size()) {
    throw ContractError("optimizer: gradient has " + std::to_string(grad.size()) +
                        " entries, parameters have " + std::to_string(state.x.size()));
  }
  for (double g : grad) {
    if (!std::isfinite(g)) throw ContractError("optimizer: non-finite gradient");
  }
}

std::vector<double> Clip(const std::vector<double>& grad, double max_norm) {
  if (max_norm <= 0.0) return grad;
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return grad;
  std::vector<double> out(grad);
  for (double& g : out) g *= max_norm / norm;
  return out;
}

}  // namespace

OptimizerKind ParseOptimizerKind(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adabelief") return OptimizerKind::kAdaBelief;
  throw ConfigError("unknown optimizer '" + name + "'");
}

OptState InitOptimizer(std::vector<double> x0) {
  OptState s;
  s.m.assign(x0.size(), 0.0);
  s.s.assign(x0.size(), 0.0);
  s.x = std::move(x0);
  return s;
}

const std::vector<double>& GetParameters(const OptState& state) { return state.x; }

OptState SgdStep(OptState state, const std::vector<double>& grad, double lr) {
  CheckGradient(state, grad);
  for (std::size_t i = 0; i < grad.size(); ++i) state.x[i] -= lr * grad[i];
  ++state.t;
  return state;
}

OptState AdaBeliefStep(OptState state, const std::vector<double>& grad, double lr,
                       const OptimizerConfig& config) {
  CheckGradient(state, grad);
  ++state.t;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double g = grad[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    const double belief = g - state.m[i];
    state.s[i] = b2 * state.s[i] + (1.0 - b2) * belief * belief + config.eps;
    const double m_hat = state.m[i] / c1;
    const double s_hat = state.s[i] / c2;
    state.x[i] -= lr * m_hat / (std::sqrt(s_hat) + config.eps);
  }
  return state;
}

OptState UpdateState(OptState state, const std::vector<double>& grad, double lr,
                     const OptimizerConfig& config) {
  CheckGradient(state, grad);
  const std::vector<double> g = Clip(grad, config.clip_norm);
  switch (config.kind) {
    case OptimizerKind::kSgd: return SgdStep(std::move(state), g, lr);
    case OptimizerKind::kAdaBelief: return AdaBeliefStep(std::move(state), g, lr, config);
  }
  throw ContractError("optimizer: unknown kind");
}

}  // namespace mctses
