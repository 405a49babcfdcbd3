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

#include "mctses/train_az.hpp"

#include "mctses/deepsets_grad.hpp"
#include "mctses/error.hpp"

namespace mctses {

LossAndGradient PlanningLossWithGradient(const EpisodeRecord& episode,
                                         const NetParams& params) {
  LossAndGradient out;
  out.grad.assign(ParamCount(params.dims), 0.0);
  ForwardCache cache;
  for (std::size_t t = 0; t < episode.steps.size(); ++t) {
    const EpisodeStep& step = episode.steps[t];
    CheckRootWeights(step.weights, step.observation.legal);
    const Prediction pred = Forward(params, step.observation, cache);
    const std::vector<double> p = MaskedSoftmax(pred.logits, step.observation.legal);
    const double err = episode.returns[t] - pred.value;
    out.report.value_loss += err * err;
    out.report.policy_loss +=
        CrossEntropyFromLogits(step.weights, pred.logits, step.observation.legal);

    // d/dv (R - v)^2 = -2 (R - v); d/dlogit_a H(w, softmax) = p_a - w_a.
    std::vector<double> d_logits(p.size(), 0.0);
    for (std::size_t a = 0; a < p.size(); ++a) {
      if (step.observation.legal[a]) d_logits[a] = p[a] - step.weights[a];
    }
    const std::vector<double> g = Backward(params, cache, -2.0 * err, d_logits);
    for (std::size_t i = 0; i < g.size(); ++i) out.grad[i] += g[i];
  }
  out.report.total = out.report.value_loss + out.report.policy_loss;
  return out;
}

BatchStats AzEpoch(const EnvSpec& env, const NetDims& dims, const AzConfig& config,
                   OptState& opt, std::uint64_t seed, std::int64_t epoch) {
  if (config.batch < 1) throw ConfigError("az: batch must be >= 1");
  const NetParams params = Unflatten(GetParameters(opt), dims);
  const std::vector<EpisodeRecord> episodes =
      PlayEpisodes(env, params, config.search, config.batch, seed, epoch, config.threads);

  BatchStats stats;
  std::vector<double> grad(opt.x.size(), 0.0);
  // Fixed episode order keeps the reduction reproducible.
  for (const auto& episode : episodes) {
    const LossAndGradient lg = PlanningLossWithGradient(episode, params);
    stats.mean_score += episode.score;
    stats.value_loss += lg.report.value_loss;
    stats.policy_loss += lg.report.policy_loss;
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += lg.grad[i];
  }
  const double n = static_cast<double>(episodes.size());
  stats.mean_score /= n;
  stats.value_loss /= n;
  stats.policy_loss /= n;
  for (double& g : grad) g /= n;
  opt = UpdateState(std::move(opt), grad, config.lr, config.optimizer);
  return stats;
}

}  // namespace mctses
