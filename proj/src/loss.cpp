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

#include "mctses/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mctses/error.hpp"
#include "mctses/parallel.hpp"

namespace mctses {

double CrossEntropy(const std::vector<double>& w, const std::vector<double>& p) {
  if (w.size() != p.size()) throw ContractError("cross_entropy: length mismatch");
  double h = 0.0;
  for (std::size_t a = 0; a < w.size(); ++a) {
    if (w[a] > 0.0) h -= w[a] * std::log(p[a]);
  }
  return h;
}

double Entropy(const std::vector<double>& w) { return CrossEntropy(w, w); }

double CrossEntropyFromLogits(const std::vector<double>& w, const std::vector<double>& logits,
                              const std::vector<std::uint8_t>& legal) {
  if (w.size() != logits.size() || legal.size() != logits.size()) {
    throw ContractError("cross_entropy: length mismatch");
  }
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < logits.size(); ++a) {
    if (legal[a]) hi = std::max(hi, logits[a]);
  }
  if (!std::isfinite(hi)) throw ContractError("cross_entropy: no legal actions");
  double total = 0.0;
  for (std::size_t a = 0; a < logits.size(); ++a) {
    if (legal[a]) total += std::exp(logits[a] - hi);
  }
  const double log_z = hi + std::log(total);
  double h = 0.0;
  for (std::size_t a = 0; a < w.size(); ++a) {
    if (w[a] > 0.0) h -= w[a] * (logits[a] - log_z);
  }
  return h;
}

void CheckRootWeights(const std::vector<double>& w, const std::vector<std::uint8_t>& legal) {
  if (w.size() != legal.size()) throw ContractError("root weights: length mismatch");
  double total = 0.0;
  for (std::size_t a = 0; a < w.size(); ++a) {
    if (w[a] < 0.0 || !std::isfinite(w[a])) {
      throw ContractError("root weights: negative or non-finite entry");
    }
    if (!legal[a] && w[a] != 0.0) {
      throw ContractError("root weights: mass on illegal action " + std::to_string(a));
    }
    total += w[a];
  }
  if (std::abs(total - 1.0) > 1e-9) throw ContractError("root weights: do not sum to 1");
}

PlanningLossReport PlanningLoss(const EpisodeRecord& episode, const NetParams& params) {
  PlanningLossReport report;
  for (std::size_t t = 0; t < episode.steps.size(); ++t) {
    const EpisodeStep& step = episode.steps[t];
    CheckRootWeights(step.weights, step.observation.legal);
    const Prediction pred = Predict(params, step.observation);
    const double err = episode.returns[t] - pred.value;
    report.value_loss += err * err;
    report.policy_loss +=
        CrossEntropyFromLogits(step.weights, pred.logits, step.observation.legal);
  }
  report.total = report.value_loss + report.policy_loss;
  return report;
}

std::vector<EpisodeRecord> PlayEpisodes(const EnvSpec& env, const NetParams& params,
                                        const SearchConfig& search, int batch,
                                        std::uint64_t seed, std::int64_t epoch,
                                        int threads) {
  std::vector<EpisodeRecord> episodes(batch);
  const Agent agent = MakeSearchAgent(params, search);
  ParallelFor(batch, threads, [&](int i) {
    episodes[i] = Rollout(env, agent,
                          DeriveSeed(seed, {static_cast<std::uint64_t>(epoch),
                                            static_cast<std::uint64_t>(i)}));
  });
  return episodes;
}

BatchStats Summarize(const std::vector<EpisodeRecord>& episodes, const NetParams& params) {
  BatchStats stats;
  if (episodes.empty()) return stats;
  for (const auto& e : episodes) {
    const PlanningLossReport r = PlanningLoss(e, params);
    stats.mean_score += e.score;
    stats.value_loss += r.value_loss;
    stats.policy_loss += r.policy_loss;
  }
  const double n = static_cast<double>(episodes.size());
  stats.mean_score /= n;
  stats.value_loss /= n;
  stats.policy_loss /= n;
  return stats;
}

}  // namespace mctses
