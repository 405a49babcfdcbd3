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

#include <cmath>
#include <numeric>

#include "mctses/error.hpp"
#include "mctses/loss.hpp"
#include "mctses/optim.hpp"
#include "mctses/train_az.hpp"
#include "../support/random_params.hpp"

using namespace mctses;

namespace {

std::vector<double> RandomDistribution(Rng& rng, int n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& v : p) total += (v = rng.UniformOpen());
  for (double& v : p) v /= total;
  return p;
}

// Two-step episode on a 4-city instance with arbitrary legal root weights.
EpisodeRecord ToyEpisode(Rng& rng) {
  State s = Reset(MakeTsp(4), rng.Next());
  EpisodeRecord ep;
  std::vector<double> rewards, discounts;
  for (int t = 0; t < 2; ++t) {
    EpisodeStep step;
    step.observation = Observe(s);
    step.weights.assign(4, 0.0);
    double total = 0.0;
    for (int a = 0; a < 4; ++a) {
      if (step.observation.legal[a]) total += (step.weights[a] = rng.UniformOpen());
    }
    for (double& w : step.weights) w /= total;
    step.action = t;
    step.reward = rng.Normal();
    step.discount = t == 1 ? 0.0 : 1.0;
    rewards.push_back(step.reward);
    discounts.push_back(step.discount);
    s = Step(s, t).next;
    ep.steps.push_back(std::move(step));
  }
  ep.returns = ComputeReturns(rewards, discounts);
  ep.score = ep.returns[0];
  return ep;
}

}  // namespace

TEST_CASE("cross-entropy is minimized at the target") {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(rng.Below(6));
    const auto w = RandomDistribution(rng, n);
    const auto p = RandomDistribution(rng, n);
    CHECK(CrossEntropy(w, p) >= Entropy(w) - 1e-12);
    CHECK(CrossEntropy(w, w) == Entropy(w));
    std::vector<double> logits(n);
    for (int a = 0; a < n; ++a) logits[a] = std::log(p[a]) + 3.0;
    CHECK(CrossEntropyFromLogits(w, logits, std::vector<std::uint8_t>(n, 1)) ==
          doctest::Approx(CrossEntropy(w, p)).epsilon(1e-12));
  }
  // Stays finite when a probability underflows.
  CHECK(std::isfinite(CrossEntropyFromLogits({0.5, 0.5}, {0.0, -5000.0}, {1, 1})));
}

TEST_CASE("root weight contract") {
  CHECK_NOTHROW(CheckRootWeights({0.25, 0.75, 0.0}, {1, 1, 0}));
  CHECK_THROWS_AS(CheckRootWeights({0.25, 0.5, 0.25}, {1, 1, 0}), ContractError);
  CHECK_THROWS_AS(CheckRootWeights({0.25, 0.5, 0.0}, {1, 1, 0}), ContractError);
}

TEST_CASE("planning loss examples") {
  Rng rng(2);
  EpisodeRecord ep = ToyEpisode(rng);
  const NetDims dims = DimsFor(ep.steps[0].observation);
  NetParams zero = ZeroParams(dims);

  // One step, R = 2, v = 0, w = p (uniform under zero parameters).
  EpisodeRecord one;
  one.steps = {ep.steps[0]};
  one.steps[0].weights.assign(4, 0.25);
  one.returns = {2.0};
  const auto r1 = PlanningLoss(one, zero);
  CHECK(r1.value_loss == 4.0);
  CHECK(r1.policy_loss == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  CHECK(r1.total == r1.value_loss + r1.policy_loss);

  // v = R and p = w at every step.
  EpisodeRecord flat = ep;
  flat.returns = {1.5, 1.5};
  for (auto& step : flat.steps) {
    step.weights = MaskedSoftmax(std::vector<double>(4, 0.0), step.observation.legal);
  }
  zero.value_b(0) = 1.5;
  const auto r2 = PlanningLoss(flat, zero);
  CHECK(r2.value_loss == 0.0);
  CHECK(r2.policy_loss ==
        doctest::Approx(Entropy(flat.steps[0].weights) + Entropy(flat.steps[1].weights)));
}

TEST_CASE("planning loss gradient matches central differences") {
  Rng rng(3);
  for (int draw = 0; draw < 10; ++draw) {
    const EpisodeRecord ep = ToyEpisode(rng);
    const NetParams p = testing::RandomParams(rng, DimsFor(ep.steps[0].observation, 6));
    const LossAndGradient lg = PlanningLossWithGradient(ep, p);
    const PlanningLossReport fwd = PlanningLoss(ep, p);
    CHECK(lg.report.total == doctest::Approx(fwd.total).epsilon(1e-12));
    CHECK(lg.report.total == lg.report.value_loss + lg.report.policy_loss);

    const auto x = FlattenValues(p);
    double diff = 0, norm = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto up = x, down = x;
      up[i] += 1e-5;
      down[i] -= 1e-5;
      const double num = (PlanningLoss(ep, Unflatten(up, p.dims)).total -
                          PlanningLoss(ep, Unflatten(down, p.dims)).total) /
                         2e-5;
      diff += (num - lg.grad[i]) * (num - lg.grad[i]);
      norm += lg.grad[i] * lg.grad[i];
    }
    CHECK(std::sqrt(diff / norm) <= 1e-4);
  }
}

TEST_CASE("optimizer interface") {
  const std::vector<double> x0 = {1.0, -2.0, 3.0};
  const OptState s0 = InitOptimizer(x0);
  CHECK(GetParameters(s0) == x0);
  CHECK(s0.t == 0);

  OptimizerConfig sgd;
  sgd.kind = OptimizerKind::kSgd;
  const OptState s1 = UpdateState(s0, {2.0, 4.0, -6.0}, 0.5, sgd);
  CHECK(GetParameters(s1) == std::vector<double>{0.0, -4.0, 6.0});

  OptState ada = s0;
  for (int i = 0; i < 100; ++i) ada = UpdateState(ada, {0.0, 0.0, 0.0}, 0.1);
  CHECK(GetParameters(ada) == x0);

  CHECK_THROWS_AS(UpdateState(s0, {1.0}, 0.1), ContractError);
  CHECK_THROWS_AS(UpdateState(s0, {1.0, NAN, 0.0}, 0.1), ContractError);
  CHECK_THROWS_AS(ParseOptimizerKind("adam"), ConfigError);
  CHECK(ParseOptimizerKind("sgd") == OptimizerKind::kSgd);

  OptimizerConfig clipped;
  clipped.kind = OptimizerKind::kSgd;
  clipped.clip_norm = 1.0;
  const OptState c = UpdateState(InitOptimizer({0.0, 0.0}), {3.0, 4.0}, 1.0, clipped);
  CHECK(c.x[0] == doctest::Approx(-0.6));
  CHECK(c.x[1] == doctest::Approx(-0.8));
}

TEST_CASE("adabelief matches a scalar recurrence") {
  const double lr = 1e-3, g = 0.7, b1 = 0.9, b2 = 0.999, eps = 1e-16;
  double m = 0, s = 0, x = 0.25;
  OptState st = InitOptimizer({0.25, 0.25});
  for (int t = 1; t <= 1000; ++t) {
    m = b1 * m + (1 - b1) * g;
    s = b2 * s + (1 - b2) * (g - m) * (g - m) + eps;
    const double m_hat = m / (1 - std::pow(b1, t));
    const double s_hat = s / (1 - std::pow(b2, t));
    const double before = x;
    x -= lr * m_hat / (std::sqrt(s_hat) + eps);
    st = UpdateState(std::move(st), {g, -g}, lr);
    CHECK(x < before);
    CHECK(st.x[0] == doctest::Approx(x).epsilon(1e-12));
    CHECK(st.x[1] - 0.25 == doctest::Approx(0.25 - st.x[0]).epsilon(1e-12));
  }
  CHECK(st.t == 1000);

  OptState a = InitOptimizer({1, 2}), b = InitOptimizer({1, 2});
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> grad = {rng.Normal(), rng.Normal()};
    a = UpdateState(a, grad, 0.01);
    b = UpdateState(b, grad, 0.01);
  }
  CHECK(a == b);
}

TEST_CASE("planning-loss epochs") {
  const EnvSpec env = MakeTsp(5);
  const NetDims dims = DimsFor(Observe(Reset(env, 0)));
  const std::vector<double> x0 = FlattenValues(InitParams(1, dims));

  AzConfig frozen;
  frozen.batch = 4;
  frozen.lr = 0.0;
  OptState s = InitOptimizer(x0);
  const BatchStats st = AzEpoch(env, dims, frozen, s, 7, 0);
  CHECK(s.x == x0);
  CHECK(std::isfinite(st.value_loss));
  CHECK(st.mean_score < 0.0);

  OptState a = InitOptimizer(x0), b = InitOptimizer(x0);
  frozen.lr = 1e-2;
  const BatchStats sa = AzEpoch(env, dims, frozen, a, 7, 3);
  const BatchStats sb = AzEpoch(env, dims, frozen, b, 7, 3);
  CHECK(sa.mean_score == sb.mean_score);
  CHECK(sa.value_loss == sb.value_loss);
  CHECK(a == b);

  frozen.threads = 3;
  OptState c = InitOptimizer(x0);
  AzEpoch(env, dims, frozen, c, 7, 3);
  CHECK(c == a);
}

TEST_CASE("planning-loss training lowers the value loss on tsp n=5") {
  const EnvSpec env = MakeTsp(5);
  const NetDims dims = DimsFor(Observe(Reset(env, 0)));
  AzConfig config;
  config.batch = 32;
  config.lr = 1e-2;
  OptState s = InitOptimizer(FlattenValues(InitParams(2, dims)));
  std::vector<double> losses;
  for (int epoch = 0; epoch < 200; ++epoch) {
    losses.push_back(AzEpoch(env, dims, config, s, 11, epoch).value_loss);
  }
  const double tail = std::accumulate(losses.end() - 10, losses.end(), 0.0) / 10.0;
  MESSAGE("value loss epoch 0 = " << losses.front() << ", final = " << losses.back());
  CHECK(losses.back() < losses.front());
  CHECK(tail < losses.front());
}
