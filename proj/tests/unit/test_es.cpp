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

// Built against the ES trainer and the core only; no gradient code is linked.
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <thread>

#include "mctses/error.hpp"
#include "mctses/train_es.hpp"

using namespace mctses;
using namespace std::chrono_literals;

namespace {

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::vector<double> RandomVector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.Normal();
  return v;
}

// Runs `iterations` ES steps with `workers` threads sharing one hub.
std::vector<OptState> RunThreads(int workers, const EsConfig& config, const FitnessFn& f,
                                 const std::vector<double>& x0, int iterations) {
  auto hub = std::make_shared<InProcessHub>(workers, 10000ms);
  std::vector<OptState> states(workers, InitOptimizer(x0));
  std::vector<std::thread> threads;
  for (int r = 0; r < workers; ++r) {
    threads.emplace_back([&, r] {
      InProcessPool pool(hub, r);
      for (int it = 0; it < iterations; ++it) {
        EsIteration(states[r], f, config, OptimizerConfig{}, pool, 1234, it);
      }
    });
  }
  for (auto& t : threads) t.join();
  return states;
}

}  // namespace

TEST_CASE("es delta examples") {
  Rng rng(1);
  const auto x = RandomVector(rng, 6);
  const auto z = RandomVector(rng, 6);
  const auto c = RandomVector(rng, 6);
  const FitnessFn constant = [](const std::vector<double>&, std::uint64_t) { return 3.0; };
  const FitnessFn linear = [&](const std::vector<double>& v, std::uint64_t) { return Dot(c, v); };
  CHECK(EsDelta(x, z, 0.1, constant, 0) == 0.0);
  CHECK(EsDelta(x, z, 0.1, linear, 0) == doctest::Approx(2 * 0.1 * Dot(c, z)).epsilon(1e-12));
  CHECK(EsDelta(x, std::vector<double>(6, 0.0), 0.1, linear, 0) == 0.0);

  const FitnessFn nan = [](const std::vector<double>&, std::uint64_t) { return NAN; };
  CHECK_THROWS_AS(EsDelta(x, z, 0.1, nan, 0), ContractError);
  CHECK_THROWS_AS(EsDelta(x, {1.0}, 0.1, linear, 0), ContractError);
}

TEST_CASE("antithetic symmetry") {
  Rng rng(2);
  const FitnessFn noisy = [](const std::vector<double>& v, std::uint64_t seed) {
    Rng r(seed);
    double f = 0;
    for (double x : v) f += std::sin(3 * x + r.Normal());
    return f;
  };
  for (int i = 0; i < 50; ++i) {
    const auto x = RandomVector(rng, 5);
    const auto z = RandomVector(rng, 5);
    std::vector<double> neg(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) neg[k] = -z[k];
    const std::uint64_t seed = rng.Next();
    CHECK(EsDelta(x, z, 0.2, noisy, seed) == -EsDelta(x, neg, 0.2, noisy, seed));
  }
}

TEST_CASE("pseudogradient examples") {
  Rng rng(3);
  std::vector<std::vector<double>> zs;
  for (int i = 0; i < 4; ++i) zs.push_back(RandomVector(rng, 3));
  for (double g : Pseudogradient({0, 0, 0, 0}, zs, 0.1)) CHECK(g == 0.0);
  CHECK_THROWS_AS(Pseudogradient({0, 0}, zs, 0.1), ContractError);

  // Linear fitness: g = (1/|I|) sum (c.z) z, which averages to c.
  const std::vector<double> c = {1.0, -2.0, 0.5};
  const double sigma = 0.05;
  std::vector<double> mean(3, 0.0);
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    std::vector<std::vector<double>> z;
    std::vector<double> deltas;
    for (int i = 0; i < 8; ++i) {
      z.push_back(RandomVector(rng, 3));
      deltas.push_back(2 * sigma * Dot(c, z.back()));
    }
    const auto g = Pseudogradient(deltas, z, sigma);
    std::vector<double> expect(3, 0.0);
    for (int i = 0; i < 8; ++i) {
      for (int k = 0; k < 3; ++k) expect[k] += Dot(c, z[i]) * z[i][k] / 8.0;
    }
    for (int k = 0; k < 3; ++k) {
      CHECK(g[k] == doctest::Approx(expect[k]).epsilon(1e-12));
      mean[k] += g[k] / reps;
    }
  }
  for (int k = 0; k < 3; ++k) CHECK(std::abs(mean[k] - c[k]) < 0.1);
}

TEST_CASE("quadratic direction test") {
  const int dim = 20;
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto target = RandomVector(rng, dim);
    const auto x = RandomVector(rng, dim);
    const FitnessFn f = [&](const std::vector<double>& v, std::uint64_t) {
      double s = 0;
      for (int k = 0; k < dim; ++k) s -= (v[k] - target[k]) * (v[k] - target[k]);
      return s;
    };
    std::vector<double> deltas;
    std::vector<std::vector<double>> zs;
    for (int i = 0; i < 256; ++i) {
      zs.push_back(Perturbation(seed, 0, i, dim));
      deltas.push_back(EsDelta(x, zs.back(), 0.1, f, 0));
    }
    const auto g = Pseudogradient(deltas, zs, 0.1);
    std::vector<double> truth(dim);
    for (int k = 0; k < dim; ++k) truth[k] = -2 * (x[k] - target[k]);
    const double cosine = Dot(g, truth) / std::sqrt(Dot(g, g) * Dot(truth, truth));
    passes += cosine >= 0.7 ? 1 : 0;
  }
  CHECK(passes >= 18);
}

TEST_CASE("perturbations are regenerated identically") {
  CHECK(Perturbation(5, 3, 2, 10) == Perturbation(5, 3, 2, 10));
  CHECK(Perturbation(5, 3, 2, 10) != Perturbation(5, 3, 3, 10));
  CHECK(Perturbation(5, 3, 2, 10) != Perturbation(5, 4, 2, 10));
  CHECK(EvalSeed(5, 3, 2) != EvalSeed(5, 3, 3));
}

TEST_CASE("centered ranks") {
  CHECK(CenteredRanks({3.0, -1.0, 10.0}) == std::vector<double>{0.0, -0.5, 0.5});
  CHECK(CenteredRanks({2.0}) == std::vector<double>{0.0});
}

TEST_CASE("single worker, single pair is a two-point step") {
  const std::vector<double> x0 = {0.5, -0.5};
  const FitnessFn f = [](const std::vector<double>& v, std::uint64_t) {
    return -(v[0] * v[0] + 3 * v[1] * v[1]);
  };
  EsConfig config{0.1, 1, 1, 0.2, false};
  OptimizerConfig sgd;
  sgd.kind = OptimizerKind::kSgd;
  auto hub = std::make_shared<InProcessHub>(1, 1000ms);
  InProcessPool pool(hub, 0);
  OptState s = InitOptimizer(x0);
  const auto result = EsIteration(s, f, config, sgd, pool, 9, 0);
  const auto z = Perturbation(9, 0, 0, 2);
  const double delta = EsDelta(x0, z, 0.1, f, EvalSeed(9, 0, 0));
  CHECK(result.deltas == std::vector<double>{delta});
  for (int k = 0; k < 2; ++k) {
    const double g = delta * z[k] / (2 * 0.1);
    CHECK(s.x[k] == doctest::Approx(x0[k] + 0.2 * g).epsilon(1e-14));
  }
}

TEST_CASE("lr 0 leaves parameters but still computes deltas") {
  const FitnessFn f = [](const std::vector<double>& v, std::uint64_t) { return v[0] - v[1]; };
  EsConfig config{0.1, 4, 1, 0.0, false};
  auto hub = std::make_shared<InProcessHub>(1, 1000ms);
  InProcessPool pool(hub, 0);
  OptState s = InitOptimizer({1.0, 2.0});
  const auto r = EsIteration(s, f, config, OptimizerConfig{}, pool, 1, 0);
  CHECK(s.x == std::vector<double>{1.0, 2.0});
  CHECK(r.deltas.size() == 4);
  CHECK(std::any_of(r.deltas.begin(), r.deltas.end(), [](double d) { return d != 0.0; }));
}

TEST_CASE("workers stay synchronized") {
  const FitnessFn f = [](const std::vector<double>& v, std::uint64_t seed) {
    Rng r(seed);
    double s = 0;
    for (double x : v) s -= (x - r.Uniform()) * (x - r.Uniform());
    return s;
  };
  Rng rng(4);
  const auto x0 = RandomVector(rng, 7);
  EsConfig config{0.1, 8, 1, 0.05, false};
  const auto reference = RunThreads(1, config, f, x0, 6)[0];
  for (int workers : {1, 2, 4, 8}) {
    const auto states = RunThreads(workers, config, f, x0, 6);
    for (const OptState& s : states) CHECK(s == reference);
  }
  config.centered_ranks = true;
  const auto ranked = RunThreads(4, config, f, x0, 3);
  for (const OptState& s : ranked) CHECK(s == ranked[0]);
  CHECK(ranked[0].x != reference.x);
}

TEST_CASE("episode fitness") {
  const EnvSpec tsp = MakeTsp(5);
  const NetDims dims = DimsFor(Observe(Reset(tsp, 0)));
  const auto x = FlattenValues(InitParams(3, dims));
  const SearchConfig search;
  const double f = Fitness(x, dims, tsp, search, 1, 77);
  CHECK(f == Fitness(x, dims, tsp, search, 1, 77));
  CHECK(f == Rollout(tsp, MakeSearchAgent(Unflatten(x, dims), search), DeriveSeed(77, {0})).score);
  const double f3 = Fitness(x, dims, tsp, search, 3, 77);
  double mean = 0;
  for (std::uint64_t e = 0; e < 3; ++e) {
    mean += Rollout(tsp, MakeSearchAgent(Unflatten(x, dims), search), DeriveSeed(77, {e})).score;
  }
  CHECK(f3 == doctest::Approx(mean / 3).epsilon(1e-14));

  const EnvSpec vk = MakeKCenter(6, 6);
  const NetDims vd = DimsFor(Observe(Reset(vk, 0)));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CHECK(Fitness(FlattenValues(InitParams(seed, vd)), vd, vk, search, 1, seed) == 0.0);
  }
  CHECK_THROWS_AS(ValidateEsConfig({0.0, 1, 1, 0.1, false}), ConfigError);
  CHECK_THROWS_AS(ValidateEsConfig({0.1, 0, 1, 0.1, false}), ConfigError);
}
