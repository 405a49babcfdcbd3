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

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mctses/bench.hpp"
#include "mctses/error.hpp"

using namespace mctses;
namespace fs = std::filesystem;

namespace {

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mctses_unit_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

ExperimentConfig Small(const std::string& out) {
  ExperimentConfig c;
  c.env = "tsp";
  c.size = 5;
  c.es = {0, 1};
  c.lrs = {1e-2, 1e-1};
  c.trials = 2;
  c.epochs = 3;
  c.batch = 3;
  c.workers = 3;
  c.seed = 5;
  c.out = out;
  return c;
}

}  // namespace

TEST_CASE("zero epochs writes the header and a manifest") {
  ExperimentConfig c = Small(Scratch("empty.csv").string());
  c.epochs = 0;
  c.force = true;
  CHECK(RunExperiment(c) == RunOutcome::kCompleted);
  CHECK(Slurp(c.out) == std::string(kMetricsHeader) + "\n");
  const auto manifest = nlohmann::json::parse(Slurp(ManifestPath(c.out)));
  CHECK(manifest["status"] == "complete");
  CHECK(manifest["rows"] == 0);
  CHECK(manifest["seeds"]["trials"].size() == 2);
  CHECK(manifest["version"].get<std::string>() == Version());
}

TEST_CASE("runs are reproducible, resumable and complete") {
  ExperimentConfig c = Small(Scratch("run.csv").string());
  c.force = true;
  std::vector<MetricsRow> streamed;
  RunExperiment(c, [&](const MetricsRow& r) { streamed.push_back(r); });
  const std::string first = Slurp(c.out);

  const auto rows = ReadMetrics(c.out);
  CHECK(rows.size() == 2u * 2u * 2u * 3u);
  CHECK(streamed.size() == rows.size());
  std::set<std::tuple<std::string, int, double, int, int>> keys;
  for (const auto& r : rows) {
    CHECK(keys.insert({r.env, r.es, r.lr, r.trial, r.epoch}).second);
    CHECK(std::isfinite(r.mean_score));
    CHECK(std::isfinite(r.value_loss));
    CHECK(std::isfinite(r.policy_loss));
    CHECK(r.wall_ms == 0.0);
  }
  // Epoch 0 sees the same initial network and episodes under both trainers.
  for (const auto& r : rows) {
    if (r.es != 1 || r.epoch != 0) continue;
    for (const auto& q : rows) {
      if (q.es == 0 && q.epoch == 0 && q.trial == r.trial && q.lr == r.lr) {
        CHECK(q.mean_score == r.mean_score);
      }
    }
  }

  RunExperiment(c);
  CHECK(Slurp(c.out) == first);

  // Complete and unchanged: a no-op without --force.
  c.force = false;
  const auto stamp = fs::last_write_time(c.out);
  CHECK(RunExperiment(c) == RunOutcome::kSkipped);
  CHECK(fs::last_write_time(c.out) == stamp);

  // A different config refuses to overwrite.
  ExperimentConfig other = c;
  other.seed = 6;
  CHECK_THROWS_AS(RunExperiment(other), ConfigError);

  // A crashed run (manifest still "running") is redone.
  auto manifest = nlohmann::json::parse(Slurp(ManifestPath(c.out)));
  manifest["status"] = "running";
  std::ofstream(ManifestPath(c.out)) << manifest.dump();
  std::ofstream(c.out, std::ios::trunc) << kMetricsHeader << "\n";
  CHECK(RunExperiment(c) == RunOutcome::kCompleted);
  CHECK(Slurp(c.out) == first);
}

TEST_CASE("threads do not change results") {
  ExperimentConfig c = Small(Scratch("threads1.csv").string());
  c.trials = 1;
  c.force = true;
  RunExperiment(c);
  ExperimentConfig d = c;
  d.out = Scratch("threads3.csv").string();
  d.threads = 3;
  RunExperiment(d);
  CHECK(Slurp(c.out) == Slurp(d.out));
}

TEST_CASE("checkpoint of the last run") {
  ExperimentConfig c = Small(Scratch("ckpt.csv").string());
  c.trials = 1;
  c.es = {1};
  c.lrs = {0.05};
  c.force = true;
  c.params_out = Scratch("ckpt.params").string();
  RunExperiment(c);
  const NetParams p = LoadParams(c.params_out);
  CHECK(p.dims.input_dim == 5);
}

TEST_CASE("invalid configurations fail before any output") {
  const std::string out = Scratch("never.csv").string();
  fs::remove(out);
  auto expect_invalid = [&](auto mutate) {
    ExperimentConfig c = Small(out);
    mutate(c);
    CHECK_THROWS_AS(RunExperiment(c), ConfigError);
    CHECK_FALSE(fs::exists(out));
  };
  expect_invalid([](ExperimentConfig& c) { c.env = "chess"; });
  expect_invalid([](ExperimentConfig& c) { c.es = {2}; });
  expect_invalid([](ExperimentConfig& c) { c.lrs = {}; });
  expect_invalid([](ExperimentConfig& c) { c.lrs = {-1.0}; });
  expect_invalid([](ExperimentConfig& c) { c.trials = 0; });
  expect_invalid([](ExperimentConfig& c) { c.search.budget = 1; });
  expect_invalid([](ExperimentConfig& c) { c.sigma = 0.0; });
  expect_invalid([](ExperimentConfig& c) { c.optimizer = "adam"; });
  expect_invalid([](ExperimentConfig& c) { c.pool = "mpi"; });
  expect_invalid([](ExperimentConfig& c) { c.env = "vkcp"; c.size = 4; c.k = 5; });
  expect_invalid([](ExperimentConfig& c) { c.env = "sokoban"; });
  expect_invalid([](ExperimentConfig& c) {
    c.pool = "tcp";
    c.peers = "127.0.0.1:1";
  });

  ExperimentConfig c = Small("/nonexistent-dir/metrics.csv");
  CHECK_THROWS_AS(RunExperiment(c), ConfigError);
}

TEST_CASE("wall-clock limit stops a run early") {
  ExperimentConfig c = Small(Scratch("limited.csv").string());
  c.trials = 1;
  c.es = {0};
  c.lrs = {1e-2};
  c.epochs = 1000000;
  c.time_limit_s = 0.2;
  c.force = true;
  RunExperiment(c);
  const auto rows = ReadMetrics(c.out);
  CHECK(rows.size() >= 1);
  CHECK(rows.size() < 1000000);
}

TEST_CASE("float formatting round-trips") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.Uniform() - 0.5) * std::pow(10.0, static_cast<int>(rng.Below(40)) - 20);
    const std::string s = FormatDouble(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
}

TEST_CASE("aggregate") {
  auto row = [](int trial, double score) {
    MetricsRow r;
    r.env = "tsp";
    r.lr = 0.01;
    r.trial = trial;
    r.mean_score = score;
    return r;
  };
  const auto two = Aggregate({row(0, 1.0), row(1, 3.0)});
  REQUIRE(two.size() == 1);
  CHECK(two[0].score_mean == 2.0);
  CHECK(two[0].score_sem == 1.0);
  CHECK(two[0].trials == 2);

  const auto one = Aggregate({row(0, 5.0)});
  CHECK(one[0].score_sem == 0.0);

  Rng rng(2);
  std::vector<MetricsRow> rows;
  for (int t = 0; t < 7; ++t) rows.push_back(row(t, rng.Normal() * 1e3 + 0.1));
  const auto base = Aggregate(rows);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto again = Aggregate(rows);
    CHECK(again[0].score_mean == base[0].score_mean);
    CHECK(again[0].score_sem == base[0].score_sem);
  }

  CHECK_THROWS_AS(Aggregate({row(0, 1.0), row(0, 2.0)}), ContractError);
  CHECK(MeanSem({2.0, 4.0, 6.0}).second == doctest::Approx(2.0 / std::sqrt(3.0)));
}

TEST_CASE("aggregate files") {
  const std::string a = Scratch("agg_a.csv").string();
  const std::string b = Scratch("agg_b.csv").string();
  std::ofstream(a) << kMetricsHeader << "\ntsp,0,0.01,0,0,1,2,3,0\n";
  std::ofstream(b) << kMetricsHeader << "\ntsp,0,0.01,1,0,3,2,3,0\n";
  const auto s = AggregateFiles({a, b});
  REQUIRE(s.size() == 1);
  CHECK(s[0].score_mean == 2.0);
  std::ostringstream out;
  WriteSummary(out, s);
  CHECK(out.str().find("tsp,0,0.01,0,2,2,1,2,0,3,0") != std::string::npos);

  const std::string bad = Scratch("agg_bad.csv").string();
  std::ofstream(bad) << "env,es,lr,trial,epoch,score\n";
  CHECK_THROWS_AS(AggregateFiles({a, bad}), ParseError);
  std::ofstream(bad, std::ios::trunc) << kMetricsHeader << "\ntsp,0,x,0,0,1,2,3,0\n";
  CHECK_THROWS_AS(ReadMetrics(bad), ParseError);
}
