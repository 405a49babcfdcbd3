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

#include "mctses/bench.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <tuple>

#include "mctses/error.hpp"
#include "mctses/loss.hpp"
#include "mctses/parallel.hpp"
#include "mctses/train_az.hpp"
#include "mctses/worker_pool.hpp"

#ifndef MCTSES_VERSION
#define MCTSES_VERSION "unknown"
#endif

namespace mctses {

const char* const kMetricsHeader =
    "env,es,lr,trial,epoch,mean_score,value_loss,policy_loss,wall_ms";

namespace {

using Clock = std::chrono::steady_clock;

double ElapsedMs(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(',', start);
    out.push_back(line.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

double ParseDouble(const std::string& s, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("metrics: bad number '" + s + "'", line);
  }
  return v;
}

int ParseInt(const std::string& s, int line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("metrics: bad integer '" + s + "'", line);
  }
  return v;
}

nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return nullptr;
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception&) {
    return nullptr;
  }
}

void WriteJsonFile(const std::string& path, const nlohmann::json& doc) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ConfigError("cannot write manifest: " + path);
    out << doc.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

nlohmann::json ComparableConfig(const ExperimentConfig& config) {
  nlohmann::json j = ConfigToJson(config);
  j.erase("force");
  j.erase("threads");
  j.erase("timeout_ms");
  return j;
}

}  // namespace

std::string Version() { return MCTSES_VERSION; }

std::string ManifestPath(const std::string& metrics_path) {
  return metrics_path + ".manifest.json";
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string FormatRow(const MetricsRow& row) {
  std::string s = row.env;
  s += "," + std::to_string(row.es);
  s += "," + FormatDouble(row.lr);
  s += "," + std::to_string(row.trial);
  s += "," + std::to_string(row.epoch);
  s += "," + FormatDouble(row.mean_score);
  s += "," + FormatDouble(row.value_loss);
  s += "," + FormatDouble(row.policy_loss);
  s += "," + FormatDouble(row.wall_ms);
  return s;
}

std::vector<MetricsRow> ReadMetrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metrics file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("metrics: empty file " + path, 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricsHeader) {
    throw ParseError("metrics: inconsistent schema in " + path + ": '" + line + "'", 1);
  }
  std::vector<MetricsRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = SplitCsv(line);
    if (f.size() != 9) throw ParseError("metrics: expected 9 columns", lineno);
    MetricsRow r;
    r.env = f[0];
    r.es = ParseInt(f[1], lineno);
    r.lr = ParseDouble(f[2], lineno);
    r.trial = ParseInt(f[3], lineno);
    r.epoch = ParseInt(f[4], lineno);
    r.mean_score = ParseDouble(f[5], lineno);
    r.value_loss = ParseDouble(f[6], lineno);
    r.policy_loss = ParseDouble(f[7], lineno);
    r.wall_ms = ParseDouble(f[8], lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Configuration

EnvSpec BuildEnv(const ExperimentConfig& c) {
  if (c.env == "navigation" || c.env == "nav") {
    NavConfig nav;
    if (c.size > 0) nav.num_targets = c.size;
    if (c.horizon > 0) nav.horizon = c.horizon;
    return MakeNavigation(nav);
  }
  if (c.env == "sokoban") {
    if (c.levels.empty()) throw ConfigError("sokoban needs --levels <boxoban file>");
    SokobanConfig sok;
    sok.levels = std::make_shared<const LevelSet>(LoadBoxoban(c.levels));
    if (c.horizon > 0) sok.horizon = c.horizon;
    return MakeSokoban(std::move(sok));
  }
  if (c.env == "tsp") return MakeTsp(c.size > 0 ? c.size : 20);
  if (c.env == "vkcp") return MakeKCenter(c.size > 0 ? c.size : 40, c.k > 0 ? c.k : 20);
  if (c.env == "mdp") return MakeMaxDiversity(c.size > 0 ? c.size : 40, c.k > 0 ? c.k : 20);
  throw ConfigError("unknown environment '" + c.env + "'");
}

void ValidateExperiment(const ExperimentConfig& c) {
  Validate(BuildEnv(c));
  if (c.es.empty()) throw ConfigError("at least one --es value is required");
  for (int e : c.es) {
    if (e != 0 && e != 1) throw ConfigError("--es must be 0 or 1");
  }
  if (c.lrs.empty()) throw ConfigError("at least one --lr value is required");
  for (double lr : c.lrs) {
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("learning rates must be >= 0");
  }
  if (c.trials < 1) throw ConfigError("--trials must be >= 1");
  if (c.epochs < 0) throw ConfigError("--epochs must be >= 0");
  if (c.batch < 1) throw ConfigError("--batch must be >= 1");
  if (c.hidden < 1 || c.num_equivariant < 1) throw ConfigError("network sizes must be >= 1");
  ValidateSearchConfig(c.search);
  ParseOptimizerKind(c.optimizer);
  ValidateEsConfig(EsConfig{c.sigma, c.workers, c.episodes_per_eval, 0.0, c.centered_ranks});
  if (c.threads < 1) throw ConfigError("--threads must be >= 1");
  if (c.time_limit_s < 0.0) throw ConfigError("--time-limit must be >= 0");
  if (c.pool == "tcp") {
    const auto peers = ParsePeers(c.peers);
    if (static_cast<int>(peers.size()) != c.workers) {
      throw ConfigError("tcp pool: --peers lists " + std::to_string(peers.size()) +
                        " workers but --workers is " + std::to_string(c.workers));
    }
    if (c.rank < 0 || c.rank >= c.workers) throw ConfigError("tcp pool: --rank out of range");
    if (c.time_limit_s > 0.0) {
      throw ConfigError("tcp pool: wall-clock limits would desynchronize workers");
    }
  } else if (c.pool != "inproc") {
    throw ConfigError("--pool must be inproc or tcp");
  }
  if (c.out.empty()) throw ConfigError("--out must name a file");
}

nlohmann::json ConfigToJson(const ExperimentConfig& c) {
  return {
      {"env", c.env},
      {"size", c.size},
      {"k", c.k},
      {"horizon", c.horizon},
      {"levels", c.levels},
      {"es", c.es},
      {"lr", c.lrs},
      {"trials", c.trials},
      {"epochs", c.epochs},
      {"batch", c.batch},
      {"time_limit_s", c.time_limit_s},
      {"hidden", c.hidden},
      {"num_equivariant", c.num_equivariant},
      {"budget", c.search.budget},
      {"max_considered", c.search.max_considered},
      {"c_visit", c.search.c_visit},
      {"c_scale", c.search.c_scale},
      {"optimizer", c.optimizer},
      {"sigma", c.sigma},
      {"workers", c.workers},
      {"episodes_per_eval", c.episodes_per_eval},
      {"centered_ranks", c.centered_ranks},
      {"pool", c.pool},
      {"rank", c.rank},
      {"peers", c.peers},
      {"timeout_ms", c.timeout_ms},
      {"seed", c.seed},
      {"threads", c.threads},
      {"out", c.out},
      {"params_out", c.params_out},
      {"force", c.force},
      {"wall_time", c.wall_time},
  };
}

// ---------------------------------------------------------------------------
// Running

RunOutcome RunExperiment(const ExperimentConfig& config, const RowCallback& on_row) {
  ValidateExperiment(config);
  const EnvSpec env = BuildEnv(config);
  const bool tcp = config.pool == "tcp";
  const bool writer = !tcp || config.rank == 0;
  const std::string manifest_path = ManifestPath(config.out);

  OptimizerConfig optimizer;
  optimizer.kind = ParseOptimizerKind(config.optimizer);

  nlohmann::json manifest = {
      {"tool", "mctses"},
      {"version", Version()},
      {"status", "running"},
      {"config", ComparableConfig(config)},
      {"epoch_semantics",
       "row e reports episodes played with the parameters before update e; "
       "es=1 rows use fresh unperturbed episodes with the same seeds as es=0"},
  };

  std::ofstream csv;
  if (writer) {
    const nlohmann::json previous = ReadJsonFile(manifest_path);
    if (!config.force && previous.is_object() && std::filesystem::exists(config.out)) {
      const bool same = previous.value("config", nlohmann::json()) == manifest["config"];
      if (same && previous.value("status", "") == "complete") return RunOutcome::kSkipped;
      if (!same) {
        throw ConfigError(config.out + " was produced by a different config; use --force");
      }
      std::cerr << "mctses: " << config.out << " is incomplete; rerunning from scratch\n";
    }
    csv.open(config.out, std::ios::trunc);
    if (!csv) throw ConfigError("cannot write metrics file: " + config.out);
    csv << kMetricsHeader << '\n' << std::flush;
  }

  const NetDims dims = DimsFor(Observe(Reset(env, 0)), config.hidden, config.num_equivariant);
  std::vector<std::uint64_t> trial_seeds;
  for (int t = 0; t < config.trials; ++t) {
    trial_seeds.push_back(DeriveSeed(config.seed, {static_cast<std::uint64_t>(t)}));
  }
  manifest["seeds"] = {{"master", config.seed}, {"trials", trial_seeds}};
  manifest["param_count"] = ParamCount(dims);
  if (writer) WriteJsonFile(manifest_path, manifest);

  std::unique_ptr<TcpPool> tcp_pool;
  if (tcp) {
    tcp_pool = std::make_unique<TcpPool>(config.rank, ParsePeers(config.peers),
                                         std::chrono::milliseconds(config.timeout_ms));
  }

  std::size_t rows_written = 0;
  auto emit = [&](MetricsRow row) {
    if (!writer) return;
    csv << FormatRow(row) << '\n' << std::flush;
    ++rows_written;
    if (on_row) on_row(row);
  };

  std::vector<double> last_params;
  for (int trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t trial_seed = trial_seeds[trial];
    const std::vector<double> x0 = FlattenValues(InitParams(DeriveSeed(trial_seed, {0}), dims));
    for (int es : config.es) {
      for (std::size_t li = 0; li < config.lrs.size(); ++li) {
        const double lr = config.lrs[li];
        const auto run_start = Clock::now();
        auto out_of_time = [&] {
          return config.time_limit_s > 0.0 && ElapsedMs(run_start) > 1000.0 * config.time_limit_s;
        };
        MetricsRow row;
        row.env = env.name();
        row.es = es;
        row.lr = lr;
        row.trial = trial;

        if (es == 0) {
          AzConfig az{config.batch, lr, config.search, optimizer, config.threads};
          OptState opt = InitOptimizer(x0);
          for (int epoch = 0; epoch < config.epochs && !out_of_time(); ++epoch) {
            const auto t0 = Clock::now();
            const BatchStats s = AzEpoch(env, dims, az, opt, trial_seed, epoch);
            row.epoch = epoch;
            row.mean_score = s.mean_score;
            row.value_loss = s.value_loss;
            row.policy_loss = s.policy_loss;
            row.wall_ms = config.wall_time ? ElapsedMs(t0) : 0.0;
            emit(row);
          }
          last_params = opt.x;
          continue;
        }

        EsConfig es_config{config.sigma, config.workers, config.episodes_per_eval, lr,
                           config.centered_ranks};
        const FitnessFn fitness =
            MakeEpisodeFitness(dims, env, config.search, config.episodes_per_eval);
        // Perturbation stream for this run; shared by every worker.
        const std::uint64_t es_seed = DeriveSeed(trial_seed, {1, li});
        const int local_workers = tcp ? 1 : config.workers;
        std::vector<OptState> states(local_workers, InitOptimizer(x0));
        auto hub = std::make_shared<InProcessHub>(config.workers,
                                                  std::chrono::milliseconds(config.timeout_ms));
        for (int epoch = 0; epoch < config.epochs && !out_of_time(); ++epoch) {
          const auto t0 = Clock::now();
          if (writer) {
            const NetParams params = Unflatten(states[0].x, dims);
            const auto episodes = PlayEpisodes(env, params, config.search, config.batch,
                                               trial_seed, epoch, config.threads);
            const BatchStats s = Summarize(episodes, params);
            row.mean_score = s.mean_score;
            row.value_loss = s.value_loss;
            row.policy_loss = s.policy_loss;
          }
          if (tcp) {
            EsIteration(states[0], fitness, es_config, optimizer, *tcp_pool, es_seed,
                        static_cast<std::uint64_t>(epoch));
          } else {
            ParallelFor(local_workers, local_workers, [&](int r) {
              InProcessPool pool(hub, r);
              EsIteration(states[r], fitness, es_config, optimizer, pool, es_seed,
                          static_cast<std::uint64_t>(epoch));
            });
            for (int r = 1; r < local_workers; ++r) {
              if (states[r] != states[0]) {
                throw ProtocolError("worker " + std::to_string(r) + " diverged at epoch " +
                                    std::to_string(epoch));
              }
            }
          }
          row.epoch = epoch;
          row.wall_ms = config.wall_time ? ElapsedMs(t0) : 0.0;
          emit(row);
        }
        last_params = states[0].x;
      }
    }
  }

  if (!config.params_out.empty() && !last_params.empty()) {
    const std::string path =
        tcp ? config.params_out + ".rank" + std::to_string(config.rank) : config.params_out;
    SaveParams(Unflatten(last_params, dims), path);
  }
  if (writer) {
    manifest["status"] = "complete";
    manifest["rows"] = rows_written;
    WriteJsonFile(manifest_path, manifest);
  }
  return RunOutcome::kCompleted;
}

// ---------------------------------------------------------------------------
// Aggregation

std::pair<double, double> MeanSem(std::vector<double> values) {
  if (values.empty()) throw ContractError("aggregate: empty group");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() == 1) return {mean, 0.0};
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / (n - 1.0)) / std::sqrt(n)};
}

std::vector<SummaryRow> Aggregate(const std::vector<MetricsRow>& rows) {
  using Key = std::tuple<std::string, int, double, int>;
  std::map<Key, std::vector<const MetricsRow*>> groups;
  std::set<std::tuple<std::string, int, double, int, int>> seen;
  for (const auto& r : rows) {
    if (!seen.insert({r.env, r.es, r.lr, r.trial, r.epoch}).second) {
      throw ContractError("aggregate: duplicate row for env=" + r.env +
                          " es=" + std::to_string(r.es) + " lr=" + FormatDouble(r.lr) +
                          " trial=" + std::to_string(r.trial) +
                          " epoch=" + std::to_string(r.epoch));
    }
    groups[{r.env, r.es, r.lr, r.epoch}].push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, members] : groups) {
    SummaryRow s;
    std::tie(s.env, s.es, s.lr, s.epoch) = key;
    s.trials = static_cast<int>(members.size());
    std::vector<double> score, value, policy;
    for (const MetricsRow* m : members) {
      score.push_back(m->mean_score);
      value.push_back(m->value_loss);
      policy.push_back(m->policy_loss);
    }
    std::tie(s.score_mean, s.score_sem) = MeanSem(score);
    std::tie(s.value_loss_mean, s.value_loss_sem) = MeanSem(value);
    std::tie(s.policy_loss_mean, s.policy_loss_sem) = MeanSem(policy);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SummaryRow> AggregateFiles(const std::vector<std::string>& paths) {
  std::vector<MetricsRow> all;
  for (const auto& p : paths) {
    auto rows = ReadMetrics(p);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  return Aggregate(all);
}

void WriteSummary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "env,es,lr,epoch,trials,score_mean,score_sem,value_loss_mean,value_loss_sem,"
         "policy_loss_mean,policy_loss_sem\n";
  for (const auto& s : rows) {
    out << s.env << ',' << s.es << ',' << FormatDouble(s.lr) << ',' << s.epoch << ','
        << s.trials << ',' << FormatDouble(s.score_mean) << ',' << FormatDouble(s.score_sem)
        << ',' << FormatDouble(s.value_loss_mean) << ',' << FormatDouble(s.value_loss_sem)
        << ',' << FormatDouble(s.policy_loss_mean) << ',' << FormatDouble(s.policy_loss_sem)
        << '\n';
  }
}

}  // namespace mctses
