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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mctses/bench.hpp"
#include "mctses/error.hpp"

namespace py = pybind11;
using namespace mctses;

namespace {

py::dict RowToDict(const MetricsRow& r) {
  py::dict d;
  d["env"] = r.env;
  d["es"] = r.es;
  d["lr"] = r.lr;
  d["trial"] = r.trial;
  d["epoch"] = r.epoch;
  d["mean_score"] = r.mean_score;
  d["value_loss"] = r.value_loss;
  d["policy_loss"] = r.policy_loss;
  d["wall_ms"] = r.wall_ms;
  return d;
}

py::dict SummaryToDict(const SummaryRow& r) {
  py::dict d;
  d["env"] = r.env;
  d["es"] = r.es;
  d["lr"] = r.lr;
  d["epoch"] = r.epoch;
  d["trials"] = r.trials;
  d["score_mean"] = r.score_mean;
  d["score_sem"] = r.score_sem;
  d["value_loss_mean"] = r.value_loss_mean;
  d["value_loss_sem"] = r.value_loss_sem;
  d["policy_loss_mean"] = r.policy_loss_mean;
  d["policy_loss_sem"] = r.policy_loss_sem;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MCTS planning agents trained by planning loss or evolution strategies";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_RuntimeError);
  py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);

  py::class_<SearchConfig>(m, "SearchConfig")
      .def(py::init<>())
      .def_readwrite("budget", &SearchConfig::budget)
      .def_readwrite("max_considered", &SearchConfig::max_considered)
      .def_readwrite("c_visit", &SearchConfig::c_visit)
      .def_readwrite("c_scale", &SearchConfig::c_scale);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("env", &ExperimentConfig::env)
      .def_readwrite("size", &ExperimentConfig::size)
      .def_readwrite("k", &ExperimentConfig::k)
      .def_readwrite("horizon", &ExperimentConfig::horizon)
      .def_readwrite("levels", &ExperimentConfig::levels)
      .def_readwrite("es", &ExperimentConfig::es)
      .def_readwrite("lrs", &ExperimentConfig::lrs)
      .def_readwrite("trials", &ExperimentConfig::trials)
      .def_readwrite("epochs", &ExperimentConfig::epochs)
      .def_readwrite("batch", &ExperimentConfig::batch)
      .def_readwrite("time_limit_s", &ExperimentConfig::time_limit_s)
      .def_readwrite("hidden", &ExperimentConfig::hidden)
      .def_readwrite("num_equivariant", &ExperimentConfig::num_equivariant)
      .def_readwrite("search", &ExperimentConfig::search)
      .def_readwrite("optimizer", &ExperimentConfig::optimizer)
      .def_readwrite("sigma", &ExperimentConfig::sigma)
      .def_readwrite("workers", &ExperimentConfig::workers)
      .def_readwrite("episodes_per_eval", &ExperimentConfig::episodes_per_eval)
      .def_readwrite("centered_ranks", &ExperimentConfig::centered_ranks)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def_readwrite("out", &ExperimentConfig::out)
      .def_readwrite("params_out", &ExperimentConfig::params_out)
      .def_readwrite("force", &ExperimentConfig::force)
      .def_readwrite("wall_time", &ExperimentConfig::wall_time)
      .def("to_json", [](const ExperimentConfig& c) { return ConfigToJson(c).dump(); });

  m.def("validate", &ValidateExperiment, py::arg("config"));
  m.def(
      "run_experiment",
      [](const ExperimentConfig& config, const std::function<void(py::dict)>& on_row) {
        RowCallback cb;
        if (on_row) {
          cb = [&on_row](const MetricsRow& row) {
            py::gil_scoped_acquire gil;
            on_row(RowToDict(row));
          };
        }
        RunOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = RunExperiment(config, cb);
        }
        return outcome == RunOutcome::kSkipped ? "skipped" : "completed";
      },
      py::arg("config"), py::arg("on_row") = nullptr,
      "Runs the experiment; returns 'completed' or 'skipped'.");
  m.def("read_metrics", [](const std::string& path) {
    py::list out;
    for (const auto& r : ReadMetrics(path)) out.append(RowToDict(r));
    return out;
  });
  m.def("aggregate_files", [](const std::vector<std::string>& paths) {
    py::list out;
    for (const auto& r : AggregateFiles(paths)) out.append(SummaryToDict(r));
    return out;
  });
  m.def("mean_sem", &MeanSem);
  m.def("manifest_path", &ManifestPath);
  m.attr("METRICS_HEADER") = kMetricsHeader;
  m.attr("__version__") = Version();
}
