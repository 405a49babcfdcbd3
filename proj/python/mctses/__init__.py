# Copyright 2026 The mctses Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""MCTS planning agents trained by planning loss or evolution strategies."""

from ._core import (
    METRICS_HEADER,
    ConfigError,
    ContractError,
    ExperimentConfig,
    ParseError,
    ProtocolError,
    SearchConfig,
    __version__,
    aggregate_files,
    manifest_path,
    mean_sem,
    read_metrics,
    run_experiment,
    validate,
)

__all__ = [
    "METRICS_HEADER",
    "ConfigError",
    "ContractError",
    "ExperimentConfig",
    "ParseError",
    "ProtocolError",
    "SearchConfig",
    "__version__",
    "aggregate_files",
    "manifest_path",
    "mean_sem",
    "read_metrics",
    "run_experiment",
    "validate",
]
