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

import math

import pytest

import mctses


def small_config(tmp_path, **overrides):
    c = mctses.ExperimentConfig()
    c.env = "tsp"
    c.size = 5
    c.es = [0, 1]
    c.lrs = [0.01]
    c.epochs = 2
    c.batch = 2
    c.workers = 2
    c.out = str(tmp_path / "m.csv")
    for key, value in overrides.items():
        setattr(c, key, value)
    return c


def test_header_columns():
    assert mctses.METRICS_HEADER.split(",") == [
        "env", "es", "lr", "trial", "epoch",
        "mean_score", "value_loss", "policy_loss", "wall_ms",
    ]


def test_run_read_and_skip(tmp_path):
    c = small_config(tmp_path)
    seen = []
    assert mctses.run_experiment(c, seen.append) == "completed"
    rows = mctses.read_metrics(c.out)
    assert len(rows) == 4 and len(seen) == 4
    assert {r["es"] for r in rows} == {0, 1}
    assert all(-2 * 5 * math.sqrt(2) <= r["mean_score"] <= 0 for r in rows)
    assert all(r["wall_ms"] == 0 for r in rows)
    assert mctses.run_experiment(c) == "skipped"


def test_reproducible(tmp_path):
    a = small_config(tmp_path, out=str(tmp_path / "a.csv"))
    b = small_config(tmp_path, out=str(tmp_path / "b.csv"))
    mctses.run_experiment(a)
    mctses.run_experiment(b)
    assert open(a.out).read() == open(b.out).read()


def test_aggregate(tmp_path):
    c = small_config(tmp_path, trials=2)
    mctses.run_experiment(c)
    summary = mctses.aggregate_files([c.out])
    assert len(summary) == 4
    assert all(s["trials"] == 2 for s in summary)


def test_mean_sem():
    assert mctses.mean_sem([1.0, 2.0, 3.0]) == pytest.approx((2.0, 1.0 / math.sqrt(3)))


def test_invalid_config(tmp_path):
    c = small_config(tmp_path, env="chess")
    with pytest.raises(mctses.ConfigError):
        mctses.validate(c)
    with pytest.raises(ValueError):
        mctses.run_experiment(c)
    assert not (tmp_path / "m.csv").exists()
