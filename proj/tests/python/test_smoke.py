#
# Copyright 2026 The fedenv Authors
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

import json
import math

import numpy as np
import pytest

import fedenv

scipy_optimize = pytest.importorskip("scipy.optimize")


def basis(n, L):
    t = np.arange(n) / n
    cols = [np.ones(n)]
    cols += [np.cos(2 * np.pi * k * t) for k in range(1, L + 1)]
    cols += [np.sin(2 * np.pi * k * t) for k in range(1, L + 1)]
    return np.stack(cols, axis=1)


def power_law_samples(p, mode, k_max, n, seed):
    return fedenv.sample(fedenv.synth_power_law(1.0, p, mode, k_max, seed), n)


def test_projection_matches_least_squares():
    rng = np.random.default_rng(1)
    f = rng.normal(size=40)
    coeffs, *_ = np.linalg.lstsq(basis(40, 5), f, rcond=None)
    assert np.allclose(fedenv.project(f.tolist(), 5), coeffs, atol=1e-12)
    with pytest.raises(fedenv.RankDeficientError):
        fedenv.project(f.tolist(), 20)


@pytest.mark.parametrize("seed", [0, 3])
def test_l1_envelope_matches_highs(seed):
    n, L = 512, 2
    f = np.array(power_law_samples(2.0, "nonneg", 50, n, seed))
    A = basis(n, L)
    c = np.zeros(2 * L + 1)
    c[0] = 1.0
    res = scipy_optimize.linprog(c, A_ub=-A, b_ub=-f, bounds=[(None, None)] * (2 * L + 1),
                                 method="highs")
    assert res.status == 0
    sol = fedenv.envelope(f.tolist(), L, "l1")
    assert sol["status"] == "Optimal"
    a0 = fedenv.project(f.tolist(), L)[0]
    assert abs(sol["sa1"] - (res.fun - a0)) < 1e-7
    assert abs(sol["sa1"] - 0.3520739533) < 1e-8
    # Well below twice the tail sum.
    tail = 2 * sum(1 / k**2 for k in range(3, 51))
    assert sol["sa1"] < tail


def test_l2_envelope_is_feasible_and_beats_naive():
    f = power_law_samples(2.0, "signed", 100, 400, 11)
    l2 = fedenv.envelope(f, 5, "l2")
    naive = fedenv.envelope(f, 5, "naive")
    env = np.array(fedenv.sample(l2["coeffs"], 400))
    assert np.all(env >= np.array(f) - 1e-6 * (1 + np.max(np.abs(f))))
    assert l2["sa2"] <= naive["sa2"] + 1e-12


def test_subsampled_rank_deficiency():
    f = power_law_samples(2.0, "signed", 100, 720, 2)
    assert fedenv.envelope(f, 45, "l1", 8)["status"] == "RankDeficient"
    assert fedenv.envelope(f, 44, "l1", 8)["status"] == "Optimal"


def test_analytics():
    assert fedenv.quantile([3.0, 1.0, 2.0, 4.0], 0.5) == 2.0
    assert fedenv.wasserstein_1d([0.0, 1.0], [0.0, 0.0, 1.0, 1.0]) == 0.0
    assert math.isclose(fedenv.wasserstein_1d([0.0, 1.0], [2.0, 3.0]), 2.0)
    assert fedenv.violation_stats([1.0, 2.0, -3.0], [1.0, 2.0, 2.0]) == (1, 100 / 3, 5.0)
    assert fedenv.comm_cost_bytes(360, 1) == 2884


def test_bounds_and_verification():
    assert fedenv.ratio_bound(0.5, 7) == 1.0
    lo, hi = fedenv.sa2_theory_bounds(2.0, 10)
    assert lo < hi
    report = json.loads(fedenv.verify_bounds("theorem2", 2, 2.0, [5], seed=4))
    assert report["theorem"] == "theorem2"
    assert all(c["ok"] for c in report["checks"] if c["hard"])


def test_dataset_round_trip(tmp_path):
    path = str(tmp_path / "d.csv")
    fedenv.synthetic_dataset(path, users=4, days=31, seed=5, gap_every=3)
    signals, start, skipped = fedenv.load_synchronized(path)
    assert skipped == 0
    assert start == "2024-01-01 00:00"
    assert sorted(signals) == ["user002", "user003"]
    assert all(len(v) == 720 for v in signals.values())
    rows = fedenv.experiment_tradeoff(signals, [1, 36, 400], ["l1", "l2"])
    assert [(r["L"], r["scheme"]) for r in rows] == [
        (1, "L1Opt"), (1, "L2Opt"), (36, "L1Opt"), (36, "L2Opt"), (359, "L1Opt"), (359, "L2Opt")]
    assert rows[-1]["requested_L"] == 400
    assert all(r["viol_count"] == 0 for r in rows)
    sub = fedenv.experiment_subsampling(signals, [10, 45], [8])
    assert [r["status"] for r in sub] == ["Optimal", "RankDeficient"]
