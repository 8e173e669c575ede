import json
import math
import os
from pathlib import Path

import pytest

import mlmc_adequacy as mla

DATA = Path(os.environ.get("ADEQUACY_DATA_DIR", mla.default_data_dir()))


def composite_config(**overrides):
    cfg = {
        "schema_version": 1,
        "study": "composite",
        "models": ["hl1", "hl2"],
        "estimator": "MLMC-with-expectation",
        "n0": 20,
        "runs": 2,
        "t_star": 0.05,
        "seed": 11,
        "composite": {"network": "rts/rts24.net", "rating_scale": 0.8},
        "cost_model": {"mode": "nominal", "tau": [5e-6], "analytic_seconds": 1e-3},
    }
    cfg.update(overrides)
    return cfg


def test_run_experiment_returns_results_record():
    res = mla.run_experiment(composite_config(), data_dir=DATA)
    ids = [m["id"] for m in res["measures"]]
    assert ids == ["PLC", "EPNS"]
    epns = res["measures"][1]
    assert epns["estimate"] > 0
    assert epns["std_error"] > 0
    assert mla.check_results(res) == []
    again = mla.run_experiment(composite_config(), data_dir=DATA)
    assert json.dumps(res, sort_keys=True) == json.dumps(again, sort_keys=True)


def test_config_file_and_seed_override(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(composite_config()))
    a = mla.run_experiment(str(path), data_dir=DATA, seed=1)
    b = mla.run_experiment(str(path), data_dir=DATA, seed=2)
    assert a["config"]["seed"] == 1
    assert a["measures"][1]["estimate"] != b["measures"][1]["estimate"]


def test_bad_config_raises():
    with pytest.raises(mla.ConfigError, match="estimator"):
        mla.validate_config(composite_config(estimator="QMC"), data_dir=DATA)


def test_copt_against_brute_force():
    caps = [10.0, 20.0, 25.0]
    avail = [0.9, 0.8, 0.95]
    copt = mla.Copt(caps, avail, 1.0)
    assert math.isclose(sum(copt.pmf), 1.0, rel_tol=1e-14)
    below, short = 0.0, 0.0
    for mask in range(8):
        cap = sum(c for i, c in enumerate(caps) if mask >> i & 1)
        p = math.prod(a if mask >> i & 1 else 1 - a for i, a in enumerate(avail))
        if cap < 33.5:
            below += p
            short += p * (33.5 - cap)
    assert math.isclose(copt.prob_below(33.5), below, rel_tol=1e-12)
    assert math.isclose(copt.expected_shortfall(33.5), short, rel_tol=1e-12)


def test_exact_snapshot_risk():
    risk = mla.copt_convolve(str(DATA / "rts" / "rts24.net"))
    assert 0 < risk["PLC"] < 0.01
    assert risk["EPNS"] > 0
    assert mla.copt_convolve("rts/rts24.net", data_dir=str(DATA)) == risk


def test_lp_and_allocation():
    res = mla.solve_lp([-3.0, -5.0], [[1, 0], [0, 2], [3, 2]], [-math.inf] * 3, [4, 12, 18])
    assert res["status"] == "optimal"
    assert math.isclose(res["objective"], -36.0)
    plan = mla.optimal_allocation([0.0, 4.0, 1.0], [1.0, 1.0, 4.0], 101.0)
    assert plan["counts"] == [1, 50, 13]
    assert mla.estimate_format(0.238, 0.024) == "0.238(24)"
    assert mla.speed_metric(2.0, 0.01, 4.0) == pytest.approx(100.0)


def test_rng_is_counter_based():
    a = mla.RngStream(1, 2, 3)
    b = mla.RngStream(1, 2, 3)
    assert [a.uniform() for _ in range(5)] == [b.uniform() for _ in range(5)]
