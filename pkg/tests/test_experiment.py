import json

import numpy as np
import pytest

from phasetour.errors import InvalidArgument, ProvenanceError
from phasetour.experiment import (ExperimentConfig, load_config, load_costs, load_result, load_ties,
                                  reproduce, run_experiment, tie_distribution, verify_result)


def cfg(tmp_path, **kw):
    base = dict(m=2, n_per_axis=3, output_dir=str(tmp_path))
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(InvalidArgument):
        ExperimentConfig(m=3).validate()
    with pytest.raises(InvalidArgument):
        ExperimentConfig(regime="bogus").validate()
    with pytest.raises(InvalidArgument):
        ExperimentConfig(tie_tol=0).validate()


def test_config_from_yaml(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("m: 4\nn: 3\ncost: energy\nsamples: 77\n")
    c = load_config(p)
    assert (c.m, c.n_per_axis, c.cost_kind, c.sample_count) == (4, 3, "energy", 77)


def test_hashed_config_ignores_location(tmp_path):
    a = cfg(tmp_path / "a").hashed_dict()
    b = cfg(tmp_path / "b", workers=4).hashed_dict()
    assert a == b


def test_sample_run_writes_verified_files(tmp_path):
    path, man = run_experiment(cfg(tmp_path, sample_count=500))
    assert path.name == f"result_{man['result_id']}.json"
    loaded = load_result(path)
    verify_result(loaded)
    costs = load_costs(loaded)
    assert costs.size == 500
    assert costs.min() == man["best_cost"]
    for name in man["files"].values():
        assert (tmp_path / name).exists()


def test_identical_runs_share_ids(tmp_path):
    _, a = run_experiment(cfg(tmp_path / "a", regime="nn", runs=3))
    _, b = run_experiment(cfg(tmp_path / "b", regime="nn", runs=3))
    assert a["result_id"] == b["result_id"]
    assert a["files"] == b["files"]


def test_nn_run_ties(tmp_path):
    _, man = run_experiment(cfg(tmp_path, regime="nn", runs=2))
    ties = load_ties(load_result(tmp_path / f"result_{man['result_id']}.json"))
    assert ties.size == 18 * 8
    d = tie_distribution(ties)
    assert d["max"] == man["max_tie"]
    assert sum(d["counts"].values()) == ties.size


def test_compare_with_by_id(tmp_path):
    _, samp = run_experiment(cfg(tmp_path, sample_count=2000))
    _, nn = run_experiment(cfg(tmp_path, regime="nn", compare_with=samp["result_id"]))
    assert nn["config"]["compare_with"] == samp["result_id"]
    z = json.loads((tmp_path / nn["files"]["zreport"]).read_text())
    assert z["n"] == 2000 and z["z"] < 0


def test_tampered_manifest_rejected(tmp_path):
    path, _ = run_experiment(cfg(tmp_path, sample_count=100))
    man = json.loads(path.read_text())
    man["best_cost"] += 1
    path.write_text(json.dumps(man))
    with pytest.raises(ProvenanceError):
        load_result(path)


def test_reproduce_round_trip(tmp_path):
    path, _ = run_experiment(cfg(tmp_path, regime="nn", runs=2, search_seed=11))
    report = reproduce(path)
    assert all(a == b for a, b in report.values())


def test_reproduce_detects_tampered_costs(tmp_path):
    path, man = run_experiment(cfg(tmp_path, sample_count=100))
    f = tmp_path / man["files"]["costs"]
    f.write_bytes(f.read_bytes().replace(b"\n1,", b"\n2,", 1) + b"0,1\n")
    with pytest.raises(ProvenanceError):
        reproduce(path)


def test_exhaustive_regime(tmp_path):
    _, man = run_experiment(cfg(tmp_path, regime="exhaustive", bins=20))
    assert man["n_runs"] == 362_880
    assert np.isclose(man["moments"]["min"], man["best_cost"])
