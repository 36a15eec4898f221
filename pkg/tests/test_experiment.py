import json

import numpy as np
import pytest

from qubo_bmf.datagen import generate_exact_rank
from qubo_bmf.experiment import ExperimentConfig, external_report, run_experiment
from qubo_bmf.solve import AnnealConfig


def test_baseline_all_ones():
    rep = run_experiment(ExperimentConfig(method="baseline", r=1, trials=1), np.ones((10, 10)))
    assert rep.mean_error == 0


def test_qubo_f1_als_exact_rank_two():
    A, _, _ = generate_exact_rank(8, 8, 2, seed=21)
    rep = run_experiment(ExperimentConfig(method="qubo_f1_als", r=2, trials=10), A)
    assert rep.mean_error == 0
    assert [t.seed for t in rep.records] == list(range(1, 11))


def test_reports_are_byte_identical():
    A, _, _ = generate_exact_rank(8, 6, 2, seed=3)
    cfg = ExperimentConfig(method="qubo_f1", r=2, trials=3,
                           anneal=AnnealConfig(total_iterations=5000))
    a = json.dumps(run_experiment(cfg, A).to_json(), sort_keys=True)
    b = json.dumps(run_experiment(cfg, A, workers=2).to_json(), sort_keys=True)
    assert a == b


@pytest.mark.parametrize("method", ["qubo_f1", "qubo_f2", "thresholded", "baseline"])
def test_sampled_methods_run(method):
    A, _, _ = generate_exact_rank(40, 6, 2, seed=1)
    cfg = ExperimentConfig(method=method, r=2, trials=2, sample_size=8,
                           anneal=AnnealConfig(total_iterations=20_000))
    rep = run_experiment(cfg, A)
    assert len(rep.records) == 2
    assert all(0 <= e <= 2 for e in rep.errors)
    assert rep.records[0].U.shape == (40, 2)


def test_config_round_trip_and_validation():
    cfg = ExperimentConfig(method="qubo_f2", r=3, trials=2, seeds=(5, 9))
    assert ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg
    with pytest.raises(ValueError):
        ExperimentConfig(method="nope")
    with pytest.raises(ValueError):
        ExperimentConfig(trials=2, seeds=(1,))
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"bogus": 1})


def test_guards():
    with pytest.raises(ValueError):
        run_experiment(ExperimentConfig(method="baseline"), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        run_experiment(ExperimentConfig(method="baseline", r=4), np.ones((3, 3)))


def test_external_report():
    A = np.eye(2, dtype=np.int8)
    rep = external_report(A, [(np.eye(2), np.eye(2)), (np.zeros((2, 2)), np.zeros((2, 2)))], "penalized")
    assert rep.errors == [0.0, 1.0] and rep.method == "penalized" and rep.r == 2
