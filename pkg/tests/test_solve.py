import itertools
import json

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from qubo_bmf.datagen import generate_exact_rank
from qubo_bmf.qubo import QuboProblem, build_f1, energy
from qubo_bmf.solve import (
    AnnealConfig,
    FieldState,
    SymmetricQubo,
    all_minimizers,
    anneal,
    brute_force,
    delta_energy,
)


def random_problem(rng, n, density=0.5, integer=True):
    Q = rng.integers(-5, 6, size=(n, n)).astype(float) if integer else rng.normal(size=(n, n))
    Q *= rng.random((n, n)) < density
    return QuboProblem(sp.csr_matrix(Q), float(rng.integers(-3, 4)))


def exhaustive(q):
    best, arg = None, None
    for bits in itertools.product((0, 1), repeat=q.n_vars):
        e = energy(q, np.array(bits))
        if best is None or e < best:
            best, arg = e, bits
    return best, arg


def test_positive_diagonal_gives_zero_state():
    q = QuboProblem(sp.diags([1.0, 2.0, 0.5]).tocsr(), 4.0)
    res = brute_force(q)
    assert res.best_assignment.tolist() == [0, 0, 0] and res.best_energy == 4.0


def test_brute_force_tie_break_little_endian():
    # (1,0), (0,1) and (1,1) all reach -1; (1,0) is code 1
    q = QuboProblem(sp.csr_matrix(np.array([[-1.0, 1.0], [0.0, -1.0]])), 0.0)
    res = brute_force(q)
    assert res.best_energy == -1 and res.best_assignment.tolist() == [1, 0]


def test_brute_force_matches_product_enumeration(rng):
    for n in (1, 3, 6, 9):
        q = random_problem(rng, n)
        best, _ = exhaustive(q)
        res = brute_force(q)
        assert res.best_energy == best
        assert energy(q, res.best_assignment) == best


def test_brute_force_cap():
    q = QuboProblem(sp.csr_matrix((5, 5)), 0.0)
    with pytest.raises(ValueError):
        brute_force(q, cap=4)


def test_all_minimizers(rng):
    q = random_problem(rng, 8)
    mins, e = all_minimizers(q)
    assert e == brute_force(q).best_energy
    assert all(energy(q, x) == e for x in mins)


@given(st.integers(0, 10_000))
def test_delta_matches_full_recompute(seed):
    rng = np.random.default_rng(seed)
    q = random_problem(rng, 10, integer=False)
    x = rng.integers(0, 2, 10)
    base = energy(q, x)
    for i in range(10):
        y = x.copy()
        y[i] ^= 1
        assert delta_energy(q, x, i) == pytest.approx(energy(q, y) - base, abs=1e-9)


def test_delta_at_zero_is_diagonal(rng):
    q = random_problem(rng, 7)
    for i in range(7):
        assert delta_energy(q, np.zeros(7, dtype=int), i) == q.dense()[i, i]


def test_double_flip_cancels(rng):
    q = random_problem(rng, 12, integer=False)
    state = FieldState(SymmetricQubo(q), rng.integers(0, 2, 12))
    for i in rng.integers(0, 12, 30):
        d1 = state.flip(int(i))
        d2 = state.flip(int(i))
        assert d1 + d2 == pytest.approx(0, abs=1e-12)
    assert state.energy == pytest.approx(energy(q, state.x))


def test_delta_index_error(rng):
    q = random_problem(rng, 3)
    with pytest.raises(IndexError):
        delta_energy(q, np.zeros(3, dtype=int), 3)


def test_symmetrized_model_on_1000_pairs(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 12))
        q = random_problem(rng, n, integer=False)
        x = rng.integers(0, 2, n)
        Q = q.dense()
        manual = q.offset + sum(Q[i, i] * x[i] for i in range(n))
        manual += sum((Q[i, j] + Q[j, i]) * x[i] * x[j] for i in range(n) for j in range(i + 1, n))
        e = SymmetricQubo(q).energy(x)
        assert e == pytest.approx(manual, abs=1e-9)
        assert e == pytest.approx(energy(q, x), abs=1e-9)


def test_single_variable_downhill():
    q = QuboProblem(sp.csr_matrix(np.array([[-1.0]])), 2.0)
    for seed in range(5):
        res = anneal(q, AnnealConfig(total_iterations=100, replicas=1, seed=seed))
        assert res.best_assignment.tolist() == [1] and res.best_energy == 1.0


def test_anneal_deterministic(rng):
    q = random_problem(rng, 30, integer=False)
    cfg = AnnealConfig(total_iterations=20_000, replicas=4, seed=7)
    a, b = anneal(q, cfg), anneal(q, cfg)
    assert np.array_equal(a.best_assignment, b.best_assignment)
    assert a.best_energy == b.best_energy and a.iterations_used == b.iterations_used
    assert a.extra == b.extra


def test_anneal_energy_is_exact_and_no_worse_than_start(rng):
    for _ in range(10):
        q = random_problem(rng, 15, integer=False)
        res = anneal(q, AnnealConfig(total_iterations=3000, replicas=2, seed=int(rng.integers(1000))))
        assert res.best_energy == energy(q, res.best_assignment)
        assert res.best_energy <= q.offset  # start is the all-zero state


def test_brute_force_lower_bounds_anneal(rng):
    for _ in range(10):
        q = random_problem(rng, 10)
        b = brute_force(q).best_energy
        a = anneal(q, AnnealConfig(total_iterations=5000, seed=int(rng.integers(1000)))).best_energy
        assert b <= a


def test_parallel_tempering_smoke():
    wins = 0
    for k in range(20):
        rng = np.random.default_rng(1000 + k)
        J = rng.normal(size=(60, 60))
        q = QuboProblem(sp.csr_matrix(np.triu(J)), 0.0)
        budget = 30_000
        single = anneal(q, AnnealConfig(total_iterations=budget, replicas=1, seed=k))
        multi = anneal(q, AnnealConfig(total_iterations=budget, replicas=8, seed=k))
        wins += multi.best_energy <= single.best_energy
    assert wins >= 10


def test_exact_rank_and_early_stop():
    A, _, _ = generate_exact_rank(8, 8, 1, seed=3)
    q = build_f1(A, 1, 1.0)
    res = anneal(q, AnnealConfig(seed=1, target_energy=0.0))
    assert res.reached_target and res.best_energy == 0
    assert res.iterations_used < AnnealConfig().total_iterations


def test_config_validation():
    for bad in (
        dict(total_iterations=0),
        dict(replicas=0),
        dict(temp_hi=-1.0),
        dict(temp_hi=0.1, temp_lo=1.0),
        dict(exchange_interval=0),
    ):
        with pytest.raises(ValueError):
            AnnealConfig(**bad)


def test_solve_result_json(rng):
    q = random_problem(rng, 4)
    doc = json.loads(json.dumps(brute_force(q).to_json()))
    assert set(doc) >= {"energy", "iterations", "seed", "reached_target"}
    assert len(doc["assignment"]) == 4
