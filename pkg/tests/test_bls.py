import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qubo_bmf.bls import RefineConfig, alternating_refine, candidate_rows, solve_bls
from qubo_bmf.datagen import generate_exact_rank
from qubo_bmf.matrix import relative_error, residual_sq
from qubo_bmf.qubo import build_f1, decode, encode

bits = st.integers(0, 1)


def test_candidate_order():
    assert candidate_rows(2).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert len(candidate_rows(5)) == 32


def test_rowwise_optimum_matches_full_enumeration(rng):
    for _ in range(20):
        A = rng.integers(0, 2, (6, 4))
        V = rng.integers(0, 2, (4, 2))
        U = solve_bls(A, V)
        best = min(
            residual_sq(A, np.array(u).reshape(6, 2), V)
            for u in itertools.product((0, 1), repeat=12)
        )
        assert residual_sq(A, U, V) == best


@given(st.data())
def test_each_row_is_optimal(data):
    m, n, r = data.draw(st.integers(1, 5)), data.draw(st.integers(1, 5)), data.draw(st.integers(1, 4))
    A = data.draw(arrays(np.int8, (m, n), elements=bits))
    V = data.draw(arrays(np.int8, (n, r), elements=bits))
    U = solve_bls(A, V)
    for i in range(m):
        costs = [int(np.sum((A[i] - V @ np.array(c)) ** 2)) for c in itertools.product((0, 1), repeat=r)]
        assert int(np.sum((A[i] - V.astype(int) @ U[i]) ** 2)) == min(costs)


def test_exact_solution_recovered():
    A, U, V = generate_exact_rank(10, 7, 3, seed=2)
    assert residual_sq(A, solve_bls(A, V), V) == 0


def test_zero_matrix_gives_zero_factor(rng):
    V = rng.integers(0, 2, (5, 3))
    assert not solve_bls(np.zeros((4, 5)), V).any()


def test_tie_break_prefers_fewer_ones_then_lexicographic():
    # V has a zero column: that bit never changes the cost
    V = np.array([[1, 0], [1, 0]])
    assert solve_bls(np.array([[1, 1]]), V).tolist() == [[1, 0]]
    # identical columns: (0,1) and (1,0) tie, (0,1) is smaller
    V = np.array([[1, 1]])
    assert solve_bls(np.array([[1]]), V).tolist() == [[0, 1]]


@given(st.data())
def test_row_permutation_equivariance(data):
    m, n, r = data.draw(st.integers(1, 6)), data.draw(st.integers(1, 5)), data.draw(st.integers(1, 3))
    A = data.draw(arrays(np.int8, (m, n), elements=bits))
    V = data.draw(arrays(np.int8, (n, r), elements=bits))
    perm = data.draw(st.permutations(range(m)))
    assert np.array_equal(solve_bls(A[list(perm)], V), solve_bls(A, V)[list(perm)])


def test_rank_cap():
    with pytest.raises(ValueError):
        solve_bls(np.zeros((1, 21)), np.zeros((21, 21)))


def test_trace_monotone_on_100_runs(rng):
    for _ in range(100):
        m, n = (int(v) for v in rng.integers(2, 9, 2))
        r = int(rng.integers(1, 4))
        A = rng.integers(0, 2, (m, n))
        if not A.any():
            A[0, 0] = 1
        U0 = rng.integers(0, 2, (m, r))
        V0 = rng.integers(0, 2, (n, r))
        res = alternating_refine(A, U0, V0)
        trace = res.diagnostics["trace"]
        assert all(b <= a for a, b in zip(trace, trace[1:]))
        assert res.rel_error <= relative_error(A, U0, V0)
        assert res.diagnostics["half_steps"] <= 20


def test_fixed_point_stops_after_patience():
    A, U, V = generate_exact_rank(6, 6, 2, seed=4)
    res = alternating_refine(A, U, V, RefineConfig(patience=2))
    assert res.rel_error == 0
    assert res.diagnostics["half_steps"] == 2
    assert np.array_equal(res.U, U) and np.array_equal(res.V, V)


def test_violated_annealer_output_is_repaired():
    A, U, V = generate_exact_rank(8, 8, 2, seed=5)
    q = build_f1(A, 2)
    x = encode(q.layout, U, V)
    x[q.layout.w_index(0, 0, 0)] ^= 1
    U1, V1, viol = decode(q, x)
    assert viol == 1
    assert alternating_refine(A, U1, V1).rel_error == 0


def test_config_validation():
    with pytest.raises(ValueError):
        RefineConfig(max_half_steps=0)
    with pytest.raises(ValueError):
        RefineConfig(patience=0)
