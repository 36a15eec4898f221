import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from qubo_bmf.bls import RefineConfig
from qubo_bmf.datagen import generate_exact_rank
from qubo_bmf.pipeline import factorize_qubo
from qubo_bmf.sampling import factorize_tall, leverage_scores, sample_rows, sampling_probabilities
from qubo_bmf.solve import AnnealConfig


def projection_diagonal(A):
    """diag(A (A^T A)^+ A^T), an independent route to the leverage scores."""
    A = np.asarray(A, dtype=float)
    return np.diag(A @ np.linalg.pinv(A.T @ A) @ A.T)


def test_identity_scores():
    s, rank = leverage_scores(np.eye(5))
    assert rank == 5 and np.allclose(s, 1)


def test_all_ones_scores():
    s, rank = leverage_scores(np.ones((8, 3)))
    assert rank == 1 and np.allclose(s, 1 / 8)


def test_hand_example():
    s, rank = leverage_scores(np.array([[1, 0], [0, 1], [1, 1]]))
    assert rank == 2 and np.allclose(s, 2 / 3)


@given(arrays(np.int8, st.tuples(st.integers(1, 12), st.integers(1, 6)), elements=st.integers(0, 1)))
def test_scores_properties(A):
    if not A.any():
        return
    s, rank = leverage_scores(A)
    assert rank == np.linalg.matrix_rank(A.astype(float))
    assert abs(s.sum() - rank) < 1e-8
    assert np.all(s >= -1e-12) and np.all(s <= 1 + 1e-12)
    assert np.allclose(s, projection_diagonal(A), atol=1e-8)
    assert abs(sampling_probabilities(A).sum() - 1) < 1e-8


def test_zero_matrix_rejected():
    with pytest.raises(ValueError):
        leverage_scores(np.zeros((3, 2)))


def test_uniform_sampling_chi_square():
    n = 10
    _, idx = sample_rows(np.eye(n, dtype=np.int8), 10_000, seed=0)
    counts = np.bincount(idx, minlength=n)
    assert stats.chisquare(counts).pvalue > 1e-3


def test_single_draw_is_a_row(rng):
    A = rng.integers(0, 2, (7, 4))
    A[0] = 1
    As, idx = sample_rows(A, 1, seed=3)
    assert As.shape == (1, 4) and np.array_equal(As[0], A[idx[0]])


def test_sampled_rows_are_copies(rng):
    A = rng.integers(0, 2, (30, 5))
    A[0] = 1
    As, idx = sample_rows(A, 12, seed=1)
    assert np.array_equal(As, A[idx])


def test_zero_leverage_rows_never_drawn():
    A = np.array([[1, 0], [0, 0], [0, 1]])
    _, idx = sample_rows(A, 500, seed=0)
    assert 1 not in set(idx.tolist())


def test_small_matrix_takes_direct_path():
    A, _, _ = generate_exact_rank(8, 6, 2, seed=1)
    cfg = AnnealConfig(total_iterations=20_000, seed=4)
    a = factorize_tall(A, 2, 10, cfg, RefineConfig())
    b = factorize_qubo(A, 2, 1.0, "F1", None, cfg, RefineConfig())
    assert np.array_equal(a.U, b.U) and np.array_equal(a.V, b.V)
    assert "sample_indices" not in a.diagnostics


def test_tall_pipeline_exact_rank():
    A, _, _ = generate_exact_rank(200, 12, 2, seed=8)
    res = factorize_tall(A, 2, 12, AnnealConfig(seed=1), RefineConfig())
    assert res.U.shape == (200, 2) and res.V.shape == (12, 2)
    assert len(res.diagnostics["sample_indices"]) == 12
    assert res.rel_error <= res.diagnostics["unrefined_error"]
    assert res.rel_error == 0


def test_wide_matrix_via_transpose():
    A, _, _ = generate_exact_rank(10, 150, 1, seed=2)
    res = factorize_tall(A.T, 1, 10, AnnealConfig(seed=1), RefineConfig()).transposed()
    assert res.U.shape == (10, 1) and res.V.shape == (150, 1)
    assert res.rel_error == 0
