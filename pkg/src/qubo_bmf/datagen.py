"""Synthetic matrices and preprocessing of real-valued data into binary form."""
from __future__ import annotations

import numpy as np

from .matrix import as_binary, as_real, product

# c1, c2, normalize columns, shift to nonnegative
GENE_PRESETS = {
    "leukemia": dict(c1=1 / 7, c2=5.0, normalize_cols=False, shift_nonneg=False),
    "melanoma": dict(c1=0.96, c2=1.04, normalize_cols=True, shift_nonneg=True),
}


def _eligible(F: np.ndarray, over: np.ndarray, min_sum: int) -> np.ndarray:
    """Rows of ``F`` touching an overlapping product entry with row sum > ``min_sum``."""
    return np.flatnonzero(over & (F.sum(axis=1) > min_sum))


def generate_exact_rank(m: int, n: int, r: int, p_U: float = 0.7, p_V: float = 0.7, seed=None):
    """Random ``A = U V^T`` that is binary, with binary ``U`` and ``V``.

    ``U`` and ``V`` start as Bernoulli draws. While some product entry
    exceeds 1, a random one of the denser factor's offending rows (row sum
    above 2) loses a random nonzero. If no such row exists on the denser
    side the other side is tried, and failing that, rows with sum exactly 2
    become eligible; this always makes progress.

    Returns ``(A, U, V)``.
    """
    if not 1 <= r <= min(m, n):
        raise ValueError(f"need 1 <= r <= min(m, n), got r={r}, m={m}, n={n}")
    for p in (p_U, p_V):
        if not 0 < p < 1:
            raise ValueError(f"densities must lie in (0, 1), got {p}")
    rng = np.random.default_rng(seed)
    U = (rng.random((m, r)) < p_U).astype(np.int8)
    V = (rng.random((n, r)) < p_V).astype(np.int8)
    A = product(U, V)
    while A.max() > 1:
        bad = A > 1
        sides = [(U, bad.any(axis=1)), (V, bad.any(axis=0))]
        if U.mean() < V.mean():
            sides.reverse()
        for min_sum in (2, 1):
            picked = None
            for F, over in sides:
                phi = _eligible(F, over, min_sum)
                if phi.size:
                    picked = F, phi
                    break
            if picked is not None:
                break
        F, phi = picked
        row = rng.choice(phi)
        col = rng.choice(np.flatnonzero(F[row]))
        F[row, col] = 0
        A = product(U, V)
    return as_binary(A, "A"), as_binary(U, "U"), as_binary(V, "V")


def generate_bernoulli(m: int, n: int, p: float, seed=None) -> np.ndarray:
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    return as_binary(rng.random((m, n)) < p, "A")


def binarize_threshold(A, t: float) -> np.ndarray:
    """1 where ``a_ij >= t``, else 0 (e.g. ``t=50`` for 0..255 grayscale)."""
    return as_binary(as_real(A) >= t)


def discretize_gene(A, c1: float, c2: float, normalize_cols: bool = False, shift_nonneg: bool = False):
    """Binarize expression data by distance from the grand mean.

    After the optional shift (add ``-min(A)``) and column normalization to
    unit Euclidean norm, with ``kappa`` the mean entry, an entry becomes 1
    iff it is ``<= kappa c1`` or ``>= kappa c2``. All-zero rows are
    dropped; returns ``(binary_matrix, kept_row_indices)``.
    """
    if not 0 <= c1 < c2:
        raise ValueError(f"need 0 <= c1 < c2, got c1={c1}, c2={c2}")
    X = np.array(as_real(A))
    if shift_nonneg and X.size:
        X = X - X.min()
    if np.any(X < 0):
        raise ValueError("data must be nonnegative (pass shift_nonneg=True to shift)")
    if normalize_cols:
        norms = np.linalg.norm(X, axis=0)
        norms[norms == 0] = 1.0
        X = X / norms
    kappa = X.mean() if X.size else 0.0
    B = ((X <= kappa * c1) | (X >= kappa * c2)).astype(np.int8)
    kept = np.flatnonzero(B.any(axis=1))
    return as_binary(B[kept].reshape(len(kept), X.shape[1])), kept
