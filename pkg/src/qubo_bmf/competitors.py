"""Comparison methods: NMF thresholding and a greedy densest-line baseline."""
from __future__ import annotations

import numpy as np

from .matrix import FactorResult, as_binary, as_real, frobenius_sq, make_result, residual_sq

_EPS = 1e-12


def nmf_objective(A, W, H) -> float:
    R = np.asarray(A, dtype=np.float64) - np.asarray(W) @ np.asarray(H)
    return float(np.sum(R * R))


def nmf_init(A, r: int, iters: int = 200, seed=None, return_trace: bool = False):
    """Nonnegative ``A ~ W H`` by multiplicative updates.

    Starts from uniform random positive factors; the squared error does not
    increase from one iteration to the next.
    """
    if r < 1:
        raise ValueError(f"rank must be >= 1, got {r}")
    X = np.asarray(A, dtype=np.float64)
    m, n = X.shape
    rng = np.random.default_rng(seed)
    W = rng.random((m, r)) + _EPS
    H = rng.random((r, n)) + _EPS
    trace = [nmf_objective(X, W, H)]
    for _ in range(iters):
        H *= (W.T @ X) / (W.T @ W @ H + _EPS)
        W *= (X @ H.T) / (W @ (H @ H.T) + _EPS)
        trace.append(nmf_objective(X, W, H))
    W, H = as_real(W, "W"), as_real(H, "H")
    if return_trace:
        return W, H, trace
    return W, H


def descending_order(M, positive_only: bool = False) -> np.ndarray:
    """Positions ``(row, col)`` of ``M`` by value, largest first.

    Equal values are ordered by position, so the order is total.
    ``positive_only`` drops entries that are not strictly positive.
    """
    M = np.asarray(M)
    rows, cols = np.indices(M.shape)
    order = np.lexsort((cols.ravel(), rows.ravel(), -M.ravel()))
    if positive_only:
        order = order[M.ravel()[order] > 0]
    return np.stack([rows.ravel()[order], cols.ravel()[order]], axis=1).reshape(-1, 2)


def _top(shape, order, count) -> np.ndarray:
    out = np.zeros(shape, dtype=np.int8)
    if count:
        out[order[:count, 0], order[:count, 1]] = 1
    return out


def _threshold_search(A, W, H):
    """Best (count_W, count_H) prefix pair; ``A`` is m x n with m <= n."""
    A = A.astype(np.int64)
    m, n = A.shape
    r = W.shape[1]
    v = descending_order(W, positive_only=True)
    k = descending_order(H, positive_only=True)
    total = frobenius_sq(A)
    best_err, best = total, (0, 0)
    Wp = np.zeros((m, r), dtype=np.int64)
    for a in range(len(v)):
        Wp[v[a, 0], v[a, 1]] = 1
        X = np.zeros((m, n), dtype=np.int64)
        err = total
        for b in range(len(k)):
            hk, hj = k[b]
            t = X[:, hj].copy()
            X[:, hj] += Wp[:, hk]
            col = X[:, hj]
            err += int(np.sum((A[:, hj] - col) ** 2) - np.sum((A[:, hj] - t) ** 2))
            if col.max() > 1:
                # entries only grow along q; no later q can be binary again
                break
            if err < best_err:
                best_err, best = err, (a + 1, b + 1)
    return _top(W.shape, v, best[0]), _top(H.shape, k, best[1]), best_err


def thresholded_bmf(A, W, H) -> FactorResult:
    """Binary factors from one threshold on ``W`` and one on ``H``.

    Scans every pair of thresholds in descending order, growing the
    thresholded factors and their product one entry at a time, and keeps
    the pair with the smallest squared error among those whose product is
    binary. Only strictly positive entries can be rounded up to 1, and the
    all-zero pair is the fallback. Runs in
    ``O(m n r^2 min(m, n))``.
    """
    A = as_binary(A, "A")
    W = as_real(W, "W")
    H = as_real(H, "H")
    m, n = A.shape
    if W.shape[0] != m or H.shape[1] != n or W.shape[1] != H.shape[0]:
        raise ValueError(f"shape mismatch: A {A.shape}, W {W.shape}, H {H.shape}")
    if n < m:
        Ht, Wt, _ = _threshold_search(A.T, H.T, W.T)
        Wb, Hb = Wt.T, Ht.T
    else:
        Wb, Hb, _ = _threshold_search(A, W, H)
    return make_result(A, Wb, Hb.T, method="thresholded")


def thresholded_bmf_naive(A, W, H) -> FactorResult:
    """Reference version of :func:`thresholded_bmf`: every threshold pair,
    full products, no incremental updates. Small inputs only."""
    A = as_binary(A, "A").astype(np.int64)
    W = as_real(W, "W")
    H = as_real(H, "H")
    v = descending_order(W, positive_only=True)
    k = descending_order(H, positive_only=True)
    best_err = frobenius_sq(A)
    best = (np.zeros(W.shape, np.int8), np.zeros(H.shape, np.int8))
    for a in range(1, len(v) + 1):
        Wb = _top(W.shape, v, a)
        for b in range(1, len(k) + 1):
            Hb = _top(H.shape, k, b)
            X = Wb.astype(np.int64) @ Hb
            if X.max() > 1:
                continue
            err = int(np.sum((A - X) ** 2))
            if err < best_err:
                best_err, best = err, (Wb, Hb)
    return make_result(A, best[0], best[1].T, method="thresholded_naive")


def baseline_bmf(A, r: int) -> FactorResult:
    """Greedy baseline: cover the densest residual row or column ``r`` times.

    Each round copies the densest line of the residual into a new rank-1
    term (a column when its count is strictly larger, otherwise a row).
    Finally the all-ones rank-1 factorization replaces the result if it is
    strictly better.
    """
    if r < 1:
        raise ValueError(f"rank must be >= 1, got {r}")
    A = as_binary(A, "A")
    m, n = A.shape
    U = np.zeros((m, r), dtype=np.int8)
    V = np.zeros((n, r), dtype=np.int8)
    for k in range(r):
        # overlapping picks could drive entries negative; keep the residual binary
        E = np.maximum(A.astype(np.int64) - U.astype(np.int64) @ V.T, 0)
        if not E.any():
            break
        row_sums = E.sum(axis=1)
        col_sums = E.sum(axis=0)
        i = int(np.argmax(row_sums))
        j = int(np.argmax(col_sums))
        if row_sums[i] < col_sums[j]:
            U[:, k] = E[:, j]
            V[j, k] = 1
        else:
            U[i, k] = 1
            V[:, k] = E[i, :]
    ones_err = int(np.sum(1 - A.astype(np.int64)))
    if ones_err < residual_sq(A, U, V):
        U = np.zeros((m, r), dtype=np.int8)
        V = np.zeros((n, r), dtype=np.int8)
        U[:, 0] = 1
        V[:, 0] = 1
    return make_result(A, U, V, method="baseline")
