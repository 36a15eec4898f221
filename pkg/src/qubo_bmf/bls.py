"""Exact binary least squares and alternating refinement of binary factors."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .matrix import FactorResult, as_binary, frobenius_sq, residual_sq

BLS_RANK_CAP = 20
# rows x candidates evaluated per chunk
_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True)
class RefineConfig:
    """``max_half_steps`` single-factor updates at most; stop early after
    ``patience`` consecutive updates without a strict improvement."""

    max_half_steps: int = 20
    patience: int = 2

    def __post_init__(self):
        if self.max_half_steps < 1 or self.patience < 1:
            raise ValueError("max_half_steps and patience must be >= 1")


def candidate_rows(r: int) -> np.ndarray:
    """All of {0,1}^r, sorted by number of ones, then lexicographically."""
    cands = sorted(itertools.product((0, 1), repeat=r), key=lambda c: (sum(c), c))
    return np.array(cands, dtype=np.int64).reshape(len(cands), r)


def solve_bls(A, V) -> np.ndarray:
    """``argmin_U ||A - U V^T||_F^2`` over binary ``U``, one row at a time.

    Each row tries all ``2^r`` binary vectors. Ties prefer fewer ones, then
    the lexicographically smallest row.
    """
    A = np.asarray(A).astype(np.int64)
    V = np.asarray(V).astype(np.int64)
    if V.ndim != 2 or A.ndim != 2 or V.shape[0] != A.shape[1]:
        raise ValueError(f"shape mismatch: A {A.shape}, V {V.shape}")
    r = V.shape[1]
    if r > BLS_RANK_CAP:
        raise ValueError(f"exhaustive BLS limited to rank {BLS_RANK_CAP}, got {r}")
    C = candidate_rows(r)
    P = V @ C.T  # n x 2^r, column c is V c
    norms = np.sum(P * P, axis=0)
    m = A.shape[0]
    U = np.empty((m, r), dtype=np.int8)
    step = max(1, _CHUNK_CELLS // len(C))
    for lo in range(0, m, step):
        # ||a||^2 is constant per row and left out
        cost = norms[None, :] - 2 * (A[lo : lo + step] @ P)
        U[lo : lo + step] = C[np.argmin(cost, axis=1)]
    return as_binary(U, "U")


def alternating_refine(A, U0, V0, cfg: RefineConfig | None = None) -> FactorResult:
    """Alternate exact updates of ``V`` (first) and ``U``.

    Every half-step is an exact conditional minimization, so the objective
    never increases. The best pair seen is returned; ``diagnostics["trace"]``
    holds the objective before and after every half-step.
    """
    cfg = cfg or RefineConfig()
    A = as_binary(A, "A")
    U = as_binary(U0, "U")
    V = as_binary(V0, "V")
    m, n = A.shape
    if U.shape[0] != m or V.shape[0] != n or U.shape[1] != V.shape[1]:
        raise ValueError(f"shape mismatch: A {A.shape}, U {U.shape}, V {V.shape}")
    best = residual_sq(A, U, V)
    best_U, best_V = U, V
    trace = [best]
    stale = 0
    steps = 0
    for steps in range(1, cfg.max_half_steps + 1):
        if steps % 2 == 1:
            V = solve_bls(A.T, U)
        else:
            U = solve_bls(A, V)
        obj = residual_sq(A, U, V)
        trace.append(obj)
        if obj < best:
            best, best_U, best_V = obj, U, V
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    total = frobenius_sq(A)
    err = best / total if total else float("nan")
    return FactorResult(best_U, best_V, err, {"trace": trace, "half_steps": steps})
