"""Leverage-score row sampling for factorizing tall binary matrices."""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from .bls import RefineConfig, alternating_refine, solve_bls
from .matrix import FactorResult, as_binary, make_result
from .pipeline import factorize_qubo
from .solve import AnnealConfig


def leverage_scores(A):
    """Squared row norms of an orthonormal basis of ``range(A)``.

    The basis is the leading left singular vectors; singular values above
    ``max(m, n) * eps * sigma_max`` count towards the rank. Returns
    ``(scores, rank)`` with ``scores.sum() == rank`` up to rounding.
    """
    X = np.asarray(A, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if not np.any(X):
        raise ValueError("leverage scores are undefined for a zero matrix")
    B, sigma, _ = np.linalg.svd(X, full_matrices=False)
    tol = max(X.shape) * np.finfo(np.float64).eps * sigma[0]
    rank = int(np.sum(sigma > tol))
    basis = B[:, :rank]
    return np.einsum("ij,ij->i", basis, basis), rank


def sampling_probabilities(A) -> np.ndarray:
    scores, rank = leverage_scores(A)
    return scores / rank


def sample_rows(A, s: int, seed=None):
    """Draw ``s`` rows i.i.d. with replacement, row ``i`` with probability
    ``leverage_i / rank``. Returns ``(sampled_rows, indices)``."""
    if s < 1:
        raise ValueError(f"sample size must be >= 1, got {s}")
    A = as_binary(A, "A")
    p = sampling_probabilities(A)
    rng = np.random.default_rng(seed)
    idx = rng.choice(A.shape[0], size=s, replace=True, p=p / p.sum())
    return as_binary(A[idx], "A_s"), idx


def factorize_tall(
    A,
    r: int,
    s: int,
    anneal_cfg: AnnealConfig | None = None,
    refine_cfg: RefineConfig | None = None,
    seed=None,
    lam: float = 1.0,
    cluster_lambda: float | None = None,
) -> FactorResult:
    """Factor a sample of rows, then fit the full-height ``U`` exactly.

    ``V`` comes from a QUBO factorization of ``s`` leverage-sampled rows;
    ``U`` solves the row-wise binary least squares problem against all of
    ``A``; ``refine_cfg`` adds alternating refinement on the full matrix.
    For wide matrices pass ``A.T`` and call ``.transposed()`` on the result.
    """
    A = as_binary(A, "A")
    cfg = anneal_cfg or AnnealConfig()
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if A.shape[0] <= s:
        return factorize_qubo(A, r, lam, "F1", cluster_lambda, cfg, refine_cfg)
    A_s, idx = sample_rows(A, s, cfg.seed)
    sub = factorize_qubo(A_s, r, lam, "F1", cluster_lambda, cfg, None)
    V = sub.V
    U = solve_bls(A, V)
    diag = dict(sub.diagnostics)
    diag["sample_indices"] = idx.tolist()
    diag["sample_error"] = sub.rel_error
    first = make_result(A, U, V)
    diag["unrefined_error"] = first.rel_error
    if refine_cfg is None:
        return FactorResult(U, V, first.rel_error, diag)
    refined = alternating_refine(A, U, V, refine_cfg)
    diag["refine_trace"] = refined.diagnostics["trace"]
    return FactorResult(refined.U, refined.V, refined.rel_error, diag)
