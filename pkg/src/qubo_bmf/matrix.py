"""Binary/real matrix containers, exact products and the relative-error metric.

Matrices are plain 2-D numpy arrays. ``as_binary`` and ``as_real`` validate
an input and return a read-only view so that values handed around the
package cannot be mutated in place.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


def as_binary(a, name: str = "matrix") -> np.ndarray:
    """Validate ``a`` as a 2-D 0/1 matrix and return a read-only int8 copy."""
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.dtype == bool:
        out = arr.astype(np.int8)
    else:
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise ValueError(f"{name} has entries outside {{0, 1}}")
        out = arr.astype(np.int8)
    out.setflags(write=False)
    return out


def as_real(a, name: str = "matrix") -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def is_binary(a) -> bool:
    arr = np.asarray(a)
    return bool(np.all((arr == 0) | (arr == 1)))


def frobenius_sq(M):
    """Sum of squared entries. Integer-valued input gives an exact ``int``."""
    arr = np.asarray(M)
    if np.issubdtype(arr.dtype, np.integer) or arr.dtype == bool:
        a = arr.astype(np.int64)
        return int(np.sum(a * a))
    return float(np.sum(arr * arr))


def product(U, V) -> np.ndarray:
    """Exact integer product ``U @ V.T``. Entries are not clamped to {0, 1}."""
    U = np.asarray(U)
    V = np.asarray(V)
    if U.ndim != 2 or V.ndim != 2 or U.shape[1] != V.shape[1]:
        raise ValueError(f"inner dimensions disagree: U {U.shape}, V {V.shape}")
    return U.astype(np.int64) @ V.astype(np.int64).T


def residual_sq(A, U, V) -> int:
    """``||A - U V^T||_F^2`` in integer arithmetic."""
    A = np.asarray(A)
    X = product(U, V)
    if X.shape != A.shape:
        raise ValueError(f"U V^T has shape {X.shape}, A has shape {A.shape}")
    D = A.astype(np.int64) - X
    return int(np.sum(D * D))


def relative_error(A, U, V) -> float:
    """``||A - U V^T||_F^2 / ||A||_F^2``.

    For binary factors this is the number of wrong cells divided by the
    number of ones in ``A``.
    """
    denom = frobenius_sq(np.asarray(A).astype(np.int64))
    if denom == 0:
        raise ZeroDivisionError("relative error is undefined for an all-zero A")
    return residual_sq(A, U, V) / denom


@dataclass(frozen=True)
class FactorResult:
    """Binary factors ``U`` (m x r), ``V`` (n x r) and the fit they achieve."""

    U: np.ndarray
    V: np.ndarray
    rel_error: float
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.U.shape[1]

    def transposed(self) -> "FactorResult":
        """Result for ``A.T``: swaps the roles of ``U`` and ``V``."""
        return FactorResult(self.V, self.U, self.rel_error, dict(self.diagnostics))


def make_result(A, U, V, **diagnostics) -> FactorResult:
    U = as_binary(U, "U")
    V = as_binary(V, "V")
    A = np.asarray(A)
    # all-zero A has no defined relative error; callers decide how to report it
    err = relative_error(A, U, V) if np.any(A) else float("nan")
    return FactorResult(U, V, err, diagnostics)
