"""QUBO encodings of rank-r binary matrix factorization.

Two encodings of ``min ||A - U V^T||_F^2`` over binary ``U`` (m x r) and
``V`` (n x r) are built here:

* F1 adds one product variable ``w[k][i, j] = u[i, k] * v[j, k]`` per cell
  and rank, giving ``(m + n + m n) r`` variables laid out as
  ``[vec(U); vec(V); vec(W1); ...; vec(Wr)]``.
* F2 adds pairwise variables ``ut[i, (k, k')] = u[i, k] u[i, k']`` and
  ``vt[j, (k, k')] = v[j, k] v[j, k']``, giving ``(m + n)(r + r^2)``
  variables laid out as ``[vec(U); vec(V); vec(Ut); vec(Vt)]``.

``vec`` stacks columns (column-major). Pair ``(k, k')`` (0-based) is column
``k + k' r`` of ``Ut`` and ``Vt``.

Both products ``a = b c`` are enforced softly with the gadget
``f(a, b, c) = b c - 2 a b - 2 a c + 3 a``, scaled by ``lam``. The coefficient
matrices are kept exactly in their block upper-triangular form; the
symmetric part is the solver's business.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .matrix import as_binary, frobenius_sq


def penalty_f(a: int, b: int, c: int) -> int:
    """Zero when ``a == b * c``, at least 1 otherwise (for bits)."""
    return b * c - 2 * b * a - 2 * c * a + 3 * a


def safe_lambda(A, r: int) -> float:
    """Smallest integer penalty strictly above ``2 r ||A||_F^2``.

    Above this bound every minimizer of the penalized QUBO satisfies the
    product constraints exactly.
    """
    return float(2 * r * frobenius_sq(as_binary(A)) + 1)


@dataclass(frozen=True)
class VariableLayout:
    formulation: str  # "F1" or "F2"
    m: int
    n: int
    r: int
    constraint_lambda: float | None = None

    @property
    def n_vars(self) -> int:
        m, n, r = self.m, self.n, self.r
        if self.formulation == "F1":
            return (m + n + m * n) * r
        return (m + n) * (r + r * r)

    @property
    def n_factor_vars(self) -> int:
        return (self.m + self.n) * self.r

    def u_index(self, i: int, k: int) -> int:
        return k * self.m + i

    def v_index(self, j: int, k: int) -> int:
        return self.m * self.r + k * self.n + j

    def w_index(self, k: int, i: int, j: int) -> int:
        if self.formulation != "F1":
            raise ValueError("product variables exist only in F1")
        return self.n_factor_vars + k * self.m * self.n + j * self.m + i

    def pair_column(self, k: int, kp: int) -> int:
        return k + kp * self.r

    def ut_index(self, i: int, k: int, kp: int) -> int:
        if self.formulation != "F2":
            raise ValueError("pair variables exist only in F2")
        return self.n_factor_vars + self.pair_column(k, kp) * self.m + i

    def vt_index(self, j: int, k: int, kp: int) -> int:
        if self.formulation != "F2":
            raise ValueError("pair variables exist only in F2")
        base = self.n_factor_vars + self.m * self.r * self.r
        return base + self.pair_column(k, kp) * self.n + j


@dataclass(frozen=True)
class QuboProblem:
    """Energy ``offset + x^T coeffs x`` over bit vectors ``x``.

    ``layout`` is ``None`` for problems read from a coordinate file, in
    which case nothing can be decoded.
    """

    coeffs: sp.csr_matrix
    offset: float
    layout: VariableLayout | None = None

    def __post_init__(self):
        if self.coeffs.shape[0] != self.coeffs.shape[1]:
            raise ValueError(f"coefficient matrix must be square, got {self.coeffs.shape}")
        if self.layout is not None and self.layout.n_vars != self.coeffs.shape[0]:
            raise ValueError("layout does not match coefficient matrix size")

    @property
    def n_vars(self) -> int:
        return self.coeffs.shape[0]

    def dense(self) -> np.ndarray:
        return self.coeffs.toarray()


def _check_args(A, r, lam):
    A = as_binary(A, "A")
    if r < 1:
        raise ValueError(f"rank must be >= 1, got {r}")
    if not lam > 0:
        raise ValueError(f"penalty lambda must be positive, got {lam}")
    return A


def _ones(rows, cols):
    return sp.csr_matrix(np.ones((rows, cols)))


def _vec(M) -> np.ndarray:
    return np.asarray(M).reshape(-1, order="F")


class _Triplets:
    """COO accumulator; duplicate entries are summed."""

    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []

    def add(self, i, j, v):
        i, j = np.broadcast_arrays(np.asarray(i), np.asarray(j))
        self.rows.append(i.ravel())
        self.cols.append(j.ravel())
        self.vals.append(np.broadcast_to(np.asarray(v, dtype=np.float64), i.shape).ravel())

    def csr(self, size):
        rows, cols, vals = (np.concatenate(x) for x in (self.rows, self.cols, self.vals))
        M = sp.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsr()
        M.sum_duplicates()
        M.eliminate_zeros()
        return M


def build_f1(A, r: int, lam: float = 1.0) -> QuboProblem:
    """Product-variable QUBO: one auxiliary ``w_kij = u_ik v_jk`` per term.

    In block form, with ``x = [vec U; vec V; vec W_1; ...; vec W_r]``::

        Q1 = lam/2 [[0, I_r (x) 1_mn], [I_r (x) 1_nm, 0]]
        Q2 = -2 lam [I_r (x) 1_1n (x) I_m; I_nr (x) 1_1m]
        Q3 = 1_rr (x) I_mn - 2 diag(vec A repeated r times) + 3 lam I

    and the offset is ``||A||_F^2``.
    """
    A = _check_args(A, r, lam)
    m, n = A.shape
    L = VariableLayout("F1", m, n, r)
    k, i, j = np.meshgrid(np.arange(r), np.arange(m), np.arange(n), indexing="ij")
    u = k * m + i
    v = m * r + k * n + j
    w = L.n_factor_vars + k * m * n + j * m + i
    a = A.astype(np.float64)[i, j]
    t = _Triplets()
    t.add(u, v, lam / 2)
    t.add(v, u, lam / 2)
    t.add(u, w, -2 * lam)
    t.add(v, w, -2 * lam)
    t.add(w, w, 3 * lam - 2 * a)
    # residual cross terms between product variables of one cell
    t.add(w[:, None], w[None, :], 1.0)
    return QuboProblem(t.csr(L.n_vars), float(frobenius_sq(A)), L)


def build_f2(A, r: int, lam: float = 1.0) -> QuboProblem:
    """Pair-variable QUBO: ``ut_i(k,k') = u_ik u_ik'`` and likewise for ``V``.

    The pair ``(k, k')`` sits in column ``k + k' r`` of the auxiliary block,
    so the residual term couples ``ut`` and ``vt`` through
    ``I_{r^2} (x) 1_mn``.
    """
    A = _check_args(A, r, lam)
    m, n = A.shape
    L = VariableLayout("F2", m, n, r)
    t = _Triplets()
    ks = np.arange(r)
    # factor block: sum over k of -2 a_ij u_ik v_jk
    k, i, j = np.meshgrid(ks, np.arange(m), np.arange(n), indexing="ij")
    t.add(k * m + i, m * r + k * n + j, -2.0 * A.astype(np.float64)[i, j])
    base = L.n_factor_vars
    for size, start, pair_start in ((m, 0, base), (n, m * r, base + m * r * r)):
        k, kp, i = np.meshgrid(ks, ks, np.arange(size), indexing="ij")
        f = start + k * size + i
        fp = start + kp * size + i
        pair = pair_start + (k + kp * r) * size + i
        t.add(f, fp, lam)  # b c part of each pair penalty
        t.add(f, pair, -2 * lam)
        t.add(fp, pair, -2 * lam)
        t.add(pair, pair, 3 * lam)
    c, i, j = np.meshgrid(np.arange(r * r), np.arange(m), np.arange(n), indexing="ij")
    t.add(base + c * m + i, base + m * r * r + c * n + j, 1.0)
    return QuboProblem(t.csr(L.n_vars), float(frobenius_sq(A)), L)


def add_cluster_constraint(q: QuboProblem, lam_c: float) -> QuboProblem:
    """Penalize rows of ``V`` that do not contain exactly one 1.

    Adds ``lam_c * sum_j (1 - sum_k v_jk + 2 sum_{k<k'} v_jk v_jk')``; the
    constant part goes into the offset.
    """
    if q.layout is None:
        raise ValueError("problem has no variable layout")
    if q.layout.constraint_lambda is not None:
        raise ValueError("problem already carries a cluster constraint")
    if not lam_c > 0:
        raise ValueError(f"constraint lambda must be positive, got {lam_c}")
    L = q.layout
    m, n, r = L.m, L.n, L.r
    block = lam_c * (sp.kron(_ones(r, r), sp.identity(n)) - 2 * sp.identity(n * r))
    C = sp.block_diag([sp.csr_matrix((m * r, m * r)), block])
    pad = q.n_vars - C.shape[0]
    C = sp.block_diag([C, sp.csr_matrix((pad, pad))], format="csr")
    coeffs = (q.coeffs + C).tocsr()
    coeffs.eliminate_zeros()
    return QuboProblem(
        coeffs,
        q.offset + lam_c * n,
        replace(L, constraint_lambda=float(lam_c)),
    )


def _bits(q: QuboProblem, x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != q.n_vars:
        raise ValueError(f"assignment length {x.shape} does not match n_vars={q.n_vars}")
    if not np.all((x == 0) | (x == 1)):
        raise ValueError("assignment must be a 0/1 vector")
    return x.astype(np.float64)


def energy(q: QuboProblem, x) -> float:
    xf = _bits(q, x)
    return float(q.offset + xf @ (q.coeffs @ xf))


def decode(q: QuboProblem, x):
    """Split ``x`` into ``(U, V, violations)``.

    ``violations`` counts auxiliary bits that disagree with the products
    they stand for. The factors are returned regardless.
    """
    if q.layout is None:
        raise ValueError("problem has no variable layout")
    xb = _bits(q, x).astype(np.int8)
    L = q.layout
    m, n, r = L.m, L.n, L.r
    U = xb[: m * r].reshape((m, r), order="F")
    V = xb[m * r : (m + n) * r].reshape((n, r), order="F")
    aux = xb[(m + n) * r :]
    if L.formulation == "F1":
        W = aux.reshape((r, m * n))
        expected = np.stack([_vec(np.outer(U[:, k], V[:, k])) for k in range(r)])
        violations = int(np.sum(W != expected))
    else:
        Ut = aux[: m * r * r].reshape((m, r * r), order="F")
        Vt = aux[m * r * r :].reshape((n, r * r), order="F")
        violations = int(np.sum(Ut != _pairs(U)) + np.sum(Vt != _pairs(V)))
    U = as_binary(U, "U")
    V = as_binary(V, "V")
    return U, V, violations


def _pairs(F: np.ndarray) -> np.ndarray:
    """Column ``k + k' r`` holds ``F[:, k] * F[:, k']``."""
    r = F.shape[1]
    out = np.empty((F.shape[0], r * r), dtype=np.int8)
    for kp in range(r):
        for k in range(r):
            out[:, k + kp * r] = F[:, k] * F[:, kp]
    return out


def encode(layout: VariableLayout, U, V) -> np.ndarray:
    """Bit vector for ``(U, V)`` with every auxiliary set consistently."""
    U = as_binary(U, "U")
    V = as_binary(V, "V")
    if U.shape != (layout.m, layout.r) or V.shape != (layout.n, layout.r):
        raise ValueError("factor shapes do not match layout")
    parts = [_vec(U), _vec(V)]
    if layout.formulation == "F1":
        parts += [_vec(np.outer(U[:, k], V[:, k])) for k in range(layout.r)]
    else:
        parts += [_vec(_pairs(U)), _vec(_pairs(V))]
    return np.concatenate(parts).astype(np.int8)
