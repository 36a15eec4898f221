"""QUBO minimization: exhaustive search and single-flip annealing.

The annealer is a software analogue of a Metropolis-based annealing
accelerator. Each variable carries an effective field

    h_i = sum_{j != i} s_ij x_j,    s = Q + Q^T off the diagonal,

so that the energy change of flipping bit ``i`` is
``(1 - 2 x_i) (q_ii + h_i)``, an O(1) lookup. Accepted flips update the
fields of the flipped variable's neighbours only.

With more than one replica, the replicas sit on a geometric temperature
ladder that is cooled as a whole, and neighbouring rungs attempt state
exchanges every ``exchange_interval`` sweeps (parallel tempering).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np
import scipy.sparse as sp

from .qubo import QuboProblem, energy as qubo_energy

BRUTE_FORCE_CAP = 26
_TOL = 1e-9


@dataclass(frozen=True)
class AnnealConfig:
    """Annealing run parameters.

    ``total_iterations`` counts single-flip proposals per replica.
    ``temp_hi=None`` uses a quarter of the median absolute coupling and
    ``temp_lo=None`` a tenth of ``temp_hi`` (0.5 and 0.05 for the
    factorization QUBOs at ``lam=1``). Starting hotter lets the chain
    wander into disordered states full of violated product constraints
    that it does not leave at low penalty weights.
    """

    total_iterations: int = 1_000_000
    replicas: int = 16
    temp_hi: float | None = None
    temp_lo: float | None = None
    exchange_interval: int = 10
    seed: int = 0
    target_energy: float | None = None
    ladder_ratio: float = 10.0

    def __post_init__(self):
        if self.total_iterations < 1:
            raise ValueError("total_iterations must be >= 1")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        for t in (self.temp_hi, self.temp_lo):
            if t is not None and not t > 0:
                raise ValueError("temperatures must be positive")
        if self.temp_hi is not None and self.temp_lo is not None and self.temp_hi < self.temp_lo:
            raise ValueError("temp_hi must be >= temp_lo")
        if self.exchange_interval < 1:
            raise ValueError("exchange_interval must be >= 1")
        if not self.ladder_ratio >= 1:
            raise ValueError("ladder_ratio must be >= 1")


@dataclass(frozen=True)
class SolveResult:
    best_assignment: np.ndarray
    best_energy: float
    iterations_used: int
    reached_target: bool
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "energy": self.best_energy,
            "iterations": self.iterations_used,
            "seed": self.seed,
            "reached_target": self.reached_target,
            "assignment": "".join(str(int(b)) for b in self.best_assignment),
        }


class SymmetricQubo:
    """Diagonal + symmetric off-diagonal CSR form of a QUBO matrix."""

    def __init__(self, q: QuboProblem):
        Q = sp.csr_matrix(q.coeffs, dtype=np.float64)
        self.diag = np.asarray(Q.diagonal(), dtype=np.float64).copy()
        S = (Q + Q.T).tolil()
        S.setdiag(0)
        S = S.tocsr()
        S.eliminate_zeros()
        S.sort_indices()
        self.indptr = S.indptr.astype(np.int64)
        self.indices = S.indices.astype(np.int64)
        self.data = S.data.astype(np.float64)
        self.offset = float(q.offset)
        self.n = Q.shape[0]

    def max_abs_row_sum(self) -> float:
        sums = np.abs(self.diag).copy()
        np.add.at(sums, np.repeat(np.arange(self.n), np.diff(self.indptr)), np.abs(self.data))
        return float(sums.max()) if self.n else 0.0

    def default_temp_hi(self) -> float:
        mags = np.abs(self.data[self.data != 0])
        if mags.size == 0:
            mags = np.abs(self.diag[self.diag != 0])
        return 0.25 * float(np.median(mags)) if mags.size else 1.0

    def energy(self, x) -> float:
        """``offset + sum_i d_i x_i + sum_{i<j} s_ij x_i x_j``."""
        xf = np.asarray(x, dtype=np.float64)
        fields = self.fields(x)
        return float(self.offset + self.diag @ xf + 0.5 * (xf @ fields))

    def fields(self, x) -> np.ndarray:
        xf = np.asarray(x, dtype=np.float64)
        S = sp.csr_matrix((self.data, self.indices, self.indptr), shape=(self.n, self.n))
        return np.asarray(S @ xf, dtype=np.float64)


class FieldState:
    """A bit vector with cached effective fields and running energy."""

    def __init__(self, sym: SymmetricQubo, x=None):
        self.sym = sym
        self.x = np.zeros(sym.n, dtype=np.int8) if x is None else np.array(x, dtype=np.int8)
        self.h = sym.fields(self.x)
        self.energy = sym.energy(self.x)

    def delta(self, i: int) -> float:
        if not 0 <= i < self.sym.n:
            raise IndexError(f"variable index {i} out of range")
        return (1 - 2 * int(self.x[i])) * (self.sym.diag[i] + self.h[i])

    def flip(self, i: int) -> float:
        d = self.delta(i)
        self.x[i] ^= 1
        sign = 1.0 if self.x[i] else -1.0
        lo, hi = self.sym.indptr[i], self.sym.indptr[i + 1]
        self.h[self.sym.indices[lo:hi]] += sign * self.sym.data[lo:hi]
        self.energy += d
        return d


def delta_energy(q: QuboProblem, x, i: int) -> float:
    """Energy change from flipping bit ``i`` of ``x``."""
    x = np.asarray(x)
    if x.shape != (q.n_vars,):
        raise ValueError(f"assignment length {x.shape} does not match n_vars={q.n_vars}")
    return FieldState(SymmetricQubo(q), x).delta(i)


@numba.njit(cache=True, nogil=True)
def _enumerate(n, diag, indptr, indices, data):
    x = np.zeros(n, dtype=np.int8)
    h = np.zeros(n, dtype=np.float64)
    e = 0.0
    best = 0.0
    code = np.int64(0)
    best_code = np.int64(0)
    total = np.int64(1) << n
    for s in range(1, total):
        # Gray code: flip the lowest set bit of s
        i = 0
        while ((s >> i) & 1) == 0:
            i += 1
        if x[i] == 0:
            e += diag[i] + h[i]
            x[i] = 1
            sign = 1.0
        else:
            e -= diag[i] + h[i]
            x[i] = 0
            sign = -1.0
        for p in range(indptr[i], indptr[i + 1]):
            h[indices[p]] += sign * data[p]
        code ^= np.int64(1) << i
        if e < best - 1e-9:
            best = e
            best_code = code
        elif e <= best + 1e-9 and code < best_code:
            best_code = code
    return best_code


def brute_force(q: QuboProblem, cap: int = BRUTE_FORCE_CAP) -> SolveResult:
    """Exhaustive global minimum.

    Ties go to the assignment with the smallest value read as a
    little-endian integer (bit 0 is the least significant).
    """
    n = q.n_vars
    if n > cap:
        raise ValueError(f"brute force limited to {cap} variables, problem has {n}")
    sym = SymmetricQubo(q)
    if n == 0:
        x = np.zeros(0, dtype=np.int8)
        return SolveResult(x, float(q.offset), 1, False)
    code = _enumerate(n, sym.diag, sym.indptr, sym.indices, sym.data)
    x = np.array([(code >> i) & 1 for i in range(n)], dtype=np.int8)
    return SolveResult(x, qubo_energy(q, x), 1 << n, False)


def all_minimizers(q: QuboProblem, cap: int = 22, tol: float = 1e-9):
    """Every global minimizer, as rows of a 0/1 array, plus the minimum.

    Vectorized full enumeration; intended for checking properties that
    must hold for all minimizers of small problems.
    """
    n = q.n_vars
    if n > cap:
        raise ValueError(f"enumeration limited to {cap} variables, problem has {n}")
    Q = q.coeffs.toarray()
    best = np.inf
    found = []
    chunk = 1 << min(n, 16)
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, start + chunk, dtype=np.int64)
        X = ((codes[:, None] >> np.arange(n)) & 1).astype(np.float64)
        E = q.offset + np.einsum("si,ij,sj->s", X, Q, X)
        low = E.min()
        if low < best - tol:
            best = low
            found = []
        if low <= best + tol:
            found.append(X[E <= best + tol].astype(np.int8))
    return np.concatenate(found), float(best)


@numba.njit(cache=True, nogil=True)
def _metropolis_block(x, h, e, best_x, best_e, diag, indptr, indices, data,
                      flips, uniforms, temp, alpha, target):
    """Run ``len(flips)`` proposals on one replica.

    Returns (energy, best_energy, temperature, steps_done, reached).
    """
    n_steps = flips.shape[0]
    for s in range(n_steps):
        i = flips[s]
        d = (1 - 2 * x[i]) * (diag[i] + h[i])
        if d <= 0.0 or uniforms[s] < math.exp(-d / temp):
            if x[i] == 0:
                x[i] = 1
                sign = 1.0
            else:
                x[i] = 0
                sign = -1.0
            for p in range(indptr[i], indptr[i + 1]):
                h[indices[p]] += sign * data[p]
            e += d
            if e < best_e - 1e-12:
                best_e = e
                best_x[:] = x
                if best_e <= target:
                    return e, best_e, temp * alpha, s + 1, True
        temp *= alpha
    return e, best_e, temp, n_steps, False


def anneal(q: QuboProblem, cfg: AnnealConfig | None = None) -> SolveResult:
    """Simulated annealing from the all-zero assignment.

    Deterministic for a given ``(q, cfg)``. The best assignment seen by any
    replica is returned, with its energy recomputed from ``q``.
    """
    cfg = cfg or AnnealConfig()
    n = q.n_vars
    if n < 1:
        raise ValueError("problem has no variables")
    sym = SymmetricQubo(q)
    R = cfg.replicas
    t_hi = cfg.temp_hi if cfg.temp_hi is not None else sym.default_temp_hi()
    t_lo = cfg.temp_lo if cfg.temp_lo is not None else t_hi / 10
    t_hi = max(t_hi, t_lo)
    N = cfg.total_iterations
    alpha = (t_lo / t_hi) ** (1.0 / max(N - 1, 1))
    ladder = (
        np.array([cfg.ladder_ratio ** (k / (R - 1)) for k in range(R)]) if R > 1 else np.ones(1)
    )
    target = -np.inf if cfg.target_energy is None else float(cfg.target_energy) - q.offset + _TOL

    rngs = [np.random.default_rng(cfg.seed + k) for k in range(R)]
    swap_rng = np.random.default_rng(cfg.seed + R)

    # energies are tracked without the offset inside the loop
    xs = np.zeros((R, n), dtype=np.int8)
    hs = np.zeros((R, n), dtype=np.float64)
    es = np.zeros(R)
    best_x = np.zeros(n, dtype=np.int8)
    best_e = 0.0
    # slot[k]: which state array currently sits on ladder rung k
    slot = np.arange(R)
    temps = t_hi * ladder
    block = cfg.exchange_interval * n if R > 1 else min(N, max(n, 65536))

    done = 0
    reached = best_e <= target
    swaps_accepted = 0
    while done < N and not reached:
        steps = min(block, N - done)
        used = steps
        for k in range(R):
            st = slot[k]
            flips = rngs[k].integers(0, n, size=steps)
            u = rngs[k].random(steps)
            rep_best = np.zeros(n, dtype=np.int8)
            e, rb, t, used_k, hit = _metropolis_block(
                xs[st], hs[st], es[st], rep_best, best_e,
                sym.diag, sym.indptr, sym.indices, sym.data,
                flips, u, temps[k], alpha, target,
            )
            es[st] = e
            if rb < best_e - 1e-12:
                best_e = rb
                best_x = rep_best
            temps[k] = t
            if hit:
                reached = True
                used = used_k
                break
        done += used
        if R > 1 and not reached:
            for k in range(R - 1):
                a, b = slot[k], slot[k + 1]
                arg = (1.0 / temps[k] - 1.0 / temps[k + 1]) * (es[a] - es[b])
                if arg >= 0 or swap_rng.random() < math.exp(arg):
                    slot[k], slot[k + 1] = b, a
                    swaps_accepted += 1
    final = qubo_energy(q, best_x)
    return SolveResult(
        best_x,
        final,
        int(done),
        bool(reached) or (cfg.target_energy is not None and final <= cfg.target_energy + _TOL),
        cfg.seed,
        {"swaps_accepted": swaps_accepted, "temp_hi": t_hi, "temp_lo": t_lo},
    )
