"""Repeated-trial experiments over the factorization methods."""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .bls import RefineConfig, solve_bls
from .competitors import baseline_bmf, nmf_init, thresholded_bmf
from .matrix import FactorResult, as_binary, make_result
from .pipeline import factorize_qubo
from .sampling import factorize_tall, sample_rows
from .solve import AnnealConfig

METHODS = ("qubo_f1", "qubo_f2", "qubo_f1_als", "thresholded", "baseline")
CSV_COLUMNS = ("method", "r", "trial", "seed", "rel_error", "violations", "iterations")
THREADS_ENV = "QUBO_BMF_THREADS"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ExperimentConfig:
    method: str = "qubo_f1_als"
    r: int = 1
    lam: float = 1.0
    cluster_lambda: float | None = None
    sample_size: int | None = None
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    refine: RefineConfig = field(default_factory=RefineConfig)
    trials: int = 10
    seeds: tuple[int, ...] | None = None
    nmf_iters: int = 200

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.seeds is None:
            object.__setattr__(self, "seeds", tuple(range(1, self.trials + 1)))
        else:
            object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if len(self.seeds) != self.trials:
            raise ValueError(f"{self.trials} trials but {len(self.seeds)} seeds")
        if self.sample_size is not None and self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if isinstance(d.get("anneal"), dict):
            d["anneal"] = AnnealConfig(**d["anneal"])
        if isinstance(d.get("refine"), dict):
            d["refine"] = RefineConfig(**d["refine"])
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if d.get("seeds") is not None and "trials" not in d:
            d["trials"] = len(d["seeds"])
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        return d


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    rel_error: float
    violations: int
    iterations: int
    wall_time: float
    U: np.ndarray = field(repr=False, compare=False)
    V: np.ndarray = field(repr=False, compare=False)


@dataclass(frozen=True)
class Report:
    method: str
    r: int
    records: tuple[TrialRecord, ...]

    @property
    def errors(self) -> list[float]:
        return [t.rel_error for t in self.records]

    @property
    def mean_error(self) -> float:
        return float(np.mean(self.errors))

    @property
    def wall_time(self) -> float:
        return sum(t.wall_time for t in self.records)

    def rows(self) -> list[dict]:
        return [
            {
                "method": self.method,
                "r": self.r,
                "trial": t.trial,
                "seed": t.seed,
                "rel_error": repr(float(t.rel_error)),
                "violations": t.violations,
                "iterations": t.iterations,
            }
            for t in self.records
        ]

    def to_json(self, timing: bool = False) -> dict:
        # wall times are left out by default so reports stay reproducible
        out = {
            "method": self.method,
            "r": self.r,
            "mean_rel_error": self.mean_error,
            "trials": self.rows(),
        }
        if timing:
            out["wall_times"] = [t.wall_time for t in self.records]
        return out


def _sampled(A, r, s, seed, factor):
    """Factor ``s`` leverage-sampled rows with ``factor``, then fit ``U`` to all rows."""
    A_s, _ = sample_rows(A, s, seed)
    V = factor(A_s).V
    return make_result(A, solve_bls(A, V), V)


def run_trial(cfg: ExperimentConfig, A, seed: int) -> FactorResult:
    A = as_binary(A, "A")
    r = cfg.r
    s = cfg.sample_size
    tall = s is not None and A.shape[0] > s
    acfg = replace(cfg.anneal, seed=seed)
    if cfg.method in ("qubo_f1", "qubo_f1_als"):
        refine = cfg.refine if cfg.method == "qubo_f1_als" else None
        if tall:
            return factorize_tall(A, r, s, acfg, refine, lam=cfg.lam, cluster_lambda=cfg.cluster_lambda)
        return factorize_qubo(A, r, cfg.lam, "F1", cfg.cluster_lambda, acfg, refine)
    if cfg.method == "qubo_f2":
        def factor(M):
            return factorize_qubo(M, r, cfg.lam, "F2", cfg.cluster_lambda, acfg, None)
    elif cfg.method == "thresholded":
        def factor(M):
            W, H = nmf_init(M, r, cfg.nmf_iters, seed)
            return thresholded_bmf(M, W, H)
    else:
        def factor(M):
            return baseline_bmf(M, r)
    if tall:
        return _sampled(A, r, s, seed, factor)
    return factor(A)


def run_experiment(cfg: ExperimentConfig, A, workers: int | None = None) -> Report:
    """Run ``cfg.trials`` seeded trials of ``cfg.method`` on ``A``."""
    A = as_binary(A, "A")
    if not np.any(A):
        raise ValueError("relative error is undefined for an all-zero matrix")
    if cfg.r > min(A.shape):
        raise ValueError(f"rank {cfg.r} exceeds min{A.shape}")

    def one(item):
        trial, seed = item
        t0 = time.perf_counter()
        res = run_trial(cfg, A, seed)
        dt = time.perf_counter() - t0
        d = res.diagnostics
        return TrialRecord(
            trial, seed, float(res.rel_error), int(d.get("violations", 0)),
            int(d.get("iterations", 0)), dt, res.U, res.V,
        )

    items = list(enumerate(cfg.seeds))
    workers = workers or default_threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            records = list(pool.map(one, items))
    else:
        records = [one(it) for it in items]
    records.sort(key=lambda t: t.trial)
    return Report(cfg.method, cfg.r, tuple(records))


def external_report(A, factors: list[tuple[np.ndarray, np.ndarray]], method: str = "external") -> Report:
    """Report for factor pairs produced elsewhere (one pair per trial)."""
    A = as_binary(A, "A")
    records = []
    for trial, (U, V) in enumerate(factors):
        res = make_result(A, U, V)
        records.append(TrialRecord(trial, -1, res.rel_error, 0, 0, 0.0, res.U, res.V))
    r = factors[0][0].shape[1] if factors else 0
    return Report(method, r, tuple(records))
