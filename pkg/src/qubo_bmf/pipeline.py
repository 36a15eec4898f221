"""Direct QUBO factorization: build, anneal, decode, optionally refine."""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from .bls import RefineConfig, alternating_refine
from .matrix import FactorResult, as_binary, make_result
from .qubo import add_cluster_constraint, build_f1, build_f2, decode
from .solve import AnnealConfig, anneal

BUILDERS = {"F1": build_f1, "F2": build_f2}


def factorize_qubo(
    A,
    r: int,
    lam: float = 1.0,
    formulation: str = "F1",
    cluster_lambda: float | None = None,
    anneal_cfg: AnnealConfig | None = None,
    refine_cfg: RefineConfig | None = None,
    stop_at_exact: bool = True,
) -> FactorResult:
    """Rank-``r`` BMF of ``A`` through one QUBO solve.

    With ``stop_at_exact`` the annealer halts once the energy reaches 0;
    for F1 the energy is a sum of squares plus nonnegative penalties, so
    0 certifies an exact factorization.
    """
    A = as_binary(A, "A")
    q = BUILDERS[formulation](A, r, lam)
    if cluster_lambda is not None:
        q = add_cluster_constraint(q, cluster_lambda)
    cfg = anneal_cfg or AnnealConfig()
    if stop_at_exact and cfg.target_energy is None and formulation == "F1":
        cfg = replace(cfg, target_energy=0.0)
    sol = anneal(q, cfg)
    U, V, violations = decode(q, sol.best_assignment)
    diag = {
        "energy": sol.best_energy,
        "iterations": sol.iterations_used,
        "reached_target": sol.reached_target,
        "violations": violations,
        "n_vars": q.n_vars,
    }
    if not np.any(A):
        return make_result(A, U, V, **diag)
    if refine_cfg is not None:
        refined = alternating_refine(A, U, V, refine_cfg)
        diag["unrefined_error"] = make_result(A, U, V).rel_error
        diag["refine_trace"] = refined.diagnostics["trace"]
        return FactorResult(refined.U, refined.V, refined.rel_error, diag)
    return make_result(A, U, V, **diag)
