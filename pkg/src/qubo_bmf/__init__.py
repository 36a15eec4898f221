"""Binary matrix factorization through QUBO formulations.

Build a QUBO for ``min ||A - U V^T||_F^2`` over binary factors, minimize it
with a software annealer, and polish the factors with exact alternating
binary least squares. Tall matrices go through leverage-score row
sampling first.
"""
from .bls import RefineConfig, alternating_refine, solve_bls
from .competitors import baseline_bmf, nmf_init, thresholded_bmf, thresholded_bmf_naive
from .datagen import (
    binarize_threshold,
    discretize_gene,
    generate_bernoulli,
    generate_exact_rank,
)
from .experiment import ExperimentConfig, Report, run_experiment
from .matrix import FactorResult, frobenius_sq, product, relative_error
from .pipeline import factorize_qubo
from .qubo import (
    QuboProblem,
    VariableLayout,
    add_cluster_constraint,
    build_f1,
    build_f2,
    decode,
    encode,
    energy,
    penalty_f,
)
from .sampling import factorize_tall, leverage_scores, sample_rows
from .solve import AnnealConfig, SolveResult, anneal, brute_force, delta_energy

__all__ = [
    "AnnealConfig",
    "ExperimentConfig",
    "FactorResult",
    "QuboProblem",
    "RefineConfig",
    "Report",
    "SolveResult",
    "VariableLayout",
    "add_cluster_constraint",
    "alternating_refine",
    "anneal",
    "baseline_bmf",
    "binarize_threshold",
    "brute_force",
    "build_f1",
    "build_f2",
    "decode",
    "delta_energy",
    "discretize_gene",
    "encode",
    "energy",
    "factorize_qubo",
    "factorize_tall",
    "frobenius_sq",
    "generate_bernoulli",
    "generate_exact_rank",
    "leverage_scores",
    "nmf_init",
    "penalty_f",
    "product",
    "relative_error",
    "run_experiment",
    "sample_rows",
    "solve_bls",
    "thresholded_bmf",
    "thresholded_bmf_naive",
]
