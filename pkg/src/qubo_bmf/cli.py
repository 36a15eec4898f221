"""Command-line interface: ``qubo-bmf <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .datagen import (
    GENE_PRESETS,
    binarize_threshold,
    discretize_gene,
    generate_bernoulli,
    generate_exact_rank,
)
from .experiment import CSV_COLUMNS, METHODS, ExperimentConfig, external_report, run_experiment
from .qubo import add_cluster_constraint, build_f1, build_f2
from .solve import AnnealConfig, anneal, brute_force


def _parse_ranks(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _anneal_args(p):
    g = p.add_argument_group("annealer")
    g.add_argument("--iterations", type=int, help="flip proposals per replica")
    g.add_argument("--replicas", type=int)
    g.add_argument("--temp-hi", type=float)
    g.add_argument("--temp-lo", type=float)
    g.add_argument("--exchange-interval", type=int)


def _anneal_overrides(args) -> dict:
    pairs = {
        "total_iterations": args.iterations,
        "replicas": args.replicas,
        "temp_hi": args.temp_hi,
        "temp_lo": args.temp_lo,
        "exchange_interval": args.exchange_interval,
    }
    return {k: v for k, v in pairs.items() if v is not None}


def _experiment_config(args, method: str, r: int) -> ExperimentConfig:
    base = {}
    if getattr(args, "config", None):
        base = json.loads(Path(args.config).read_text())
    base.pop("method", None)
    base.pop("r", None)
    cfg = ExperimentConfig.from_dict({**base, "method": method, "r": r})
    over = {}
    if args.lam is not None:
        over["lam"] = args.lam
    if args.cluster_constraint is not None:
        over["cluster_lambda"] = args.cluster_constraint
    if args.sample_size is not None:
        over["sample_size"] = args.sample_size
    if args.trials is not None or args.seeds is not None:
        seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else None
        trials = len(seeds) if seeds else args.trials
        over["trials"] = trials
        over["seeds"] = seeds
    anneal_over = _anneal_overrides(args)
    if anneal_over:
        over["anneal"] = replace(cfg.anneal, **anneal_over)
    if not over:
        return cfg
    return ExperimentConfig.from_dict({**cfg.to_dict(), **over, "anneal": over.get("anneal", cfg.anneal), "refine": cfg.refine})


def cmd_generate(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "exact-rank":
        A, U, V = generate_exact_rank(args.m, args.n, args.r, args.p_u, args.p_v, args.seed)
        io.write_matrix(out / "A.txt", A)
        io.write_matrix(out / "U.txt", U)
        io.write_matrix(out / "V.txt", V)
    else:
        A = generate_bernoulli(args.m, args.n, args.p, args.seed)
        io.write_matrix(out / "A.txt", A)
    print(f"wrote {out / 'A.txt'} ({A.shape[0]}x{A.shape[1]}, {int(A.sum())} ones)")
    return 0


def cmd_discretize(args) -> int:
    X = io.read_matrix(args.input)
    if args.threshold is not None:
        B = binarize_threshold(X, args.threshold)
        kept = np.arange(B.shape[0])
    else:
        params = dict(GENE_PRESETS[args.preset]) if args.preset else {}
        for key in ("c1", "c2"):
            if getattr(args, key) is not None:
                params[key] = getattr(args, key)
        if args.normalize:
            params["normalize_cols"] = True
        if args.shift:
            params["shift_nonneg"] = True
        if "c1" not in params or "c2" not in params:
            raise SystemExit("discretize: give --preset, --threshold, or both --c1 and --c2")
        B, kept = discretize_gene(X, **params)
    io.write_matrix(args.output, B)
    if args.kept_rows:
        Path(args.kept_rows).write_text("\n".join(str(int(i)) for i in kept) + "\n")
    print(f"wrote {args.output} ({B.shape[0]}x{B.shape[1]})")
    return 0


def cmd_factorize(args) -> int:
    A = io.read_matrix(args.input, binary=True)
    cfg = _experiment_config(args, args.method, args.r)
    cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "trials": 1, "seeds": [args.seed],
                                      "anneal": cfg.anneal, "refine": cfg.refine})
    report = run_experiment(cfg, A)
    rec = report.records[0]
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_matrix(out / "U.txt", rec.U)
    io.write_matrix(out / "V.txt", rec.V)
    summary = {
        "method": cfg.method,
        "r": cfg.r,
        "seed": rec.seed,
        "rel_error": rec.rel_error,
        "violations": rec.violations,
        "iterations": rec.iterations,
        "v_row_sums": np.asarray(rec.V).sum(axis=1).tolist(),
    }
    print(json.dumps(summary, sort_keys=True))
    return 0


def _load_external(directory: Path, r: int):
    pairs = []
    for upath in sorted(directory.glob(f"U_r{r}_*.txt")):
        tag = upath.name[len(f"U_r{r}_"):]
        vpath = directory / f"V_r{r}_{tag}"
        if not vpath.exists():
            raise FileNotFoundError(f"{vpath} missing for {upath}")
        pairs.append((io.read_matrix(upath, binary=True), io.read_matrix(vpath, binary=True)))
    return pairs


def cmd_benchmark(args) -> int:
    A = io.read_matrix(args.input, binary=True)
    methods = args.methods.split(",")
    for m in methods:
        if m not in METHODS:
            raise SystemExit(f"benchmark: unknown method {m!r}")
    ranks = _parse_ranks(args.ranks)
    rows = []
    summaries = []
    for method in methods:
        for r in ranks:
            cfg = _experiment_config(args, method, r)
            report = run_experiment(cfg, A)
            rows.extend(report.rows())
            summaries.append((method, r, report.mean_error))
    if args.external_factors:
        for r in ranks:
            pairs = _load_external(Path(args.external_factors), r)
            if pairs:
                report = external_report(A, pairs, args.external_name)
                rows.extend(report.rows())
                summaries.append((args.external_name, r, report.mean_error))
    stream = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(stream, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            stream.close()
    if args.out:
        for method, r, mean in summaries:
            print(f"{method:>14s} r={r}: mean rel. error {mean:.4f}")
    return 0


def _build_qubo(A, args):
    builder = build_f1 if args.formulation == "F1" else build_f2
    q = builder(A, args.r, args.lam if args.lam is not None else 1.0)
    if args.cluster_constraint is not None:
        q = add_cluster_constraint(q, args.cluster_constraint)
    return q


def cmd_qubo_export(args) -> int:
    A = io.read_matrix(args.input, binary=True)
    q = _build_qubo(A, args)
    io.write_qubo(args.output, q)
    print(f"wrote {args.output} ({q.n_vars} variables, offset {q.offset})")
    return 0


def cmd_qubo_solve(args) -> int:
    q = io.read_qubo(args.input)
    if args.solver == "brute":
        res = brute_force(q)
    else:
        over = _anneal_overrides(args)
        cfg = AnnealConfig(seed=args.seed, target_energy=args.target, **over)
        res = anneal(q, cfg)
    text = json.dumps(res.to_json(), sort_keys=True)
    if args.output:
        Path(args.output).write_text(text + "\n")
    print(text)
    return 0


def _common_method_args(p):
    p.add_argument("--lam", type=float, help="product-constraint penalty (default 1)")
    p.add_argument("--cluster-constraint", type=float, metavar="LAMBDA_C",
                   help="penalize rows of V not summing to exactly 1")
    p.add_argument("--sample-size", type=int, help="leverage-sample this many rows when A is taller")
    p.add_argument("--config", help="JSON experiment config; flags override it")
    p.add_argument("--trials", type=int)
    p.add_argument("--seeds", help="comma-separated seeds (default 1..trials)")
    _anneal_args(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qubo-bmf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic binary matrix")
    p.add_argument("kind", choices=["exact-rank", "bernoulli"])
    p.add_argument("-m", type=int, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-r", type=int, default=1)
    p.add_argument("-p", type=float, default=0.5, help="Bernoulli density")
    p.add_argument("--p-u", type=float, default=0.7)
    p.add_argument("--p-v", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("discretize", help="binarize a real-valued matrix")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--preset", choices=sorted(GENE_PRESETS))
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--shift", action="store_true")
    p.add_argument("--threshold", type=float, help="plain threshold, e.g. 50 for grayscale")
    p.add_argument("--kept-rows", help="file for indices of rows kept")
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("factorize", help="factorize one binary matrix")
    p.add_argument("input")
    p.add_argument("--method", choices=METHODS, default="qubo_f1_als")
    p.add_argument("-r", type=int, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    _common_method_args(p)
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("benchmark", help="CSV of repeated trials over methods and ranks")
    p.add_argument("input")
    p.add_argument("--methods", default="qubo_f1_als,thresholded,baseline")
    p.add_argument("--ranks", default="1..5", help="e.g. '1..5' or '1,3'")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.add_argument("--external-factors", metavar="DIR",
                   help="directory of U_r{r}_{tag}.txt / V_r{r}_{tag}.txt from another tool")
    p.add_argument("--external-name", default="penalized")
    _common_method_args(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("qubo-export", help="write the QUBO for a matrix in coordinate format")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("-r", type=int, required=True)
    p.add_argument("--formulation", choices=["F1", "F2"], default="F1")
    p.add_argument("--lam", type=float)
    p.add_argument("--cluster-constraint", type=float, metavar="LAMBDA_C")
    p.set_defaults(func=cmd_qubo_export)

    p = sub.add_parser("qubo-solve", help="minimize a coordinate-format QUBO")
    p.add_argument("input")
    p.add_argument("--solver", choices=["anneal", "brute"], default="anneal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", type=float, help="stop once the energy reaches this value")
    p.add_argument("--output", help="also write the JSON result here")
    _anneal_args(p)
    p.set_defaults(func=cmd_qubo_solve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (io.FormatError, FileNotFoundError, ValueError) as e:
        print(f"qubo-bmf {args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
