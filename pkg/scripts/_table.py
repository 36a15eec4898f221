"""Shared helpers for the experiment scripts."""
import argparse
import csv
import sys
import time

import numpy as np

from qubo_bmf.experiment import CSV_COLUMNS, ExperimentConfig, run_experiment
from qubo_bmf.solve import AnnealConfig


def common_args(description, methods, ranks="1..5", trials=3):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--methods", default=",".join(methods))
    p.add_argument("--ranks", default=ranks)
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--iterations", type=int, default=10**6)
    p.add_argument("--csv", help="also write every trial to this CSV file")
    return p


def parse_ranks(text):
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",")]


def run_grid(instances, args, sample_size=None):
    """Mean relative error per (instance label, method, r).

    ``instances`` maps a label to a function ``(r, trial_seed) -> A``; every
    trial gets its own matrix, as in a fresh random draw per repetition.
    """
    methods = args.methods.split(",")
    ranks = parse_ranks(args.ranks)
    anneal = AnnealConfig(total_iterations=args.iterations)
    rows, table = [], {}
    for label, make in instances.items():
        for method in methods:
            for r in ranks:
                errs = []
                t0 = time.perf_counter()
                for trial in range(1, args.trials + 1):
                    A = make(r, trial)
                    cfg = ExperimentConfig(method=method, r=r, trials=1, seeds=(trial,),
                                           anneal=anneal, sample_size=sample_size)
                    rep = run_experiment(cfg, A)
                    errs.append(rep.errors[0])
                    rows.extend({**row, "trial": trial - 1} for row in rep.rows())
                table[label, method, r] = float(np.mean(errs))
                print(f"  {label} {method} r={r}: {table[label, method, r]:.4f} "
                      f"({time.perf_counter() - t0:.1f}s)", file=sys.stderr, flush=True)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    return table, methods, ranks


def print_table(table, labels, methods, ranks):
    head = f"{'':>14s}" + "".join(f"{lab + ' r=' + str(r):>14s}" for lab in labels for r in ranks)
    print(head)
    for method in methods:
        cells = "".join(f"{table[lab, method, r]:>14.4f}" for lab in labels for r in ranks)
        print(f"{method:>14s}{cells}")
