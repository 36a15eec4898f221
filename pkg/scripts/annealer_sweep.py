"""Annealer settings versus final error on small instances.

Compares replica counts and temperature windows for qubo_f1_als. Useful
when choosing AnnealConfig values for a new class of matrices.

    python3 scripts/annealer_sweep.py --instances 5
"""
import argparse
import itertools

import numpy as np

from qubo_bmf.bls import RefineConfig
from qubo_bmf.datagen import generate_bernoulli, generate_exact_rank
from qubo_bmf.pipeline import factorize_qubo
from qubo_bmf.solve import AnnealConfig


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--instances", type=int, default=5)
    p.add_argument("--iterations", type=int, default=10**6)
    p.add_argument("--replicas", default="1,16")
    p.add_argument("--temp-hi", default="0.1,0.5")
    args = p.parse_args()
    seeds = range(1, args.instances + 1)
    suites = {
        "exact r=3": (3, [generate_exact_rank(30, 30, 3, seed=s)[0] for s in seeds]),
        "exact r=5": (5, [generate_exact_rank(30, 30, 5, seed=s)[0] for s in seeds]),
        "bernoulli r=5": (5, [generate_bernoulli(30, 30, 0.5, seed=s) for s in seeds]),
    }
    print(f"{'replicas':>8s} {'temp_hi':>8s}" + "".join(f"{k:>15s}" for k in suites))
    for R, th in itertools.product(args.replicas.split(","), args.temp_hi.split(",")):
        cfg = dict(replicas=int(R), total_iterations=args.iterations, temp_hi=float(th), temp_lo=float(th) / 10)
        means = []
        for r, mats in suites.values():
            errs = [
                factorize_qubo(A, r, anneal_cfg=AnnealConfig(seed=s, **cfg), refine_cfg=RefineConfig()).rel_error
                for s, A in zip(seeds, mats)
            ]
            means.append(np.mean(errs))
        print(f"{R:>8s} {th:>8s}" + "".join(f"{v:>15.3f}" for v in means), flush=True)


if __name__ == "__main__":
    main()
