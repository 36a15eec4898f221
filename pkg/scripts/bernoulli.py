"""Mean relative error on Bernoulli random matrices for several densities.

    python3 scripts/bernoulli.py --densities 0.5 --shape 30x30 --trials 3
"""
from _table import common_args, print_table, run_grid

from qubo_bmf.datagen import generate_bernoulli


def main():
    p = common_args(__doc__.splitlines()[0], ["qubo_f1", "qubo_f1_als", "thresholded", "baseline"])
    p.add_argument("--shape", default="30x30")
    p.add_argument("--densities", default="0.1,0.5")
    args = p.parse_args()
    m, n = (int(v) for v in args.shape.split("x"))
    instances = {
        f"p={d}": (lambda d: lambda r, seed: generate_bernoulli(m, n, d, seed=seed))(float(d))
        for d in args.densities.split(",")
    }
    table, methods, ranks = run_grid(instances, args)
    print_table(table, list(instances), methods, ranks)


if __name__ == "__main__":
    main()
