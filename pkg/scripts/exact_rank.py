"""Mean relative error on synthetic exact-rank matrices (desk scale).

Every trial draws a fresh matrix of rank r with the given shape, so
error 0 means the method recovered an exact factorization.

    python3 scripts/exact_rank.py --shape 30x30 --trials 3
"""
from _table import common_args, print_table, run_grid

from qubo_bmf.datagen import generate_exact_rank


def main():
    p = common_args(__doc__.splitlines()[0], ["qubo_f1", "qubo_f1_als", "thresholded", "baseline"])
    p.add_argument("--shape", default="30x30")
    args = p.parse_args()
    m, n = (int(v) for v in args.shape.split("x"))
    label = f"{m}x{n}"
    table, methods, ranks = run_grid(
        {label: lambda r, seed: generate_exact_rank(m, n, r, seed=seed)[0]}, args
    )
    print_table(table, [label], methods, ranks)


if __name__ == "__main__":
    main()
