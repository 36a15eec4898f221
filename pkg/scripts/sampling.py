"""Tall exact-rank matrices through leverage-score row sampling.

The QUBO methods factor ``s`` sampled rows and then fit the other factor
to every row exactly; the competitors are run on the same sample.

    python3 scripts/sampling.py --shape 2000x20 --sample-size 30 --trials 3
"""
from _table import common_args, print_table, run_grid

from qubo_bmf.datagen import generate_exact_rank


def main():
    p = common_args(__doc__.splitlines()[0], ["qubo_f1", "qubo_f1_als", "thresholded", "baseline"])
    p.add_argument("--shape", default="2000x20")
    p.add_argument("--sample-size", type=int, default=30)
    args = p.parse_args()
    m, n = (int(v) for v in args.shape.split("x"))
    label = f"{m}x{n}"
    table, methods, ranks = run_grid(
        {label: lambda r, seed: generate_exact_rank(m, n, r, seed=seed)[0]}, args, args.sample_size
    )
    print_table(table, [label], methods, ranks)


if __name__ == "__main__":
    main()
