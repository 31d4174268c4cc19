"""Time the binary code searches on shuffled instances and print one row per instance.

    python3 scripts/reproduce_table.py --runs 10
    python3 scripts/reproduce_table.py --stretch      # adds A(7,3) >= 16, several minutes
"""

import argparse

from stablemodels.cli import bench_hamming

ROWS = [(5, 3, 4), (5, 3, 5), (6, 3, 8), (6, 3, 9)]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--stretch", action="store_true", help="include the n=7 instance")
    args = parser.parse_args()
    rows = ROWS + [(7, 3, 16)] if args.stretch else ROWS
    print(f"{'instance':<14} {'verdict':<5} timing over shuffled runs (s)")
    for n, d, m in rows:
        runs = 1 if n == 7 else args.runs
        print(bench_hamming(n, d, m, runs=runs, seed=args.seed).format(), flush=True)


if __name__ == "__main__":
    main()
