"""Partial sums S(1..n) of the inclusion/exclusion series as a CSV.

    python3 scripts/reproduce_table.py --n 22 --out table.csv
"""

import argparse
import logging

from cardytest.cli import IESUM_HEADER, TableWriter
from cardytest.cache import RhoCache, default_cache_path
from cardytest.iesum import series_table


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=22)
    p.add_argument("--out")
    p.add_argument("--cache", default=str(default_cache_path()))
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cache = RhoCache(args.cache, threads=args.threads)
    writer = TableWriter(IESUM_HEADER, "csv", args.out)
    for row in series_table(args.n, cache):
        writer.write([row.n, row.distinct_classes, row.num_solves, row.S_n, row.gap_to_limit, row.wall_time])
    writer.close()


if __name__ == "__main__":
    main()
