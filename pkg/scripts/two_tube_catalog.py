"""Exhaustive check of the two-tube procedure on small single-pool markets.

For every regionally sufficient market in the catalog, walk all assignment
plans and compare the reachable sizes with the maximum matching size.

    python3 scripts/two_tube_catalog.py --max-workers 5 --max-jobs 5
"""

import argparse
from collections import Counter

from lotsdraw.experiments import regionally_sufficient_catalog, sequence_outcome_sizes
from lotsdraw.model import C_PLUS
from lotsdraw.oracle import maximum_matching
from lotsdraw.procedures import ProcedureKind, arrangement_for, largest_region


def describe(market) -> str:
    w = Counter(x.region for x in market.workers)
    j = Counter(x.region for x in market.jobs)
    return f"workers {dict(sorted(w.items()))}  jobs {dict(sorted(j.items()))}"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-workers", type=int, default=5)
    parser.add_argument("--max-jobs", type=int, default=5)
    parser.add_argument("--regions", default="X,Y,Z")
    parser.add_argument("--show", type=int, default=10, help="counterexamples to print")
    args = parser.parse_args()

    catalog = regionally_sufficient_catalog(args.max_workers, args.max_jobs, args.regions.split(","))
    short, left_over, workerless = [], [], 0
    for market in catalog:
        best = len(maximum_matching(market, C_PLUS))
        sizes = sequence_outcome_sizes(market, C_PLUS, arrangement_for(ProcedureKind.TWO_TUBE, market))
        top = largest_region(market)
        covered = sum(j.region == top for j in market.jobs) <= sum(w.region != top for w in market.workers)
        has_workerless = bool({j.region for j in market.jobs} - {w.region for w in market.workers})
        workerless += has_workerless
        if sizes != {best}:
            short.append((market, sorted(sizes), best))
        if covered and sizes != {len(market.jobs)}:
            left_over.append(market)

    print(f"markets: {len(catalog)} ({workerless} with jobs in a region without workers)")
    print(f"below maximum for some plan: {len(short)}")
    print(f"jobs left over although |J_1| <= |W_-1|: {len(left_over)}")
    for market, sizes, best in short[: args.show]:
        print(f"  {describe(market)}  sizes {sizes}  maximum {best}")


if __name__ == "__main__":
    main()
