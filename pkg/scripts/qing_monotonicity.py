"""Second Qing versus First Qing on random markets, same plan and partition.

    python3 scripts/qing_monotonicity.py --markets 10000 --seed 2024
"""

import argparse
import random
from collections import Counter

from lotsdraw.engine import execute
from lotsdraw.experiments import random_qing_market
from lotsdraw.model import C_PLUS
from lotsdraw.procedures import qing_one_arrangement, qing_two_arrangement, uniform_plan


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--markets", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--max-side", type=int, default=8)
    parser.add_argument("--max-regions", type=int, default=4)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    gaps = Counter()
    for t in range(args.markets):
        market, partition = random_qing_market(rng, args.max_side, args.max_regions)
        plan = uniform_plan(market, t)
        one = execute(market, C_PLUS, qing_one_arrangement(market, partition), plan)
        two = execute(market, C_PLUS, qing_two_arrangement(market, partition), plan)
        gaps[len(two) - len(one)] += 1

    print(f"markets: {args.markets}")
    for gap, count in sorted(gaps.items()):
        print(f"  size(qing2) - size(qing1) = {gap:+d}: {count}")
    print("monotone" if min(gaps) >= 0 else "NOT monotone")


if __name__ == "__main__":
    main()
