"""Monte-Carlo comparison of every applicable procedure on the generated cases.

Prints mean size and the share of maximum outcomes per case and procedure.

    python3 scripts/compare_cases.py --n 2 --trials 2000
"""

import argparse

from lotsdraw.experiments import GENERATORS, compare_procedures


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=2)
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'case':10} {'procedure':10} {'mean':>7} {'max':>5} {'frac_max':>9} {'frac_hl':>8}")
    for name, make in GENERATORS.items():
        case = make(args.n)
        stats = compare_procedures(
            case.market, case.regime, args.trials, args.seed, case.partition,
            song_preferences=case.song_preferences,
        )
        for s in stats:
            hl = "-" if s.frac_hl_optimal is None else f"{s.frac_hl_optimal:.3f}"
            print(f"{name:10} {s.procedure.value:10} {s.mean_size:7.3f} {case.maximum_size:5d} "
                  f"{s.frac_maximum:9.3f} {hl:>8}")


if __name__ == "__main__":
    main()
