"""Command-line front end.

Exit statuses: 0 success, 1 a verified assertion failed, 2 unparsable input,
3 invariant violation, 4 usage or precondition error, 5 IO failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import formats
from .engine import execute
from .experiments import (
    GENERATORS,
    VERIFY_CASES,
    compare_procedures,
    paired_rows,
    verify_case,
)
from .model import CompatibilityRegime, MarketError, level_vector
from .oracle import (
    DEFAULT_BOUND,
    is_hl_optimal,
    is_maximum,
    is_regionally_sufficient,
    maximum_matching,
)
from .procedures import InputError, ProcedureKind, arrangement_for, build

EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_INVALID, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3, 4, 5
MAX_VERIFY_N = 50


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    market_path: str
    procedure: ProcedureKind
    regime: CompatibilityRegime
    seed: int = 0
    trials: int = 1
    partition_path: str | None = None
    preferences_path: str | None = None
    plan_path: str | None = None
    output_path: str | None = None

    def check(self) -> None:
        if self.procedure in (ProcedureKind.QING_ONE, ProcedureKind.QING_TWO) and not self.partition_path:
            raise UsageError(f"{self.procedure.value} requires --partition")
        if self.procedure is ProcedureKind.SONG and not self.preferences_path:
            raise UsageError("song requires --preferences")
        if self.trials < 1:
            raise UsageError(f"--trials must be positive, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_inputs(cfg: RunConfig):
    market = formats.load(cfg.market_path, formats.market_from_dict)
    partition = formats.load(cfg.partition_path, formats.partition_from_dict) if cfg.partition_path else None
    prefs = formats.load(cfg.preferences_path, formats.preferences_from_dict) if cfg.preferences_path else None
    plan = formats.load(cfg.plan_path, formats.plan_from_dict) if cfg.plan_path else None
    return market, partition, prefs, plan


def cmd_run(cfg: RunConfig, trace: bool = False) -> int:
    cfg.check()
    market, partition, prefs, plan = _load_inputs(cfg)
    if plan is None:
        arr, plan = build(cfg.procedure, market, cfg.seed, partition=partition, song_preferences=prefs)
    else:
        arr = arrangement_for(cfg.procedure, market, partition)
    events: list[dict] | None = [] if trace else None
    mu = execute(market, cfg.regime, arr, plan, trace=events)
    within = len(market.workers) + len(market.jobs) <= DEFAULT_BOUND
    report = {
        "procedure": cfg.procedure.value,
        "regime": cfg.regime.value,
        "seed": cfg.seed,
        "matching": formats.matching_to_list(mu),
        "size": len(mu),
        "level_vector": formats.level_to_dict(level_vector(market, mu)),
        "maximum_size": len(maximum_matching(market, cfg.regime)),
        "maximal": is_maximum(market, cfg.regime, mu),
        "hl_optimal": is_hl_optimal(market, cfg.regime, mu) if within else None,
    }
    if events is not None:
        report["trace"] = events
    _emit(formats.dumps(report), cfg.output_path)
    return EXIT_OK


def cmd_verify(case: str, n: int, out: str | None = None) -> int:
    if case != "all" and case not in VERIFY_CASES:
        raise UsageError(f"unknown case {case!r}; expected one of {', '.join(VERIFY_CASES)} or all")
    if not 1 <= n <= MAX_VERIFY_N:
        raise UsageError(f"--n must lie in 1..{MAX_VERIFY_N}, got {n}")
    names = VERIFY_CASES if case == "all" else (case,)
    assertions = [a for name in names for a in verify_case(name, n)]
    passed = all(a["ok"] is not False for a in assertions)
    _emit(formats.dumps({"case": case, "n": n, "passed": passed, "assertions": assertions}), out)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_montecarlo(cfg: RunConfig, procedures: Sequence[ProcedureKind] | None, csv_path: str | None) -> int:
    if cfg.trials < 1:
        raise UsageError(f"--trials must be positive, got {cfg.trials}")
    market, partition, prefs, _ = _load_inputs(cfg)
    for kind in procedures or ():
        if kind in (ProcedureKind.QING_ONE, ProcedureKind.QING_TWO) and partition is None:
            raise UsageError(f"{kind.value} requires --partition")
        if kind is ProcedureKind.SONG and prefs is None:
            raise UsageError("song requires --preferences")
    stats = compare_procedures(
        market, cfg.regime, cfg.trials, cfg.seed, partition, song_preferences=prefs, kinds=procedures
    )
    report = {
        "regime": cfg.regime.value,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "stats": [s.to_dict() for s in stats],
    }
    _emit(formats.dumps(report), cfg.output_path)
    if csv_path:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["trial", "seed", *(s.procedure.value for s in stats)])
        writer.writerows(paired_rows(stats))
        Path(csv_path).write_text(buf.getvalue(), encoding="utf-8")
    return EXIT_OK


def cmd_gen(case: str, n: int, out: str | None) -> int:
    name = "prop2" if case == "prop4" else case
    if name not in GENERATORS:
        raise UsageError(f"unknown case {case!r}")
    if n < 1:
        raise UsageError(f"--n must be at least 1, got {n}")
    generated = GENERATORS[name](n)
    market = formats.market_to_dict(generated.market)
    if out is None:
        _emit(formats.dumps(market), None)
        return EXIT_OK
    path = Path(out)
    stem = path.name[: -len(".json")] if path.name.endswith(".json") else path.name
    formats.write_json(path, market)
    formats.write_json(path.with_name(f"{stem}.plan.json"), formats.plan_to_dict(generated.plan))
    formats.write_json(
        path.with_name(f"{stem}.preferences.json"), formats.orders_to_dict(generated.song_preferences)
    )
    if generated.partition is not None:
        formats.write_json(
            path.with_name(f"{stem}.partition.json"), formats.partition_to_dict(generated.partition)
        )
    return EXIT_OK


def cmd_oracle(market_path: str, regime: CompatibilityRegime, out: str | None = None) -> int:
    market = formats.load(market_path, formats.market_from_dict)
    witness = maximum_matching(market, regime)
    report = {
        "regime": regime.value,
        "maximum_size": len(witness),
        "witness": formats.matching_to_list(witness),
        "regionally_sufficient": is_regionally_sufficient(market),
    }
    _emit(formats.dumps(report), out)
    return EXIT_OK


def _parse_procedures(text: str | None) -> list[ProcedureKind] | None:
    if not text:
        return None
    return [ProcedureKind.parse(t.strip()) for t in text.split(",") if t.strip()]


def _parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lotsdraw", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def market_flags(p, procedure_required):
        p.add_argument("--market", required=True)
        p.add_argument("--procedure", required=procedure_required)
        p.add_argument("--regime", required=True, choices=[r.value for r in CompatibilityRegime])
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=1)
        p.add_argument("--partition")
        p.add_argument("--preferences")
        p.add_argument("--plan")
        p.add_argument("--out")

    run = sub.add_parser("run", help="execute one procedure on a market")
    market_flags(run, True)
    run.add_argument("--trace", action="store_true", help="include the draw-by-draw event list")

    mc = sub.add_parser("montecarlo", help="compare procedures over seeded trials")
    market_flags(mc, False)
    mc.add_argument("--csv", help="write paired per-trial sizes here")

    verify = sub.add_parser("verify", help="check a named case's frozen values")
    verify.add_argument("case")
    verify.add_argument("--n", type=int, default=2)
    verify.add_argument("--out")

    gen = sub.add_parser("gen", help="write a named case's market files")
    gen.add_argument("case")
    gen.add_argument("--n", type=int, default=2)
    gen.add_argument("--out")

    oracle = sub.add_parser("oracle", help="maximum matching and regional sufficiency")
    oracle.add_argument("--market", required=True)
    oracle.add_argument("--regime", required=True, choices=[r.value for r in CompatibilityRegime])
    oracle.add_argument("--out")
    return parser


def _config(args) -> RunConfig:
    kinds = _parse_procedures(args.procedure)
    return RunConfig(
        market_path=args.market,
        procedure=kinds[0] if kinds else ProcedureKind.MING_ONE,
        regime=CompatibilityRegime.parse(args.regime),
        seed=args.seed,
        trials=args.trials,
        partition_path=args.partition,
        preferences_path=args.preferences,
        plan_path=args.plan,
        output_path=args.out,
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(_config(args), trace=args.trace)
        if args.command == "montecarlo":
            return cmd_montecarlo(_config(args), _parse_procedures(args.procedure), args.csv)
        if args.command == "verify":
            return cmd_verify(args.case, args.n, args.out)
        if args.command == "gen":
            return cmd_gen(args.case, args.n, args.out)
        return cmd_oracle(args.market, CompatibilityRegime.parse(args.regime), args.out)
    except formats.FormatError as exc:
        print(f"lotsdraw: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (UsageError, InputError) as exc:
        print(f"lotsdraw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MarketError as exc:
        print(f"lotsdraw: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"lotsdraw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"lotsdraw: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
