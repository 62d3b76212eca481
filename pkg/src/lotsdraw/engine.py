"""Sequential execution of an assignment arrangement under an assignment plan.

Each tube sequence is an independent sub-market. Worker tubes are processed
in order; inside a tube the plan's worker order decides who draws next. A
drawn worker takes the top job, under his own job order, of the first job
tube that still holds a compatible job, and is left unmatched when the
sequence's remaining jobs hold nothing compatible.
"""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .model import (
    CompatibilityRegime,
    Market,
    MarketError,
    Matching,
    WorkerCategory,
    is_compatible,
)


class ArrangementError(MarketError):
    """The tubes of an arrangement do not partition the market."""


class PlanError(MarketError):
    """An assignment plan does not cover the market with strict total orders."""


@dataclass(frozen=True)
class AssignmentPlan:
    worker_order: tuple[str, ...]
    job_orders: Mapping[str, tuple[str, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "worker_order", tuple(self.worker_order))
        object.__setattr__(
            self, "job_orders", {w: tuple(order) for w, order in sorted(self.job_orders.items())}
        )

    def validate(self, market: Market) -> None:
        workers = set(market.worker_ids)
        jobs = set(market.job_ids)
        if len(self.worker_order) != len(set(self.worker_order)) or set(self.worker_order) != workers:
            raise PlanError("worker_order is not a permutation of the market's workers")
        for w in workers:
            order = self.job_orders.get(w)
            if order is None:
                raise PlanError(f"no job order for worker {w!r}")
            if len(order) != len(set(order)) or set(order) != jobs:
                raise PlanError(f"job order of {w!r} is not a permutation of the market's jobs")


@dataclass(frozen=True)
class TubeSequence:
    worker_tubes: tuple[frozenset[str], ...]
    job_tubes: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "worker_tubes", tuple(frozenset(t) for t in self.worker_tubes))
        object.__setattr__(self, "job_tubes", tuple(frozenset(t) for t in self.job_tubes))

    @property
    def workers(self) -> frozenset[str]:
        return frozenset().union(*self.worker_tubes)

    @property
    def jobs(self) -> frozenset[str]:
        return frozenset().union(*self.job_tubes)


@dataclass(frozen=True)
class AssignmentArrangement:
    sequences: tuple[TubeSequence, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "sequences", tuple(self.sequences))


def single_sequence(
    worker_tubes: Sequence[Iterable[str]], job_tubes: Sequence[Iterable[str]]
) -> AssignmentArrangement:
    return AssignmentArrangement(
        (TubeSequence(tuple(map(frozenset, worker_tubes)), tuple(map(frozenset, job_tubes))),)
    )


def validate_arrangement(market: Market, arr: AssignmentArrangement) -> str | None:
    """Return ``None`` when the tubes partition the market, else a report.

    The report names the first violated condition and the offending ids.
    """
    for side, tubes_of, universe in (
        ("worker", lambda s: s.worker_tubes, set(market.worker_ids)),
        ("job", lambda s: s.job_tubes, set(market.job_ids)),
    ):
        seen: dict[str, tuple[int, int]] = {}
        for si, seq in enumerate(arr.sequences):
            for ti, tube in enumerate(tubes_of(seq)):
                unknown = sorted(tube - universe)
                if unknown:
                    return f"unknown {side} ids in sequence {si} tube {ti}: {unknown}"
                clash = sorted(i for i in tube if i in seen)
                if clash:
                    return (
                        f"disjointness violated: {side} ids {clash} appear in sequence "
                        f"{seen[clash[0]][0]} tube {seen[clash[0]][1]} and sequence {si} tube {ti}"
                    )
                for i in tube:
                    seen[i] = (si, ti)
        missing = sorted(universe - set(seen))
        if missing:
            return f"coverage violated: {side} ids {missing} are in no tube"
    return None


def _run_sequence(
    market: Market,
    regime: CompatibilityRegime,
    seq: TubeSequence,
    plan: AssignmentPlan,
    position: Mapping[str, int],
    trace: list[dict] | None,
    index: int,
) -> list[tuple[str, str]]:
    remaining = set(seq.jobs)
    pairs: list[tuple[str, str]] = []
    for t, tube in enumerate(seq.worker_tubes):
        for w in sorted(tube, key=position.__getitem__):
            if trace is not None:
                trace.append({"event": "worker", "sequence": index, "tube": t, "worker": w})
            order = plan.job_orders[w]
            chosen = None
            for a, job_tube in enumerate(seq.job_tubes):
                for j in order:
                    if j not in job_tube or j not in remaining:
                        continue
                    if is_compatible(market, regime, w, j):
                        chosen = j
                        break
                    # an incompatible draw goes back into the tube
                    if trace is not None:
                        trace.append({"event": "skip", "sequence": index, "job_tube": a, "worker": w, "job": j})
                if chosen is not None:
                    break
            if chosen is None:
                if trace is not None:
                    trace.append({"event": "unmatched", "sequence": index, "worker": w})
                continue
            remaining.discard(chosen)
            pairs.append((w, chosen))
            if trace is not None:
                trace.append({"event": "match", "sequence": index, "job_tube": a, "worker": w, "job": chosen})
    return pairs


def execute(
    market: Market,
    regime: CompatibilityRegime,
    arr: AssignmentArrangement,
    plan: AssignmentPlan,
    *,
    trace: list[dict] | None = None,
    parallel: bool = False,
) -> Matching:
    """Run every tube sequence of ``arr`` with ``plan`` and merge the matches.

    ``trace``, when given, receives one event dict per worker drawn, per
    incompatible job drawn and returned, and per match or failure to match.
    With ``parallel=True`` sequences run on a thread pool; the result is
    identical because sequences share no workers or jobs.
    """
    report = validate_arrangement(market, arr)
    if report is not None:
        raise ArrangementError(report)
    plan.validate(market)
    position = {w: i for i, w in enumerate(plan.worker_order)}
    if parallel and len(arr.sequences) > 1:
        traces: list[list[dict] | None] = [[] if trace is not None else None for _ in arr.sequences]
        with ThreadPoolExecutor() as pool:
            futures = [
                pool.submit(_run_sequence, market, regime, seq, plan, position, traces[i], i)
                for i, seq in enumerate(arr.sequences)
            ]
            results = [f.result() for f in futures]
        if trace is not None:
            for t in traces:
                trace.extend(t or ())
    else:
        results = [
            _run_sequence(market, regime, seq, plan, position, trace, i)
            for i, seq in enumerate(arr.sequences)
        ]
    return Matching(frozenset(p for pairs in results for p in pairs))


def derive_seed(seed: int, *labels: object) -> int:
    """Derive an unsigned 64-bit sub-seed from a master seed and labels."""
    text = ":".join([str(int(seed)), *map(str, labels)])
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


def fisher_yates(items: Iterable[str], seed: int) -> tuple[str, ...]:
    """Shuffle ``items`` after sorting them, so the result depends only on the
    set of ids and the seed."""
    out = sorted(items)
    rng = random.Random(seed)
    for i in range(len(out) - 1, 0, -1):
        k = rng.randrange(i + 1)
        out[i], out[k] = out[k], out[i]
    return tuple(out)


def sample_uniform_worker_order(worker_ids: Iterable[str], seed: int) -> tuple[str, ...]:
    ids = list(worker_ids)
    if not ids:
        raise ValueError("cannot sample an order over an empty worker set")
    return fisher_yates(ids, seed)


def sample_uniform_job_orders(
    worker_ids: Iterable[str], job_ids: Iterable[str], seed: int
) -> dict[str, tuple[str, ...]]:
    jobs = sorted(job_ids)
    if not jobs:
        raise ValueError("cannot sample orders over an empty job set")
    # per-worker streams keyed by id: insertion order of workers is irrelevant
    return {w: fisher_yates(jobs, derive_seed(seed, "job-order", w)) for w in sorted(worker_ids)}


def exam_rank_plan(market: Market, job_orders: Mapping[str, Sequence[str]]) -> AssignmentPlan:
    """A-workers by exam rank, then B-workers by exam rank."""
    order = market.by_exam_rank(WorkerCategory.A) + market.by_exam_rank(WorkerCategory.B)
    return AssignmentPlan(tuple(order), {w: tuple(o) for w, o in job_orders.items()})
