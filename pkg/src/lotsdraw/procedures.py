"""Arrangement and plan builders for the six lots-drawing procedures.

Every builder is split into an ``*_arrangement`` function, which fixes the
tubes, and a plan rule. Comparative statics run several arrangements with
one shared plan, so the arrangement functions are public on their own.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .engine import (
    AssignmentArrangement,
    AssignmentPlan,
    TubeSequence,
    derive_seed,
    exam_rank_plan,
    sample_uniform_job_orders,
    sample_uniform_worker_order,
    single_sequence,
)
from .model import (
    JobCategory,
    Market,
    MarketError,
    WorkerCategory,
    eligible,
)


class InputError(MarketError):
    """Builder input that does not fit the procedure (orders, categories)."""


class PartitionError(MarketError):
    """A Qing partition that breaks one of its size or cover constraints."""


class ProcedureKind(str, enum.Enum):
    SONG = "song"
    MING_ONE = "ming1"
    MING_TWO = "ming2"
    QING_ONE = "qing1"
    QING_TWO = "qing2"
    TWO_TUBE = "twotube"

    @classmethod
    def parse(cls, token: str) -> "ProcedureKind":
        try:
            return cls(token)
        except ValueError:
            tokens = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown procedure {token!r}; expected one of {tokens}") from None


HISTORICAL = (
    ProcedureKind.SONG,
    ProcedureKind.MING_ONE,
    ProcedureKind.MING_TWO,
    ProcedureKind.QING_ONE,
    ProcedureKind.QING_TWO,
)


@dataclass(frozen=True)
class QingPartition:
    """Split of A- and B-workers between the three Qing tube sequences.

    ``wa1``/``wb1`` go to the A-job and B-job sequences; ``wa2`` and ``wb2``
    share the AB-job sequence.
    """

    wa1: frozenset[str]
    wa2: frozenset[str]
    wb1: frozenset[str]
    wb2: frozenset[str]

    def __post_init__(self) -> None:
        for name in ("wa1", "wa2", "wb1", "wb2"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))

    def validate(self, market: Market) -> None:
        wa = set(market.by_exam_rank(WorkerCategory.A))
        wb = set(market.by_exam_rank(WorkerCategory.B))
        n_a = len(market.jobs_in(JobCategory.A))
        n_ab = len(market.jobs_in(JobCategory.AB))
        n_b = len(market.jobs_in(JobCategory.B))
        if self.wa1 & self.wa2 or self.wa1 | self.wa2 != wa:
            raise PartitionError("wa1 and wa2 must be disjoint and cover the A-workers")
        if self.wb1 & self.wb2 or self.wb1 | self.wb2 != wb:
            raise PartitionError("wb1 and wb2 must be disjoint and cover the B-workers")
        if len(self.wa1) != n_a:
            raise PartitionError(f"|wa1| = |J^A| fails: {len(self.wa1)} != {n_a}")
        if len(self.wb1) != n_b:
            raise PartitionError(f"|wb1| = |J^B| fails: {len(self.wb1)} != {n_b}")
        if len(self.wa2) + len(self.wb2) != n_ab:
            raise PartitionError(
                f"|wa2| + |wb2| = |J^AB| fails: {len(self.wa2) + len(self.wb2)} != {n_ab}"
            )


def default_qing_partition(market: Market) -> QingPartition:
    """Best-ranked workers fill the single-category sequences."""
    a_ranked = market.by_exam_rank(WorkerCategory.A)
    b_ranked = market.by_exam_rank(WorkerCategory.B)
    n_a = len(market.jobs_in(JobCategory.A))
    n_b = len(market.jobs_in(JobCategory.B))
    if len(a_ranked) < n_a:
        raise PartitionError(f"|W^A| >= |J^A| fails: {len(a_ranked)} < {n_a}")
    if len(b_ranked) < n_b:
        raise PartitionError(f"|W^B| >= |J^B| fails: {len(b_ranked)} < {n_b}")
    if len(market.workers) != len(market.jobs):
        raise PartitionError(
            f"|W| = |J| fails: {len(market.workers)} workers, {len(market.jobs)} jobs"
        )
    return QingPartition(
        frozenset(a_ranked[:n_a]),
        frozenset(a_ranked[n_a:]),
        frozenset(b_ranked[:n_b]),
        frozenset(b_ranked[n_b:]),
    )


def _ids(items) -> frozenset[str]:
    return frozenset(i.id for i in items)


def _check_orders(market: Market, orders: Mapping[str, Sequence[str]], what: str) -> None:
    jobs = set(market.job_ids)
    for w in market.worker_ids:
        order = orders.get(w)
        if order is None:
            raise InputError(f"{what}: no job order for worker {w!r}")
        if len(order) != len(set(order)) or set(order) != jobs:
            raise InputError(f"{what}: job order of {w!r} is not a full permutation of the jobs")


def uniform_plan(market: Market, seed: int) -> AssignmentPlan:
    """Worker order and per-worker job orders, all uniform given ``seed``.

    Ming Two, both Qing procedures and the two-tube procedure derive their
    job orders from the same sub-seed, so one master seed yields the same
    job orders for all of them.
    """
    workers = market.worker_ids
    jobs = market.job_ids
    worker_order = sample_uniform_worker_order(workers, derive_seed(seed, "workers")) if workers else ()
    return AssignmentPlan(worker_order, _job_orders(workers, jobs, seed))


def _job_orders(workers: Sequence[str], jobs: Sequence[str], seed: int) -> dict[str, tuple[str, ...]]:
    if not jobs:
        return {w: () for w in workers}
    return sample_uniform_job_orders(workers, jobs, derive_seed(seed, "jobs"))


# -- Song ------------------------------------------------------------------

def song_arrangement(market: Market) -> AssignmentArrangement:
    return single_sequence(
        [_ids(market.workers_in(WorkerCategory.A)), _ids(market.workers_in(WorkerCategory.B))],
        [_ids(market.jobs)],
    )


def build_song(market: Market, song_preferences: Mapping[str, Sequence[str]]):
    _check_orders(market, song_preferences, "song preferences")
    return song_arrangement(market), exam_rank_plan(market, song_preferences)


# -- Ming ------------------------------------------------------------------

def ming_one_arrangement(market: Market) -> AssignmentArrangement:
    return single_sequence(
        [_ids(market.workers_in(WorkerCategory.A)), _ids(market.workers_in(WorkerCategory.B))],
        [_ids(market.jobs_in(c)) for c in (JobCategory.A, JobCategory.AB, JobCategory.B)],
    )


def build_ming_one(market: Market, ministry_orders: Mapping[str, Sequence[str]]):
    _check_orders(market, ministry_orders, "ministry orders")
    return ming_one_arrangement(market), exam_rank_plan(market, ministry_orders)


ming_two_arrangement = song_arrangement


def build_ming_two(market: Market, seed: int):
    return song_arrangement(market), exam_rank_plan(
        market, _job_orders(market.worker_ids, market.job_ids, seed)
    )


# -- Qing ------------------------------------------------------------------

def qing_one_arrangement(market: Market, partition: QingPartition) -> AssignmentArrangement:
    partition.validate(market)
    return AssignmentArrangement(
        (
            TubeSequence((partition.wa1,), (_ids(market.jobs_in(JobCategory.A)),)),
            TubeSequence((partition.wa2 | partition.wb2,), (_ids(market.jobs_in(JobCategory.AB)),)),
            TubeSequence((partition.wb1,), (_ids(market.jobs_in(JobCategory.B)),)),
        )
    )


def split_priority(
    market: Market, workers: Iterable[str], job_tube: Iterable[str]
) -> tuple[frozenset[str], frozenset[str]]:
    """Workers with a native-region job in the tube draw first.

    Inside a Qing sequence every worker is eligible for every job, so the
    only thing that can make a job unusable is the rule of avoidance.
    """
    regions = {market.job(j).region for j in job_tube}
    workers = frozenset(workers)
    priority = frozenset(w for w in workers if market.worker(w).region in regions)
    return priority, workers - priority


def qing_two_arrangement(market: Market, partition: QingPartition) -> AssignmentArrangement:
    sequences = []
    for seq in qing_one_arrangement(market, partition).sequences:
        (tube,) = seq.worker_tubes
        (jobs,) = seq.job_tubes
        sequences.append(TubeSequence(split_priority(market, tube, jobs), seq.job_tubes))
    return AssignmentArrangement(tuple(sequences))


def build_qing_one(market: Market, partition: QingPartition, seed: int):
    return qing_one_arrangement(market, partition), uniform_plan(market, seed)


def build_qing_two(market: Market, partition: QingPartition, seed: int):
    return qing_two_arrangement(market, partition), uniform_plan(market, seed)


# -- two tubes on each side -------------------------------------------------

def is_single_pool(market: Market) -> bool:
    """Whether every worker is eligible for every job."""
    return all(eligible(w.category, j.category) for w in market.workers for j in market.jobs)


def largest_region(market: Market) -> str | None:
    """Region with most workers among regions holding workers and jobs.

    Ties go to the lexicographically smallest region id.
    """
    worker_count: dict[str, int] = {}
    for w in market.workers:
        worker_count[w.region] = worker_count.get(w.region, 0) + 1
    job_regions = {j.region for j in market.jobs}
    candidates = sorted(r for r in worker_count if r in job_regions)
    if not candidates:
        return None
    return min(candidates, key=lambda r: (-worker_count[r], r))


def two_tube_arrangement(market: Market) -> AssignmentArrangement:
    if not is_single_pool(market):
        raise InputError(
            "the two-tube procedure needs one mutually eligible pool of workers and jobs; "
            "run it per category"
        )
    top = largest_region(market)
    first_workers = frozenset(w.id for w in market.workers if w.region == top)
    last_jobs = frozenset(j.id for j in market.jobs if j.region == top)
    return single_sequence(
        [first_workers, _ids(market.workers) - first_workers],
        [_ids(market.jobs) - last_jobs, last_jobs],
    )


def build_two_tube(market: Market, seed: int):
    return two_tube_arrangement(market), uniform_plan(market, seed)


def arrangement_for(
    kind: ProcedureKind, market: Market, partition: QingPartition | None = None
) -> AssignmentArrangement:
    """The arrangement of ``kind``; plans are supplied separately."""
    if kind in (ProcedureKind.SONG, ProcedureKind.MING_TWO):
        return song_arrangement(market)
    if kind is ProcedureKind.MING_ONE:
        return ming_one_arrangement(market)
    if kind in (ProcedureKind.QING_ONE, ProcedureKind.QING_TWO):
        if partition is None:
            raise InputError(f"{kind.value} needs a Qing partition")
        if kind is ProcedureKind.QING_ONE:
            return qing_one_arrangement(market, partition)
        return qing_two_arrangement(market, partition)
    return two_tube_arrangement(market)


def build(
    kind: ProcedureKind,
    market: Market,
    seed: int,
    *,
    partition: QingPartition | None = None,
    song_preferences: Mapping[str, Sequence[str]] | None = None,
):
    """Dispatch to the builder of ``kind``.

    The First Ming ministry orders are drawn from ``seed``; under eligibility
    alone they do not change the outcome.
    """
    if kind is ProcedureKind.SONG:
        if song_preferences is None:
            raise InputError("song needs explicit preferences")
        return build_song(market, song_preferences)
    if kind is ProcedureKind.MING_ONE:
        return build_ming_one(market, _job_orders(market.worker_ids, market.job_ids, seed))
    if kind is ProcedureKind.MING_TWO:
        return build_ming_two(market, seed)
    if kind in (ProcedureKind.QING_ONE, ProcedureKind.QING_TWO):
        if partition is None:
            raise InputError(f"{kind.value} needs a Qing partition")
        if kind is ProcedureKind.QING_ONE:
            return build_qing_one(market, partition, seed)
        return build_qing_two(market, partition, seed)
    return build_two_tube(market, seed)
