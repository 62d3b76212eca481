"""Markets, matchings, compatibility regimes and the two evaluation metrics."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping


class MarketError(ValueError):
    """A market, matching or arrangement violates a structural invariant."""


class UnknownIdError(KeyError):
    """A worker or job id that does not exist in the market."""


class WorkerCategory(str, enum.Enum):
    A = "A"
    B = "B"


class JobCategory(str, enum.Enum):
    A = "A"
    AB = "AB"
    B = "B"


class CompatibilityRegime(str, enum.Enum):
    """Which constraints decide whether a worker may take a job.

    ``ELIGIBILITY_ONLY`` bars A-workers from B-jobs and B-workers from A-jobs.
    ``ELIGIBILITY_AND_AVOIDANCE`` additionally bars a worker from any job in his
    native region.
    """

    ELIGIBILITY_ONLY = "C-"
    ELIGIBILITY_AND_AVOIDANCE = "C+"

    @classmethod
    def parse(cls, token: str) -> "CompatibilityRegime":
        try:
            return cls(token)
        except ValueError:
            raise ValueError(f"unknown regime {token!r}; expected 'C-' or 'C+'") from None


C_MINUS = CompatibilityRegime.ELIGIBILITY_ONLY
C_PLUS = CompatibilityRegime.ELIGIBILITY_AND_AVOIDANCE


@dataclass(frozen=True)
class Worker:
    id: str
    category: WorkerCategory
    region: str
    exam_rank: int


@dataclass(frozen=True)
class Job:
    id: str
    category: JobCategory
    region: str


def eligible(worker_category: WorkerCategory, job_category: JobCategory) -> bool:
    if worker_category is WorkerCategory.A:
        return job_category is not JobCategory.B
    return job_category is not JobCategory.A


@dataclass(frozen=True)
class Market:
    """Workers and jobs over a set of regions.

    The compatibility correspondence is not stored; it is derived from
    categories and regions by :func:`is_compatible` under a regime.
    """

    workers: tuple[Worker, ...] = ()
    jobs: tuple[Job, ...] = ()
    regions: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "workers", tuple(sorted(self.workers, key=lambda w: w.id)))
        object.__setattr__(self, "jobs", tuple(sorted(self.jobs, key=lambda j: j.id)))
        object.__setattr__(self, "regions", tuple(sorted(set(self.regions))))
        regions = set(self.regions)
        if any(not r for r in regions):
            raise MarketError("region ids must be nonempty")
        ids = [w.id for w in self.workers] + [j.id for j in self.jobs]
        if len(ids) != len(set(ids)):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise MarketError(f"duplicate ids: {dup}")
        for item in (*self.workers, *self.jobs):
            if item.region not in regions:
                raise MarketError(f"{item.id!r} references unknown region {item.region!r}")
        seen: set[tuple[WorkerCategory, int]] = set()
        for w in self.workers:
            if w.exam_rank < 1:
                raise MarketError(f"worker {w.id!r} has non-positive exam_rank {w.exam_rank}")
            key = (w.category, w.exam_rank)
            if key in seen:
                raise MarketError(
                    f"exam_rank {w.exam_rank} is repeated within category {w.category.value}"
                )
            seen.add(key)

    @cached_property
    def _workers_by_id(self) -> dict[str, Worker]:
        return {w.id: w for w in self.workers}

    @cached_property
    def _jobs_by_id(self) -> dict[str, Job]:
        return {j.id: j for j in self.jobs}

    def worker(self, wid: str) -> Worker:
        try:
            return self._workers_by_id[wid]
        except KeyError:
            raise UnknownIdError(f"unknown worker id {wid!r}") from None

    def job(self, jid: str) -> Job:
        try:
            return self._jobs_by_id[jid]
        except KeyError:
            raise UnknownIdError(f"unknown job id {jid!r}") from None

    @property
    def worker_ids(self) -> tuple[str, ...]:
        return tuple(w.id for w in self.workers)

    @property
    def job_ids(self) -> tuple[str, ...]:
        return tuple(j.id for j in self.jobs)

    def workers_in(self, category: WorkerCategory) -> tuple[Worker, ...]:
        return tuple(w for w in self.workers if w.category is category)

    def jobs_in(self, category: JobCategory) -> tuple[Job, ...]:
        return tuple(j for j in self.jobs if j.category is category)

    def by_exam_rank(self, category: WorkerCategory) -> list[str]:
        return [w.id for w in sorted(self.workers_in(category), key=lambda w: w.exam_rank)]

    def restrict(self, worker_ids: Iterable[str], job_ids: Iterable[str]) -> "Market":
        ws = set(worker_ids)
        js = set(job_ids)
        return Market(
            tuple(w for w in self.workers if w.id in ws),
            tuple(j for j in self.jobs if j.id in js),
            self.regions,
        )


def is_compatible(market: Market, regime: CompatibilityRegime, w: str, j: str) -> bool:
    worker = market.worker(w)
    job = market.job(j)
    if not eligible(worker.category, job.category):
        return False
    if regime is CompatibilityRegime.ELIGIBILITY_AND_AVOIDANCE:
        return worker.region != job.region
    return True


def compatible_jobs(market: Market, regime: CompatibilityRegime) -> dict[str, frozenset[str]]:
    """Adjacency of the compatibility graph, worker id -> compatible job ids."""
    return {
        w.id: frozenset(j.id for j in market.jobs if is_compatible(market, regime, w.id, j.id))
        for w in market.workers
    }


@dataclass(frozen=True)
class Matching:
    """A partial one-to-one set of (worker id, job id) pairs.

    Value object: it carries no market, so the same matching can be scored
    under either regime.
    """

    pairs: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        pairs = frozenset((str(w), str(j)) for w, j in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        workers = [w for w, _ in pairs]
        jobs = [j for _, j in pairs]
        if len(workers) != len(set(workers)):
            raise MarketError("a worker appears in more than one pair")
        if len(jobs) != len(set(jobs)):
            raise MarketError("a job appears in more than one pair")

    @classmethod
    def from_map(cls, assignment: Mapping[str, str]) -> "Matching":
        return cls(frozenset(assignment.items()))

    @cached_property
    def job_of(self) -> dict[str, str]:
        return dict(self.pairs)

    @cached_property
    def worker_of(self) -> dict[str, str]:
        return {j: w for w, j in self.pairs}

    def sorted_pairs(self) -> list[tuple[str, str]]:
        return sorted(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def is_feasible(market: Market, regime: CompatibilityRegime, mu: Matching) -> bool:
    # every pair is looked up, so dangling ids raise even after a failing pair
    checks = [is_compatible(market, regime, w, j) for w, j in mu.sorted_pairs()]
    return all(checks)


def matching_size(mu: Matching) -> int:
    return len(mu.pairs)


@dataclass(frozen=True, order=True)
class LevelVector:
    total_matched: int
    a_workers_matched: int
    a_jobs_filled: int
    ab_jobs_filled: int

    def __post_init__(self) -> None:
        if self.a_jobs_filled + self.ab_jobs_filled > self.total_matched:
            raise MarketError(f"inconsistent level vector {self.as_tuple()}")
        if self.a_workers_matched > self.total_matched:
            raise MarketError(f"inconsistent level vector {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.total_matched, self.a_workers_matched, self.a_jobs_filled, self.ab_jobs_filled)


def level_vector(market: Market, mu: Matching) -> LevelVector:
    a_workers = a_jobs = ab_jobs = 0
    for w, j in mu.pairs:
        worker = market.worker(w)
        job = market.job(j)
        a_workers += worker.category is WorkerCategory.A
        a_jobs += job.category is JobCategory.A
        ab_jobs += job.category is JobCategory.AB
    return LevelVector(len(mu.pairs), a_workers, a_jobs, ab_jobs)


def hl_dominates(v1: LevelVector, v2: LevelVector) -> bool:
    """Weak coordinatewise dominance of ``v1`` over ``v2``."""
    return all(a >= b for a, b in zip(v1.as_tuple(), v2.as_tuple()))
