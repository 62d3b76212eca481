"""Ground truth for the procedures: maximum matchings, augmenting-path
certificates, brute-force enumeration and the high-level optimality check."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator

from .model import (
    CompatibilityRegime,
    LevelVector,
    Market,
    MarketError,
    Matching,
    compatible_jobs,
    hl_dominates,
    is_feasible,
    level_vector,
)

DEFAULT_BOUND = 16


class SizeError(MarketError):
    """The market is too large for exhaustive enumeration."""


class InfeasibleMatchingError(MarketError):
    pass


@dataclass(frozen=True)
class AugmentingPath:
    """Alternating path ``w0, j0, w1, j1, ..., wk, jk`` between a free worker
    and a free job. Even-indexed edges are outside the matching."""

    vertices: tuple[str, ...]

    def edges(self) -> list[tuple[str, str]]:
        """(worker, job) pairs along the path, in path order."""
        v = self.vertices
        out = []
        for i in range(len(v) - 1):
            out.append((v[i], v[i + 1]) if i % 2 == 0 else (v[i + 1], v[i]))
        return out

    def is_valid(self, market: Market, regime: CompatibilityRegime, mu: Matching) -> bool:
        v = self.vertices
        if len(v) < 2 or len(v) % 2:
            return False
        if len(set(v)) != len(v):
            return False
        if v[0] in mu.job_of or v[-1] in mu.worker_of:
            return False
        adj = compatible_jobs(market, regime)
        for i, (w, j) in enumerate(self.edges()):
            if w not in adj or j not in adj[w]:
                return False
            if (mu.job_of.get(w) == j) != (i % 2 == 1):
                return False
        return True


def augment(mu: Matching, path: AugmentingPath) -> Matching:
    """Flip the path's edges in and out of ``mu``; the size grows by one."""
    edges = path.edges()
    drop = {e for i, e in enumerate(edges) if i % 2 == 1}
    add = {e for i, e in enumerate(edges) if i % 2 == 0}
    return Matching((mu.pairs - drop) | add)


def _require_feasible(market: Market, regime: CompatibilityRegime, mu: Matching) -> None:
    if not is_feasible(market, regime, mu):
        raise InfeasibleMatchingError("matching is not feasible under the regime")


def _search(adj: dict[str, frozenset[str]], mu: Matching) -> AugmentingPath | None:
    # breadth-first over alternating paths from every free worker at once
    parent: dict[str, str | None] = {}
    queue: deque[str] = deque()
    for w in sorted(adj):
        if w not in mu.job_of:
            parent[w] = None
            queue.append(w)
    while queue:
        w = queue.popleft()
        for j in sorted(adj[w]):
            if j in parent:
                continue
            parent[j] = w
            mate = mu.worker_of.get(j)
            if mate is None:
                path = [j]
                node: str | None = w
                while node is not None:
                    path.append(node)
                    node = parent[node]
                return AugmentingPath(tuple(reversed(path)))
            if mate not in parent:
                parent[mate] = j
                queue.append(mate)
    return None


def find_augmenting_path(
    market: Market, regime: CompatibilityRegime, mu: Matching
) -> AugmentingPath | None:
    _require_feasible(market, regime, mu)
    return _search(compatible_jobs(market, regime), mu)


def maximum_matching(market: Market, regime: CompatibilityRegime) -> Matching:
    adj = compatible_jobs(market, regime)
    mu = Matching()
    while (path := _search(adj, mu)) is not None:
        mu = augment(mu, path)
    return mu


def is_maximum(market: Market, regime: CompatibilityRegime, mu: Matching) -> bool:
    return find_augmenting_path(market, regime, mu) is None


def _check_bound(market: Market, bound: int) -> None:
    size = len(market.workers) + len(market.jobs)
    if size > bound:
        raise SizeError(f"|W| + |J| = {size} exceeds the enumeration bound {bound}")


def _enumerate_pairs(market: Market, regime: CompatibilityRegime) -> Iterator[list[tuple[str, str]]]:
    adj = compatible_jobs(market, regime)
    workers = sorted(adj)
    used: set[str] = set()
    chosen: list[tuple[str, str]] = []

    def rec(i: int) -> Iterator[list[tuple[str, str]]]:
        if i == len(workers):
            yield chosen
            return
        w = workers[i]
        yield from rec(i + 1)
        for j in sorted(adj[w]):
            if j in used:
                continue
            used.add(j)
            chosen.append((w, j))
            yield from rec(i + 1)
            chosen.pop()
            used.discard(j)

    yield from rec(0)


def enumerate_feasible_matchings(
    market: Market, regime: CompatibilityRegime, bound: int = DEFAULT_BOUND
) -> Iterator[Matching]:
    """Every feasible matching exactly once, the empty matching first."""
    _check_bound(market, bound)
    for pairs in _enumerate_pairs(market, regime):
        yield Matching(frozenset(pairs))


def achievable_level_vectors(
    market: Market, regime: CompatibilityRegime, bound: int = DEFAULT_BOUND
) -> frozenset[LevelVector]:
    _check_bound(market, bound)
    a_worker = {w.id: w.category.value == "A" for w in market.workers}
    job_cat = {j.id: j.category.value for j in market.jobs}
    seen: set[tuple[int, int, int, int]] = set()
    for pairs in _enumerate_pairs(market, regime):
        seen.add(
            (
                len(pairs),
                sum(a_worker[w] for w, _ in pairs),
                sum(job_cat[j] == "A" for _, j in pairs),
                sum(job_cat[j] == "AB" for _, j in pairs),
            )
        )
    return frozenset(LevelVector(*v) for v in seen)


def is_hl_optimal(
    market: Market,
    regime: CompatibilityRegime,
    mu: Matching,
    bound: int = DEFAULT_BOUND,
    vectors: frozenset[LevelVector] | None = None,
) -> bool:
    """No feasible matching's level vector weakly dominates ``mu``'s while
    differing from it.

    ``vectors`` may carry a precomputed :func:`achievable_level_vectors` to
    score many matchings on one market.
    """
    if vectors is None:
        vectors = achievable_level_vectors(market, regime, bound)
    v = level_vector(market, mu)
    return not any(u != v and hl_dominates(u, v) for u in vectors)


def is_regionally_sufficient(market: Market) -> bool:
    workers: dict[str, int] = {}
    jobs: dict[str, int] = {}
    for w in market.workers:
        workers[w.region] = workers.get(w.region, 0) + 1
    for j in market.jobs:
        jobs[j.region] = jobs.get(j.region, 0) + 1
    return all(workers[r] >= jobs[r] for r in workers if r in jobs)
