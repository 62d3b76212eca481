"""Named counterexample markets, exhaustive all-plan
outcomes, and a seeded Monte-Carlo harness for comparing procedures."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .engine import AssignmentArrangement, AssignmentPlan, derive_seed, execute
from .model import (
    C_MINUS,
    C_PLUS,
    CompatibilityRegime,
    Job,
    JobCategory,
    LevelVector,
    Market,
    Worker,
    WorkerCategory,
    compatible_jobs,
    level_vector,
)
from .oracle import DEFAULT_BOUND, achievable_level_vectors, is_hl_optimal, maximum_matching
from .procedures import (
    HISTORICAL,
    InputError,
    ProcedureKind,
    QingPartition,
    arrangement_for,
    build,
    default_qing_partition,
    is_single_pool,
)

K = ProcedureKind


@dataclass(frozen=True)
class GeneratedCase:
    """A named market with its fixed plan and the frozen outcomes.

    ``expected`` and ``hl_optimal`` are hand-derived from the construction,
    never computed by the engine.
    """

    name: str
    n: int
    regime: CompatibilityRegime
    market: Market
    plan: AssignmentPlan
    partition: QingPartition | None
    expected: Mapping[ProcedureKind, tuple[int, LevelVector]]
    hl_optimal: Mapping[ProcedureKind, bool]
    maximum_size: int

    @property
    def song_preferences(self) -> Mapping[str, tuple[str, ...]]:
        return self.plan.job_orders


def _workers(category: str, region: str, count: int, first_rank: int) -> list[Worker]:
    return [
        Worker(f"w{category}_{region}_{i}", WorkerCategory(category), region, first_rank + i - 1)
        for i in range(1, count + 1)
    ]


def _jobs(category: str, region: str, count: int) -> list[Job]:
    return [Job(f"j{category}_{region}_{i}", JobCategory(category), region) for i in range(1, count + 1)]


def _plan(worker_groups: Sequence[Sequence[Worker]], job_groups: Sequence[Sequence[Job]]) -> AssignmentPlan:
    workers = [w.id for group in worker_groups for w in group]
    jobs = tuple(j.id for group in job_groups for j in group)
    return AssignmentPlan(tuple(workers), {w: jobs for w in workers})


def _lv(*v: int) -> LevelVector:
    return LevelVector(*v)


def _require_n(n: int) -> None:
    if n < 1:
        raise InputError(f"scale n must be at least 1, got {n}")


def _case(name, n, regime, market, plan, expected, hl_optimal, maximum_size) -> GeneratedCase:
    return GeneratedCase(
        name, n, regime, market, plan, default_qing_partition(market), expected, hl_optimal, maximum_size
    )


def gen_example1() -> GeneratedCase:
    w_a = Worker("w_a", WorkerCategory.A, "R", 1)
    w_b = Worker("w_b", WorkerCategory.B, "R", 1)
    j_a = Job("j_a", JobCategory.A, "R")
    j_ab = Job("j_ab", JobCategory.AB, "R")
    market = Market((w_a, w_b), (j_a, j_ab), ("R",))
    plan = _plan([[w_a, w_b]], [[j_ab, j_a]])
    greedy, full = (1, _lv(1, 1, 0, 1)), (2, _lv(2, 1, 1, 1))
    expected = {K.SONG: greedy, K.MING_TWO: greedy, K.MING_ONE: full, K.QING_ONE: full, K.QING_TWO: full}
    hl = {k: v[0] == 2 for k, v in expected.items()}
    return _case("example1", 1, C_MINUS, market, plan, expected, hl, 2)


def gen_prop1(n: int) -> GeneratedCase:
    """A-workers first, every worker ranks AB-jobs above A-jobs."""
    _require_n(n)
    wa, wb = _workers("A", "X", n, 1), _workers("B", "X", n, 1)
    ja, jab = _jobs("A", "X", n), _jobs("AB", "X", n)
    market = Market((*wa, *wb), (*ja, *jab), ("X",))
    plan = _plan([wa, wb], [jab, ja])
    greedy, full = (n, _lv(n, n, 0, n)), (2 * n, _lv(2 * n, n, n, n))
    expected = {K.SONG: greedy, K.MING_TWO: greedy, K.MING_ONE: full, K.QING_ONE: full, K.QING_TWO: full}
    hl = {k: v is full for k, v in expected.items()}
    return _case("prop1", n, C_MINUS, market, plan, expected, hl, 2 * n)


def gen_prop3(n: int) -> GeneratedCase:
    # the dominating matching needs n B-workers and n A-jobs; B-jobs would
    # let the Song B-workers match and change its level vector
    return replace(gen_prop1(n), name="prop3")


def gen_prop2(n: int) -> GeneratedCase:
    """Y-workers first; jobs ranked Z, then X, then Y, by every worker."""
    _require_n(n)
    wy, wx = _workers("A", "Y", n, 1), _workers("A", "X", n, n + 1)
    jz, jx, jy = _jobs("A", "Z", n), _jobs("A", "X", n - 1), _jobs("A", "Y", 1)
    market = Market((*wy, *wx), (*jz, *jx, *jy), ("X", "Y", "Z"))
    plan = _plan([wy, wx], [jz, jx, jy])
    stuck = (n + 1, _lv(n + 1, n + 1, n + 1, 0))
    expected = {k: stuck for k in HISTORICAL}
    # region X draws first: it takes the Z-jobs, the Y-job is left to nobody
    two = 2 if n == 1 else 2 * n - 1
    expected[K.TWO_TUBE] = (two, _lv(two, two, two, 0))
    hl = {k: v[0] == 2 * n for k, v in expected.items()}
    return _case("prop2", n, C_PLUS, market, plan, expected, hl, 2 * n)


def gen_thm1(n: int) -> GeneratedCase:
    """Y-workers hold the better exam ranks and are drawn first; every
    worker ranks the region-X AB-jobs above the region-Z A-jobs."""
    _require_n(n)
    wy, wx = _workers("A", "Y", n, 1), _workers("A", "X", n, n + 1)
    jab, ja = _jobs("AB", "X", n), _jobs("A", "Z", n)
    market = Market((*wy, *wx), (*ja, *jab), ("X", "Y", "Z"))
    plan = _plan([wy, wx], [jab, ja])
    full, half = (2 * n, _lv(2 * n, 2 * n, n, n)), (n, _lv(n, n, n, 0))
    expected = {
        K.SONG: full, K.MING_TWO: full, K.TWO_TUBE: full,
        K.MING_ONE: half, K.QING_ONE: half, K.QING_TWO: half,
    }
    hl = {k: v is full for k, v in expected.items()}
    return _case("thm1", n, C_PLUS, market, plan, expected, hl, 2 * n)


def gen_thm2(n: int) -> GeneratedCase:
    """Y-workers first; Z-jobs ranked above X-jobs."""
    _require_n(n)
    wy, wx = _workers("A", "Y", n, 1), _workers("A", "X", n, n + 1)
    jz, jx = _jobs("A", "Z", n), _jobs("A", "X", n)
    market = Market((*wy, *wx), (*jz, *jx), ("X", "Y", "Z"))
    plan = _plan([wy, wx], [jz, jx])
    half, full = (n, _lv(n, n, n, 0)), (2 * n, _lv(2 * n, 2 * n, 2 * n, 0))
    expected = {
        K.SONG: half, K.MING_ONE: half, K.MING_TWO: half, K.QING_ONE: half,
        K.QING_TWO: full, K.TWO_TUBE: full,
    }
    hl = {k: v is full for k, v in expected.items()}
    return _case("thm2", n, C_PLUS, market, plan, expected, hl, 2 * n)


def gen_thm3(n: int) -> GeneratedCase:
    """Regionally sufficient two-region market: X has n+1 workers and n jobs,
    Y has n workers and one job. Only the two-tube outcome is fixed."""
    _require_n(n)
    wx, wy = _workers("A", "X", n + 1, 1), _workers("A", "Y", n, n + 2)
    jx, jy = _jobs("A", "X", n), _jobs("A", "Y", 1)
    market = Market((*wx, *wy), (*jx, *jy), ("X", "Y"))
    plan = _plan([wy, wx], [jx, jy])
    full = (n + 1, _lv(n + 1, n + 1, n + 1, 0))
    return GeneratedCase(
        "thm3", n, C_PLUS, market, plan, None,
        {K.TWO_TUBE: full}, {K.TWO_TUBE: True}, n + 1,
    )


GENERATORS = {
    "example1": lambda n: gen_example1(),
    "prop1": gen_prop1,
    "prop2": gen_prop2,
    "prop3": gen_prop3,
    "thm1": gen_thm1,
    "thm2": gen_thm2,
    "thm3": gen_thm3,
}


def run_case(case: GeneratedCase, kind: ProcedureKind):
    """Execute ``kind``'s arrangement with the case's fixed plan."""
    arr = arrangement_for(kind, case.market, case.partition)
    return execute(case.market, case.regime, arr, case.plan)


# -- every plan at once ------------------------------------------------------

def sequence_outcome_sizes(
    market: Market, regime: CompatibilityRegime, arr: AssignmentArrangement
) -> frozenset[int]:
    """Matching sizes reachable from ``arr`` over every assignment plan.

    A plan only matters through which worker of the current tube draws next
    and which compatible job of the first non-exhausted job tube he takes;
    each such branch is realized by some plan and every plan follows one
    branch, so walking the branches is the same as walking all plans.
    """
    adj = compatible_jobs(market, regime)
    totals = frozenset({0})
    for seq in arr.sequences:
        tubes = seq.worker_tubes
        job_tubes = seq.job_tubes

        @lru_cache(maxsize=None)
        def reach(t: int, waiting: frozenset[str], remaining: frozenset[str]) -> frozenset[int]:
            if not waiting:
                if t + 1 >= len(tubes):
                    return frozenset({0})
                return reach(t + 1, tubes[t + 1], remaining)
            out: set[int] = set()
            for w in waiting:
                rest = waiting - {w}
                options: frozenset[str] = frozenset()
                for job_tube in job_tubes:
                    options = adj[w] & remaining & job_tube
                    if options:
                        break
                if not options:
                    out |= reach(t, rest, remaining)
                    continue
                for j in options:
                    out |= {1 + s for s in reach(t, rest, remaining - {j})}
            return frozenset(out)

        sizes = reach(0, tubes[0], seq.jobs) if tubes else frozenset({0})
        totals = frozenset(a + b for a in totals for b in sizes)
    return totals


def iter_all_plans(market: Market) -> Iterator[AssignmentPlan]:
    """Literal enumeration of every plan; only usable on tiny markets."""
    workers, jobs = market.worker_ids, market.job_ids
    job_perms = list(itertools.permutations(jobs))
    for order in itertools.permutations(workers):
        for combo in itertools.product(job_perms, repeat=len(workers)):
            yield AssignmentPlan(order, dict(zip(workers, combo)))


def single_pool_market(worker_counts: Mapping[str, int], job_counts: Mapping[str, int]) -> Market:
    regions = sorted(set(worker_counts) | set(job_counts))
    workers, jobs, rank = [], [], 1
    for r in regions:
        workers += _workers("A", r, worker_counts.get(r, 0), rank)
        rank += worker_counts.get(r, 0)
        jobs += _jobs("A", r, job_counts.get(r, 0))
    return Market(tuple(workers), tuple(jobs), tuple(regions))


def regionally_sufficient_catalog(
    max_workers: int = 5, max_jobs: int = 5, regions: Sequence[str] = ("X", "Y", "Z")
) -> list[Market]:
    """Every regionally sufficient single-category market up to the given
    totals, one market per labelled vector of per-region counts."""
    from .oracle import is_regionally_sufficient

    def splits(total_max: int) -> list[tuple[int, ...]]:
        return [
            c for c in itertools.product(range(total_max + 1), repeat=len(regions)) if sum(c) <= total_max
        ]

    out = []
    for wc in splits(max_workers):
        for jc in splits(max_jobs):
            market = single_pool_market(dict(zip(regions, wc)), dict(zip(regions, jc)))
            if is_regionally_sufficient(market):
                out.append(market)
    return out


def random_qing_market(rng: random.Random, max_side: int = 8, max_regions: int = 4):
    """A market that admits a Qing partition, with a random one.

    Job counts are drawn first; A- and B-workers are then sized so that
    every sequence is exactly filled.
    """
    n_regions = rng.randint(1, max_regions)
    regions = [f"R{i}" for i in range(n_regions)]
    m = rng.randint(1, max_side)
    cats = [rng.choice(("A", "AB", "B")) for _ in range(m)]
    n_a, n_ab, n_b = (cats.count(c) for c in ("A", "AB", "B"))
    k = rng.randint(0, n_ab)
    n_wa, n_wb = n_a + k, n_b + n_ab - k
    ranks_a = rng.sample(range(1, n_wa + 1), n_wa)
    ranks_b = rng.sample(range(1, n_wb + 1), n_wb)
    workers = [Worker(f"wA{i}", WorkerCategory.A, rng.choice(regions), ranks_a[i]) for i in range(n_wa)]
    workers += [Worker(f"wB{i}", WorkerCategory.B, rng.choice(regions), ranks_b[i]) for i in range(n_wb)]
    jobs = [Job(f"j{c}{i}", JobCategory(c), rng.choice(regions)) for i, c in enumerate(cats)]
    market = Market(tuple(workers), tuple(jobs), tuple(regions))
    wa = [w.id for w in workers if w.category is WorkerCategory.A]
    wb = [w.id for w in workers if w.category is WorkerCategory.B]
    rng.shuffle(wa)
    rng.shuffle(wb)
    partition = QingPartition(
        frozenset(wa[:n_a]), frozenset(wa[n_a:]), frozenset(wb[:n_b]), frozenset(wb[n_b:])
    )
    return market, partition


def random_market(rng: random.Random, max_workers: int = 4, max_jobs: int = 4, max_regions: int = 3) -> Market:
    regions = [f"R{i}" for i in range(rng.randint(1, max_regions))]
    workers = []
    ranks = {"A": 1, "B": 1}
    for i in range(rng.randint(0, max_workers)):
        c = rng.choice("AB")
        workers.append(Worker(f"w{i}", WorkerCategory(c), rng.choice(regions), ranks[c]))
        ranks[c] += 1
    jobs = [
        Job(f"j{i}", JobCategory(rng.choice(("A", "AB", "B"))), rng.choice(regions))
        for i in range(rng.randint(0, max_jobs))
    ]
    return Market(tuple(workers), tuple(jobs), tuple(regions))


# -- Monte Carlo -------------------------------------------------------------

@dataclass(frozen=True)
class TrialStats:
    procedure: ProcedureKind
    trials: int
    mean_size: float
    size_histogram: Mapping[int, int]
    frac_maximum: float
    frac_hl_optimal: float | None
    seed: int
    sizes: tuple[int, ...] = field(default=(), repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "procedure": self.procedure.value,
            "trials": self.trials,
            "mean_size": self.mean_size,
            "size_histogram": {str(k): v for k, v in sorted(self.size_histogram.items())},
            "frac_maximum": self.frac_maximum,
            "frac_hl_optimal": self.frac_hl_optimal,
            "seed": self.seed,
        }


def trial_seed(master_seed: int, t: int) -> int:
    return derive_seed(master_seed, "trial", t)


def _context(market: Market, regime: CompatibilityRegime, bound: int):
    max_size = len(maximum_matching(market, regime))
    within = len(market.workers) + len(market.jobs) <= bound
    vectors = achievable_level_vectors(market, regime, bound) if within else None
    return max_size, vectors


def _run(
    market, kind, regime, trials, master_seed, partition, song_preferences, max_size, vectors
) -> TrialStats:
    if trials < 1:
        raise InputError(f"trials must be at least 1, got {trials}")
    if kind in (K.QING_ONE, K.QING_TWO) and partition is None:
        raise InputError(f"{kind.value} needs a Qing partition")
    sizes, n_max, n_hl = [], 0, 0
    for t in range(trials):
        arr, plan = build(kind, market, trial_seed(master_seed, t),
                          partition=partition, song_preferences=song_preferences)
        mu = execute(market, regime, arr, plan)
        sizes.append(len(mu))
        n_max += len(mu) == max_size
        if vectors is not None:
            n_hl += is_hl_optimal(market, regime, mu, vectors=vectors)
    histogram: dict[int, int] = {}
    for s in sizes:
        histogram[s] = histogram.get(s, 0) + 1
    return TrialStats(
        kind,
        trials,
        sum(sizes) / trials,
        dict(sorted(histogram.items())),
        n_max / trials,
        n_hl / trials if vectors is not None else None,
        master_seed,
        tuple(sizes),
    )


def run_monte_carlo(
    market: Market,
    kind: ProcedureKind,
    regime: CompatibilityRegime,
    trials: int,
    master_seed: int,
    partition: QingPartition | None = None,
    *,
    song_preferences: Mapping[str, Sequence[str]] | None = None,
    bound: int = DEFAULT_BOUND,
) -> TrialStats:
    """Trial ``t`` builds the procedure from ``derive_seed(master_seed,
    "trial", t)``. ``frac_hl_optimal`` is ``None`` beyond the enumeration
    bound."""
    max_size, vectors = _context(market, regime, bound)
    return _run(market, kind, regime, trials, master_seed, partition, song_preferences, max_size, vectors)


def applicable_procedures(
    market: Market,
    partition: QingPartition | None = None,
    song_preferences: Mapping[str, Sequence[str]] | None = None,
) -> list[ProcedureKind]:
    kinds = []
    if song_preferences is not None:
        kinds.append(K.SONG)
    kinds += [K.MING_ONE, K.MING_TWO]
    if partition is not None:
        kinds += [K.QING_ONE, K.QING_TWO]
    if is_single_pool(market):
        kinds.append(K.TWO_TUBE)
    return kinds


def compare_procedures(
    market: Market,
    regime: CompatibilityRegime,
    trials: int,
    master_seed: int,
    partition: QingPartition | None = None,
    *,
    song_preferences: Mapping[str, Sequence[str]] | None = None,
    kinds: Sequence[ProcedureKind] | None = None,
    bound: int = DEFAULT_BOUND,
) -> list[TrialStats]:
    """Run several procedures on the same per-trial seeds.

    Song joins only when preferences are given, the Qing procedures only
    with a partition, and the two-tube procedure only on a single pool.
    ``TrialStats.sizes`` lines up trial by trial across the results.
    """
    if kinds is None:
        kinds = applicable_procedures(market, partition, song_preferences)
    if trials < 1:
        raise InputError(f"trials must be at least 1, got {trials}")
    max_size, vectors = _context(market, regime, bound)
    return [
        _run(market, k, regime, trials, master_seed, partition, song_preferences, max_size, vectors)
        for k in kinds
    ]


def paired_rows(stats: Sequence[TrialStats]) -> list[list[int]]:
    """Per-trial rows ``[trial, seed, size per procedure...]``."""
    if not stats:
        return []
    master = stats[0].seed
    return [
        [t, trial_seed(master, t), *(s.sizes[t] for s in stats)] for t in range(stats[0].trials)
    ]


def case_level(case: GeneratedCase, kind: ProcedureKind) -> LevelVector:
    return level_vector(case.market, run_case(case, kind))


# -- fixture verification ------------------------------------------------------

VERIFY_CASES = ("example1", "prop1", "prop2", "prop3", "prop4", "thm1", "thm2", "thm3")


def _check(out: list[dict], case: str, check: str, expected, actual) -> None:
    out.append({"case": case, "check": check, "expected": expected, "actual": actual, "ok": expected == actual})


def verify_case(name: str, n: int, bound: int = DEFAULT_BOUND, sampled_plans: int = 200) -> list[dict]:
    """Regenerate case ``name`` at scale ``n`` and check every frozen value.

    High-level optimality is asserted only within the enumeration bound;
    outside it the check is reported with ``ok`` set to ``None``.
    """
    from .oracle import find_augmenting_path, is_maximum

    if name not in VERIFY_CASES:
        raise InputError(f"unknown case {name!r}")
    case = GENERATORS["prop2" if name == "prop4" else name](n)
    out: list[dict] = []
    within = len(case.market.workers) + len(case.market.jobs) <= bound
    vectors = achievable_level_vectors(case.market, case.regime, bound) if within else None
    max_size = len(maximum_matching(case.market, case.regime))
    _check(out, name, "maximum_size", case.maximum_size, max_size)
    outcomes = {}
    for kind, (size, vec) in case.expected.items():
        mu = run_case(case, kind)
        outcomes[kind] = mu
        if name != "prop4":
            _check(out, name, f"{kind.value}.size", size, len(mu))
            _check(out, name, f"{kind.value}.level_vector", list(vec.as_tuple()),
                   list(level_vector(case.market, mu).as_tuple()))
            _check(out, name, f"{kind.value}.is_maximum", size == case.maximum_size,
                   is_maximum(case.market, case.regime, mu))
        if name in ("prop3", "prop4", "thm1", "thm2", "example1"):
            check = f"{kind.value}.hl_optimal"
            if vectors is None:
                out.append({"case": name, "check": check, "expected": case.hl_optimal[kind],
                            "actual": None, "ok": None})
            else:
                _check(out, name, check, case.hl_optimal[kind],
                       is_hl_optimal(case.market, case.regime, mu, vectors=vectors))
    if name == "example1":
        path = find_augmenting_path(case.market, case.regime, outcomes[K.SONG])
        _check(out, name, "augmenting_path", ["w_b", "j_ab", "w_a", "j_a"],
               list(path.vertices) if path else None)
    if name == "thm2":
        _check(out, name, "qing2_minus_qing1", n,
               len(outcomes[K.QING_TWO]) - len(outcomes[K.QING_ONE]))
    if name == "thm3":
        arr = arrangement_for(K.TWO_TUBE, case.market)
        if within:
            sizes = sorted(sequence_outcome_sizes(case.market, case.regime, arr))
            _check(out, name, "twotube.sizes_over_all_plans", [max_size], sizes)
        else:
            sizes = sorted({
                len(execute(case.market, case.regime, *build(K.TWO_TUBE, case.market, trial_seed(0, t))))
                for t in range(sampled_plans)
            })
            _check(out, name, f"twotube.sizes_over_{sampled_plans}_sampled_plans", [max_size], sizes)
    return out
