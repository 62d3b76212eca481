"""Acceptance criteria, one test per criterion.

Each test prints a single ``[criterion k] PASS|FAIL`` line (shown even under
output capture) and then asserts the same verdict.
"""

import itertools
import random
import time
from collections import Counter

import pytest

from lotsdraw.cli import main
from lotsdraw.engine import execute, sample_uniform_worker_order
from lotsdraw.experiments import (
    gen_example1,
    gen_prop1,
    gen_prop2,
    gen_prop3,
    gen_thm1,
    gen_thm2,
    random_market,
    random_qing_market,
    regionally_sufficient_catalog,
    run_case,
    sequence_outcome_sizes,
)
from lotsdraw.model import (
    C_PLUS,
    Job,
    JobCategory,
    Market,
    Matching,
    Worker,
    WorkerCategory,
    is_compatible,
    level_vector,
)
from lotsdraw.oracle import (
    enumerate_feasible_matchings,
    find_augmenting_path,
    is_hl_optimal,
    is_maximum,
    maximum_matching,
)
from lotsdraw.procedures import (
    ProcedureKind as K,
    arrangement_for,
    build_ming_two,
    largest_region,
    qing_one_arrangement,
    qing_two_arrangement,
    uniform_plan,
)

ALL = list(K)


@pytest.fixture
def verdict(capsys):
    def emit(k: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[criterion {k}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def test_criterion_01_example1(verdict):
    t0 = time.perf_counter()
    case = gen_example1()
    greedy = run_case(case, K.SONG)
    path = find_augmenting_path(case.market, case.regime, greedy)
    maximum = len(maximum_matching(case.market, case.regime))
    elapsed = time.perf_counter() - t0
    ok = (
        len(greedy) == 1
        and maximum == 2
        and path is not None
        and path.vertices == ("w_b", "j_ab", "w_a", "j_a")
        and elapsed < 1
    )
    verdict(1, ok, f"greedy={len(greedy)} max={maximum} path={path and path.vertices} in {elapsed:.3f}s")


def test_criterion_02_prop1(verdict):
    t0 = time.perf_counter()
    bad = []
    for n in range(1, 6):
        case = gen_prop1(n)
        want = {K.SONG: n, K.MING_TWO: n, K.MING_ONE: 2 * n, K.QING_ONE: 2 * n, K.QING_TWO: 2 * n}
        for kind, size in want.items():
            got = len(run_case(case, kind))
            if got != size:
                bad.append(f"n={n} {kind.value}: {got} != {size}")
        if len(maximum_matching(case.market, case.regime)) != 2 * n:
            bad.append(f"n={n} maximum")
    elapsed = time.perf_counter() - t0
    verdict(2, not bad and elapsed < 1, f"{bad or 'all sizes exact'} in {elapsed:.3f}s")


def test_criterion_03_prop2(verdict):
    t0 = time.perf_counter()
    bad = []
    for n in range(2, 6):
        case = gen_prop2(n)
        for kind in ALL:
            got = len(run_case(case, kind))
            if got != n + 1:
                bad.append(f"n={n} {kind.value}: {got} != {n + 1}")
        if len(maximum_matching(case.market, case.regime)) != 2 * n:
            bad.append(f"n={n} maximum")
    elapsed = time.perf_counter() - t0
    verdict(3, not bad and elapsed < 1, f"{bad or 'all six procedures at n+1'} in {elapsed:.3f}s")


def test_prop2_historical_procedures_stall_at_n_plus_one():
    # the five historical procedures alone, under the same plan
    for n in range(2, 6):
        case = gen_prop2(n)
        assert all(len(run_case(case, k)) == n + 1 for k in ALL if k is not K.TWO_TUBE)


def test_criterion_04_prop3(verdict):
    t0 = time.perf_counter()
    bad = []
    for n in range(1, 5):
        case = gen_prop3(n)
        song = run_case(case, K.SONG)
        if level_vector(case.market, song).as_tuple() != (n, n, 0, n):
            bad.append(f"n={n} song vector")
        if is_hl_optimal(case.market, case.regime, song):
            bad.append(f"n={n} song hl-optimal")
        for kind in (K.MING_ONE, K.QING_ONE, K.QING_TWO):
            mu = run_case(case, kind)
            if not is_hl_optimal(case.market, case.regime, mu) or not is_maximum(case.market, case.regime, mu):
                bad.append(f"n={n} {kind.value}")
    elapsed = time.perf_counter() - t0
    verdict(4, not bad and elapsed < 30, f"{bad or 'song dominated, others optimal and maximum'} in {elapsed:.2f}s")


def test_criterion_05_thm1(verdict):
    t0 = time.perf_counter()
    bad = []
    for n in range(1, 6):
        case = gen_thm1(n)
        for kind in (K.SONG, K.MING_TWO):
            mu = run_case(case, kind)
            if len(mu) != 2 * n or not is_maximum(case.market, case.regime, mu):
                bad.append(f"n={n} {kind.value}")
        for kind in (K.MING_ONE, K.QING_ONE, K.QING_TWO):
            mu = run_case(case, kind)
            if len(mu) != n or len(case.market.workers) - len(mu) != n:
                bad.append(f"n={n} {kind.value}")
    elapsed = time.perf_counter() - t0
    verdict(5, not bad and elapsed < 1, f"{bad or 'full vs half exact'} in {elapsed:.3f}s")


def test_criterion_06_thm2(verdict):
    t0 = time.perf_counter()
    rng = random.Random(2024)
    violations = 0
    for t in range(10_000):
        market, partition = random_qing_market(rng, max_side=8, max_regions=4)
        plan = uniform_plan(market, t)
        one = execute(market, C_PLUS, qing_one_arrangement(market, partition), plan)
        two = execute(market, C_PLUS, qing_two_arrangement(market, partition), plan)
        violations += len(two) < len(one)
    gaps = {}
    for n in range(1, 6):
        case = gen_thm2(n)
        gaps[n] = len(run_case(case, K.QING_TWO)) - len(run_case(case, K.QING_ONE))
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and all(g == n for n, g in gaps.items()) and elapsed < 60
    verdict(6, ok, f"violations={violations}/10000 gaps={gaps} in {elapsed:.1f}s")


def _two_tube_facts(market):
    top = largest_region(market)
    j1 = sum(j.region == top for j in market.jobs)
    w_rest = sum(w.region != top for w in market.workers)
    arr = arrangement_for(K.TWO_TUBE, market)
    sizes = sequence_outcome_sizes(market, C_PLUS, arr)
    return sizes, j1 <= w_rest


def _check_thm3(catalog):
    not_max, not_full = [], []
    for market in catalog:
        best = len(maximum_matching(market, C_PLUS))
        sizes, covered = _two_tube_facts(market)
        if sizes != {best}:
            not_max.append(market)
        if covered and sizes != {len(market.jobs)}:
            not_full.append(market)
    return not_max, not_full


def _describe(market):
    w = Counter(x.region for x in market.workers)
    j = Counter(x.region for x in market.jobs)
    return f"W={dict(sorted(w.items()))} J={dict(sorted(j.items()))}"


def test_criterion_07_thm3(verdict):
    t0 = time.perf_counter()
    catalog = regionally_sufficient_catalog(5, 5, ("X", "Y", "Z"))
    not_max, not_full = _check_thm3(catalog)
    elapsed = time.perf_counter() - t0
    ok = len(catalog) >= 200 and not not_max and not not_full and elapsed < 600
    first = _describe(not_max[0]) if not_max else "-"
    verdict(
        7,
        ok,
        f"{len(catalog)} markets, below maximum for some plan: {len(not_max)}, "
        f"jobs left despite |J_1| <= |W_-1|: {len(not_full)}; first counterexample {first}; {elapsed:.1f}s",
    )


def test_two_tube_exact_when_every_job_region_has_workers():
    catalog = [
        m
        for m in regionally_sufficient_catalog(5, 5, ("X", "Y", "Z"))
        if {j.region for j in m.jobs} <= {w.region for w in m.workers}
    ]
    assert len(catalog) >= 200
    not_max, not_full = _check_thm3(catalog)
    assert not not_max and not not_full


def test_two_tube_counterexamples_all_have_workerless_job_regions():
    not_max, not_full = _check_thm3(regionally_sufficient_catalog(5, 5, ("X", "Y", "Z")))
    for m in not_max + not_full:
        assert {j.region for j in m.jobs} - {w.region for w in m.workers}


def _random_feasible(market, rng):
    edges = [
        (w, j)
        for w, j in itertools.product(market.worker_ids, market.job_ids)
        if is_compatible(market, C_PLUS, w, j)
    ]
    rng.shuffle(edges)
    used, pairs = set(), []
    for w, j in edges:
        if w not in used and j not in used:
            used |= {w, j}
            pairs.append((w, j))
    return Matching(frozenset(rng.sample(pairs, rng.randint(0, len(pairs)))))


def _brute_max(market):
    cap = min(len(market.workers), len(market.jobs))
    best = 0
    for mu in enumerate_feasible_matchings(market, C_PLUS, bound=16):
        best = max(best, len(mu))
        if best == cap:
            break
    return best


def test_criterion_08_berge(verdict):
    t0 = time.perf_counter()
    rng = random.Random(8)
    checked = disagreements = 0
    for _ in range(1000):
        market = random_market(rng, max_workers=8, max_jobs=8, max_regions=4)
        best = _brute_max(market)
        for _ in range(10):
            mu = _random_feasible(market, rng)
            checked += 1
            disagreements += is_maximum(market, C_PLUS, mu) != (len(mu) == best)
    elapsed = time.perf_counter() - t0
    verdict(8, disagreements == 0 and elapsed < 300,
            f"{disagreements} disagreements over {checked} matchings in {elapsed:.1f}s")


def test_criterion_09_uniformity(verdict):
    m = Market(
        (Worker("w", WorkerCategory.A, "X", 1),),
        (Job("j1", JobCategory.A, "Y"), Job("j2", JobCategory.AB, "Z")),
        ("X", "Y", "Z"),
    )
    freq = Counter(
        execute(m, C_PLUS, *build_ming_two(m, s)).job_of["w"] for s in range(10_000)
    )
    job_dev = max(abs(freq[j] / 10_000 - 0.5) for j in ("j1", "j2"))
    orders = Counter(sample_uniform_worker_order(["w1", "w2", "w3"], s) for s in range(60_000))
    order_dev = max(abs(orders[p] / 60_000 - 1 / 6) for p in itertools.permutations(["w1", "w2", "w3"]))
    ok = job_dev <= 0.02 and order_dev <= 0.01 and len(orders) == 6
    verdict(9, ok, f"job deviation {job_dev:.4f} (<= 0.02), order deviation {order_dev:.4f} (<= 0.01)")


def test_criterion_10_determinism(verdict, tmp_path):
    assert main(["gen", "thm2", "--n", "3", "--out", str(tmp_path / "m.json")]) == 0
    common = ["--market", str(tmp_path / "m.json"), "--regime", "C+", "--seed", "2026",
              "--partition", str(tmp_path / "m.partition.json")]
    blobs = {}
    for i in range(2):
        run_out = tmp_path / f"run{i}.json"
        mc_out, csv_out = tmp_path / f"mc{i}.json", tmp_path / f"mc{i}.csv"
        assert main(["run", *common, "--procedure", "qing2", "--trace", "--out", str(run_out)]) == 0
        assert main(["montecarlo", *common, "--trials", "300", "--out", str(mc_out), "--csv", str(csv_out)]) == 0
        blobs[i] = (run_out.read_bytes(), mc_out.read_bytes(), csv_out.read_bytes())
    verdict(10, blobs[0] == blobs[1], "run, montecarlo JSON and CSV byte-identical across two invocations")
