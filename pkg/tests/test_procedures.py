from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lotsdraw.engine import derive_seed, execute, fisher_yates, validate_arrangement
from lotsdraw.experiments import gen_prop1, gen_thm1, gen_thm2, single_pool_market
from lotsdraw.model import (
    C_MINUS,
    C_PLUS,
    Job,
    JobCategory,
    Market,
    Matching,
    Worker,
    WorkerCategory,
    level_vector,
)
from lotsdraw.oracle import maximum_matching
from lotsdraw.procedures import (
    InputError,
    PartitionError,
    ProcedureKind,
    QingPartition,
    build,
    build_ming_one,
    build_ming_two,
    build_qing_one,
    build_qing_two,
    build_song,
    build_two_tube,
    default_qing_partition,
    largest_region,
    split_priority,
    two_tube_arrangement,
)
from strategies import markets, qing_markets, single_pool_markets

A = WorkerCategory.A


def run(market, regime, built):
    arr, plan = built
    return execute(market, regime, arr, plan)


class TestSong:
    def test_prop1_both_prefer_ab(self):
        case = gen_prop1(1)
        prefs = {w: ("jAB_X_1", "jA_X_1") for w in case.market.worker_ids}
        mu = run(case.market, C_MINUS, build_song(case.market, prefs))
        assert mu == Matching.from_map({"wA_X_1": "jAB_X_1"})

    def test_single_pair(self):
        m = Market((Worker("w", A, "X", 1),), (Job("j", JobCategory.A, "Y"),), ("X", "Y"))
        assert len(run(m, C_PLUS, build_song(m, {"w": ("j",)}))) == 1

    def test_thm1_case_preferences_match_everyone(self):
        case = gen_thm1(1)
        assert len(run(case.market, C_PLUS, build_song(case.market, case.song_preferences))) == 2

    def test_incomplete_preferences_rejected(self):
        case = gen_prop1(1)
        with pytest.raises(InputError):
            build_song(case.market, {"wA_X_1": ("jAB_X_1", "jA_X_1")})

    def test_exam_rank_drives_order(self):
        case = gen_prop1(2)
        _, plan = build_song(case.market, case.song_preferences)
        assert plan.worker_order == ("wA_X_1", "wA_X_2", "wB_X_1", "wB_X_2")


class TestMingOne:
    def test_prop1_any_orders_match_all(self):
        case = gen_prop1(2)
        for seed in range(20):
            orders = {w: fisher_yates(case.market.job_ids, derive_seed(seed, w)) for w in case.market.worker_ids}
            mu = run(case.market, C_MINUS, build_ming_one(case.market, orders))
            assert level_vector(case.market, mu).as_tuple() == (4, 2, 2, 2)
            assert all(j.startswith("jA_") for w, j in mu.pairs if w.startswith("wA"))
            assert all(j.startswith("jAB_") for w, j in mu.pairs if w.startswith("wB"))

    def test_thm1_x_workers_unmatched(self):
        case = gen_thm1(2)
        mu = run(case.market, C_PLUS, build_ming_one(case.market, case.plan.job_orders))
        assert mu.job_of == {"wA_Y_1": mu.job_of["wA_Y_1"], "wA_Y_2": mu.job_of["wA_Y_2"]}
        assert {j for _, j in mu.pairs} == {"jA_Z_1", "jA_Z_2"}

    def test_b_jobs_unfilled_without_b_workers(self):
        m = Market(
            (Worker("w", A, "X", 1),),
            (Job("ja", JobCategory.A, "Y"), Job("jb", JobCategory.B, "Y")),
            ("X", "Y"),
        )
        mu = run(m, C_MINUS, build_ming_one(m, {"w": ("jb", "ja")}))
        assert mu == Matching.from_map({"w": "ja"})

    @settings(max_examples=60)
    @given(markets(max_workers=4, max_jobs=4), st.integers(0, 2**32), st.integers(0, 2**32))
    def test_invariant_to_ministry_orders_under_eligibility(self, market, s1, s2):
        def orders(seed):
            if not market.job_ids:
                return {w: () for w in market.worker_ids}
            return {w: fisher_yates(market.job_ids, derive_seed(seed, w)) for w in market.worker_ids}

        v1 = level_vector(market, run(market, C_MINUS, build_ming_one(market, orders(s1))))
        v2 = level_vector(market, run(market, C_MINUS, build_ming_one(market, orders(s2))))
        assert v1 == v2


class TestMingTwo:
    def test_deterministic(self):
        case = gen_thm2(2)
        assert run(case.market, C_PLUS, build_ming_two(case.market, 11)) == run(
            case.market, C_PLUS, build_ming_two(case.market, 11)
        )

    def test_single_pair_always_matched(self):
        m = Market((Worker("w", A, "X", 1),), (Job("j", JobCategory.AB, "Y"),), ("X", "Y"))
        assert all(len(run(m, C_PLUS, build_ming_two(m, s))) == 1 for s in range(50))

    def test_two_compatible_jobs_equally_likely(self):
        m = Market(
            (Worker("w", A, "X", 1),),
            (Job("j1", JobCategory.A, "Y"), Job("j2", JobCategory.AB, "Y")),
            ("X", "Y"),
        )
        counts = Counter(run(m, C_PLUS, build_ming_two(m, s)).job_of["w"] for s in range(10_000))
        assert abs(counts["j1"] / 10_000 - 0.5) <= 0.02


class TestQing:
    def test_thm2_qing_one_with_everyone_in_a_sequence(self):
        case = gen_thm2(2)
        partition = QingPartition(frozenset(case.market.worker_ids), frozenset(), frozenset(), frozenset())
        arr, _ = build_qing_one(case.market, partition, 0)
        mu = execute(case.market, C_PLUS, arr, case.plan)
        assert {w for w, _ in mu.pairs} == {"wA_Y_1", "wA_Y_2"}
        assert {j for _, j in mu.pairs} == {"jA_Z_1", "jA_Z_2"}

    def test_compatible_sequences_match_all(self):
        case = gen_prop1(3)
        for seed in range(10):
            assert len(run(case.market, C_MINUS, build_qing_one(case.market, case.partition, seed))) == 6

    def test_empty_market(self):
        empty = QingPartition(frozenset(), frozenset(), frozenset(), frozenset())
        assert run(Market(), C_PLUS, build_qing_one(Market(), empty, 0)) == Matching()
        assert run(Market(), C_PLUS, build_qing_two(Market(), empty, 0)) == Matching()

    def test_thm2_qing_two_any_plan_matches_all(self):
        case = gen_thm2(2)
        for seed in range(30):
            assert len(run(case.market, C_PLUS, build_qing_two(case.market, case.partition, seed))) == 4

    def test_bad_partition_size(self):
        case = gen_thm2(2)
        bad = QingPartition(frozenset({"wA_Y_1"}), frozenset(case.market.worker_ids) - {"wA_Y_1"},
                            frozenset(), frozenset())
        with pytest.raises(PartitionError, match=r"\|wa1\| = \|J\^A\|"):
            build_qing_one(case.market, bad, 0)

    @settings(max_examples=60)
    @given(qing_markets(), st.integers(0, 2**32))
    def test_qing_two_equals_qing_one_without_conflicts(self, mp, seed):
        market, partition = mp
        # move every job to a region nobody lives in
        jobs = tuple(Job(j.id, j.category, "Q") for j in market.jobs)
        market = Market(market.workers, jobs, (*market.regions, "Q"))
        one = run(market, C_PLUS, build_qing_one(market, partition, seed))
        two = run(market, C_PLUS, build_qing_two(market, partition, seed))
        assert one == two


class TestDefaultPartition:
    def test_thm1_better_ranked_y_workers_take_a_jobs(self):
        case = gen_thm1(2)
        assert default_qing_partition(case.market).wa1 == {"wA_Y_1", "wA_Y_2"}

    def test_no_ab_jobs(self):
        p = default_qing_partition(gen_thm2(2).market)
        assert not p.wa2 and not p.wb2

    def test_rank_split(self):
        workers = tuple(Worker(f"w{r}", A, "X", r) for r in range(1, 6))
        jobs = tuple(Job(f"a{i}", JobCategory.A, "Y") for i in range(3)) + tuple(
            Job(f"ab{i}", JobCategory.AB, "Y") for i in range(2)
        )
        p = default_qing_partition(Market(workers, jobs, ("X", "Y")))
        assert p.wa1 == {"w1", "w2", "w3"} and p.wa2 == {"w4", "w5"}


class TestSplitPriority:
    def test_thm2_a_sequence(self):
        m = gen_thm2(2).market
        priority, rest = split_priority(m, m.worker_ids, m.job_ids)
        assert priority == {"wA_X_1", "wA_X_2"} and rest == {"wA_Y_1", "wA_Y_2"}

    def test_jobs_from_empty_region(self):
        m = gen_thm2(2).market
        priority, rest = split_priority(m, m.worker_ids, ["jA_Z_1", "jA_Z_2"])
        assert not priority and rest == set(m.worker_ids)

    def test_everyone_has_a_native_job(self):
        m = gen_thm2(1).market
        _, rest = split_priority(m, ["wA_X_1"], ["jA_X_1", "jA_Z_1"])
        assert not rest


class TestTwoTube:
    def test_thm2_all_matched_for_every_seed(self):
        m = gen_thm2(2).market
        assert largest_region(m) == "X"
        assert all(len(run(m, C_PLUS, build_two_tube(m, s))) == 4 for s in range(50))

    def test_regionally_sufficient_fills_all_jobs(self):
        m = single_pool_market({"X": 3, "Y": 2}, {"X": 2, "Y": 1})
        assert all(len(run(m, C_PLUS, build_two_tube(m, s))) == 3 for s in range(50))

    def test_single_region_no_feasible_pair(self):
        m = single_pool_market({"X": 2}, {"X": 1})
        assert len(run(m, C_PLUS, build_two_tube(m, 0))) == 0
        assert len(maximum_matching(m, C_PLUS)) == 0

    def test_mixed_categories_rejected(self):
        with pytest.raises(InputError):
            two_tube_arrangement(gen_prop1(1).market)

    def test_jobs_without_workers_go_first(self):
        m = single_pool_market({"X": 2, "Y": 1}, {"X": 1, "Z": 1})
        seq = two_tube_arrangement(m).sequences[0]
        assert seq.worker_tubes == (frozenset({"wA_X_1", "wA_X_2"}), frozenset({"wA_Y_1"}))
        assert seq.job_tubes == (frozenset({"jA_Z_1"}), frozenset({"jA_X_1"}))

    def test_no_shared_region(self):
        m = single_pool_market({"X": 2}, {"Y": 1})
        assert largest_region(m) is None
        assert len(run(m, C_PLUS, build_two_tube(m, 0))) == 1


@settings(max_examples=60)
@given(qing_markets(), st.integers(0, 2**32))
def test_every_builder_yields_valid_arrangement(mp, seed):
    market, partition = mp
    prefs = {w: market.job_ids for w in market.worker_ids}
    for kind in ProcedureKind:
        if kind is ProcedureKind.TWO_TUBE:
            continue
        arr, plan = build(kind, market, seed, partition=partition, song_preferences=prefs)
        assert validate_arrangement(market, arr) is None
        plan.validate(market)


@given(single_pool_markets(), st.integers(0, 2**32))
def test_two_tube_valid_on_single_pools(market, seed):
    arr, plan = build_two_tube(market, seed)
    assert validate_arrangement(market, arr) is None
