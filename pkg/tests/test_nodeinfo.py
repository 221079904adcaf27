import random

from mddmine import (
    GE,
    LE,
    ConstraintSpec,
    Kind,
    StatPlan,
    avg_extendable,
    build_mdd,
    dump_info_tsv,
    med_extendable,
    parse_constraint,
    propagate,
    span_extendable,
    sum_extendable,
)
from mddmine.nodeinfo import med_dominates, med_fold, oriented_sentinels

from conftest import A, B, C
from dbgen import random_db, random_specs
from oracles import (
    avg_objective_ground_truth,
    iter_arc_consistent_occurrences,
    maxlen_ground_truth,
    med_extension_exists,
    span_ground_truth,
    sum_ground_truth,
)

SECOND = 1  # sequence index of the three-event B,A,B sequence


class TestPropagateOnClickDb:
    """Values derived by enumerating the four extension paths from the first
    event of the second sequence: times {3},{3,8},{3,9},{3,8,9}, prices
    {3},{3,1},{3,3},{3,1,3}."""

    def test_span_time(self, click_db):
        mdd = build_mdd(click_db)
        spec = parse_constraint("span(time)>=5")
        store = propagate(mdd, click_db, (spec,))
        assert store.span["time"][SECOND][0] == (3, 9)

    def test_sum_price_max(self, click_db):
        mdd = build_mdd(click_db)
        spec = parse_constraint("sum(price)>=7")
        store = propagate(mdd, click_db, (spec,))
        assert store.sums[("price", 1)][SECOND][0] == 7

    def test_avg_price_objective_zero_at_bound_three(self, click_db):
        mdd = build_mdd(click_db)
        spec = parse_constraint("avg(price)>=3")
        store = propagate(mdd, click_db, (spec,))
        b1, b2 = store.avg[("price", 1, 3)][SECOND][0]
        assert b1 - 3 * b2 == 0

    def test_avg_price_objective_minus_one_at_bound_four(self, click_db):
        mdd = build_mdd(click_db)
        spec = parse_constraint("avg(price)>=4")
        store = propagate(mdd, click_db, (spec,))
        b1, b2 = store.avg[("price", 1, 4)][SECOND][0]
        assert b1 - 4 * b2 == -1


class TestExtendableExamples:
    def test_span_lower_bounds(self):
        spec5 = parse_constraint("span(time)>=5")
        spec7 = parse_constraint("span(time)>=7")
        assert span_extendable(3, 3, (3, 9), spec5)
        assert not span_extendable(3, 3, (3, 9), spec7)

    def test_span_zero_always_reachable(self):
        spec = parse_constraint("span(time)>=0")
        assert span_extendable(4, 9, (4, 9), spec)

    def test_span_upper_bound_needs_current_feasibility(self):
        spec = parse_constraint("span(time)<=4")
        assert span_extendable(3, 5, (1, 9), spec)
        assert not span_extendable(3, 9, (3, 9), spec)

    def test_max_min(self):
        assert span_extendable(5, 5, (3, 9), parse_constraint("max(x)>=9"))
        assert not span_extendable(5, 5, (3, 8), parse_constraint("max(x)>=9"))
        assert span_extendable(5, 5, (3, 9), parse_constraint("min(x)<=3"))
        assert not span_extendable(5, 6, (5, 9), parse_constraint("min(x)<=3"))
        assert span_extendable(5, 5, (3, 9), parse_constraint("max(x)<=5"))
        assert not span_extendable(5, 7, (3, 9), parse_constraint("max(x)<=5"))

    def test_sum(self):
        ge7 = parse_constraint("sum(price)>=7")
        ge8 = parse_constraint("sum(price)>=8")
        assert sum_extendable(3, 3, 7, ge7)
        assert not sum_extendable(3, 3, 7, ge8)

    def test_sum_nonnegative_with_zero_bound(self):
        spec = parse_constraint("sum(price)>=0")
        assert sum_extendable(5, 5, 5, spec)

    def test_avg(self):
        ge3 = parse_constraint("avg(price)>=3")
        ge4 = parse_constraint("avg(price)>=4")
        assert avg_extendable(3, 1, 3, (3, 1), ge3)
        assert not avg_extendable(3, 1, 3, (3, 1), ge4)

    def test_avg_all_values_at_bound(self):
        stats_sum, length, cur = 10, 2, 5
        assert avg_extendable(stats_sum, length, cur, (5, 1), parse_constraint("avg(x)>=5"))
        assert avg_extendable(-stats_sum, length, -cur, (-5, 1), parse_constraint("avg(x)<=5"))

    def test_med_positive_balance(self, click_db):
        mdd = build_mdd(click_db)
        spec = parse_constraint("med(price)>=3")
        store = propagate(mdd, click_db, (spec,))
        info = store.med[("price", 1, 3)][SECOND][0]
        assert info == (2, 0, 3)  # achieved by the price path {3, 3}
        empty = (0, *oriented_sentinels(click_db.columns("price")[SECOND]))
        assert med_extendable(empty, info, spec)

    def test_med_infeasible_from_low_singleton(self, click_db):
        mdd = build_mdd(click_db)
        spec = parse_constraint("med(price)>=3")
        store = propagate(mdd, click_db, (spec,))
        info = store.med[("price", 1, 3)][SECOND][1]  # the price-1 event
        empty = (0, *oriented_sentinels(click_db.columns("price")[SECOND]))
        assert not med_extendable(empty, info, spec)

    def test_med_singleton_at_bound(self):
        spec = ConstraintSpec(Kind.MED, attribute="x", direction=GE, c=5)
        info = med_fold(5, 5, (0, 0, 11))
        assert med_extendable((0, 0, 11), info, spec)


class TestMedHelpers:
    def test_fold_counts(self):
        assert med_fold(7, 5, (0, 0, 99)) == (1, 0, 7)
        assert med_fold(3, 5, (0, 0, 99)) == (-1, 3, 99)

    def test_dominance_rules(self):
        # higher balance always wins
        assert med_dominates((1, 0, 7), (0, 4, 6), bound=5)
        # balance tie, candidate median feasible, incumbent not
        assert med_dominates((0, 4, 6), (0, 1, 6), bound=5)
        # both feasible: larger best-below value wins
        assert med_dominates((0, 4, 7), (0, 3, 9), bound=5)
        # both infeasible: larger best-at-or-above value wins
        assert med_dominates((0, 1, 8), (0, 1, 6), bound=5)
        # incomparable tie: neither dominates
        assert not med_dominates((0, 4, 6), (0, 4, 6), bound=5)


class TestOracleEquivalence:
    def test_span_sum_avg_maxlen_match_enumeration(self):
        rng = random.Random(11)
        for _ in range(25):
            db = random_db(rng, n_max=8, len_max=6)
            specs = random_specs(rng, db, max_specs=2) + (
                ConstraintSpec(Kind.LENGTH, direction=GE, c=2),
            )
            mdd = build_mdd(db, specs)
            store = propagate(mdd, db, specs)
            for attr, arrays in store.span.items():
                for si, arr in enumerate(arrays):
                    for pos, pair in enumerate(arr):
                        assert pair == span_ground_truth(db, mdd, si, pos, attr)
            for (attr, sign), arrays in store.sums.items():
                for si, arr in enumerate(arrays):
                    for pos, beta in enumerate(arr):
                        assert beta == sum_ground_truth(db, mdd, si, pos, attr, sign)
            for (attr, sign, bound), arrays in store.avg.items():
                for si, arr in enumerate(arrays):
                    for pos, (b1, b2) in enumerate(arr):
                        truth = avg_objective_ground_truth(db, mdd, si, pos, attr, sign, bound)
                        assert b1 - bound * b2 == truth
            for si, arr in enumerate(store.maxlen):
                for pos, value in enumerate(arr):
                    assert value == maxlen_ground_truth(mdd, si, pos)

    def test_med_verdicts_match_brute_force(self):
        rng = random.Random(13)
        findings = 0
        for _ in range(30):
            db = random_db(rng, n_max=6, len_max=6, n_attrs=1)
            attr = db.attribute_names[0]
            direction = rng.choice((GE, LE))
            med = ConstraintSpec(Kind.MED, attribute=attr, direction=direction,
                                 c=rng.randint(0, 20))
            gap = random_specs(rng, db, max_specs=1)
            specs = gap + (med,)
            mdd = build_mdd(db, specs)
            store = propagate(mdd, db, specs)
            pareto = propagate(mdd, db, specs, pareto_median=True)
            plan = StatPlan(db, specs)
            sign = 1 if direction == GE else -1
            key = (attr, sign, sign * med.c)
            slot = plan.med_keys.index(key)
            for si in range(len(db)):
                for occ in iter_arc_consistent_occurrences(mdd, si, max_len=4):
                    stats = plan.recompute(si, occ)
                    triple = stats[3][slot]
                    last = occ[-1]
                    verdict = med_extendable(triple, store.med[key][si][last], med)
                    truth = med_extension_exists(db, mdd, si, occ, med)
                    if verdict != truth:
                        # the dominance rules may drop a needed candidate but
                        # must never claim an extension that does not exist
                        assert truth and not verdict
                        findings += 1
                        assert med_extendable(
                            triple, pareto.med[key][si][last], med
                        ) == truth
        if findings:
            print(f"dominance-incompleteness findings: {findings}")


class TestStatPlan:
    def _definition_stats(self, plan, db, si, positions):
        length = len(positions)
        spans = []
        for attr in plan.span_attrs:
            vals = [db.columns(attr)[si][p] for p in positions]
            spans.append((min(vals), max(vals)))
        sums = []
        for attr, sign in plan.sum_keys:
            vals = [db.columns(attr)[si][p] for p in positions]
            sums.append(sign * sum(vals))
        meds = []
        for attr, sign, bound in plan.med_keys:
            col = db.columns(attr)[si]
            oriented = [sign * v for v in col]
            lo, hi = oriented_sentinels(oriented)
            triple = (0, lo, hi)
            for p in positions[:-1]:
                triple = med_fold(oriented[p], bound, triple)
            meds.append(triple)
        return (length, tuple(spans), tuple(sums), tuple(meds))

    def test_incremental_matches_definition(self):
        rng = random.Random(17)
        for _ in range(40):
            db = random_db(rng, n_max=6, len_max=7)
            specs = random_specs(rng, db, max_specs=4)
            plan = StatPlan(db, specs)
            si = rng.randrange(len(db))
            length = len(db.sequences[si])
            k = rng.randint(1, length)
            positions = tuple(sorted(rng.sample(range(length), k)))
            assert plan.recompute(si, positions) == self._definition_stats(
                plan, db, si, positions
            )


def test_dump_info_tsv_smoke(click_db):
    specs = (
        parse_constraint("span(time)>=5"),
        parse_constraint("sum(price)<=9"),
        parse_constraint("avg(price)>=3"),
        parse_constraint("med(price)<=2"),
        parse_constraint("length>=2"),
    )
    mdd = build_mdd(click_db, specs)
    store = propagate(mdd, click_db, specs)
    text = dump_info_tsv(store, click_db)
    lines = text.splitlines()
    assert lines[0] == "sid\tpos\tinfo\tvalues"
    # 8 events, one row each for span, sum, avg, med, maxlen
    assert len(lines) == 1 + 8 * 5
    assert any("med(price,<=2)" in ln for ln in lines)
