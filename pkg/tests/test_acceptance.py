"""Acceptance criteria 1-10.

Each test records one ``criterion N: PASS|FAIL`` line; the lines are printed in
the pytest terminal summary (see conftest.py) and by ``python tests/test_acceptance.py``.
"""
import random
import time

import pytest

from harmcalc import scenario
from harmcalc.cause import check_contrastive_cause, oracle_check
from harmcalc.collective import Agent, CollectiveModel, aggregate_harm, compare_policies
from harmcalc.harm import (
    UtilityModel, h1_h2_only, oracle_quantitative_harm, quantitative_benefit, quantitative_harm,
)
from harmcalc.scm import enumerate_contexts
from harmcalc.testing import random_cause_query, random_harm_case, random_model
from harmcalc.uncertainty import (
    Floor, Prelec, expected_harm, expected_rbt_harm, expected_utility, wqh,
)

RESULTS = {}


def record(number, ok, detail):
    RESULTS[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, RESULTS[number]


def _keys(a):
    return [w.key() for w in a.witnesses]


def test_criterion_01_treatments_quartet():
    start = time.perf_counter()
    sc = scenario.load("treatments")
    um, dist = sc.agent(), sc.distribution
    assert (um.default_low, um.u("alive"), um.u("dead")) == (1.0, 1.0, 0.0)
    got = (
        expected_harm(um, dist, {"T": "t1"}),
        expected_harm(um, dist, {"T": "t2"}),
        expected_rbt_harm(um, dist, {"T": "t1"}, {"T": "none"}),
        expected_rbt_harm(um, dist, {"T": "t2"}, {"T": "none"}),
    )
    elapsed = time.perf_counter() - start
    ok = all(abs(g - e) <= 1e-12 for g, e in zip(got, (0.16, 0.20, 0.0, 0.10))) and elapsed < 1.0
    record(1, ok, f"EH={got[0]!r},{got[1]!r} RBT={got[2]!r},{got[3]!r} in {elapsed:.3f}s")


def test_criterion_02_tipping():
    um = scenario.load("tipping").agent()
    got = (
        quantitative_harm(um, {"wallet": 5, "tip_choice": 0}, {"Tip": 1}).value,
        quantitative_harm(um, {"wallet": 5, "tip_choice": 0}, {"Tip": 5}).value,
        quantitative_harm(um, {"wallet": 30, "tip_choice": 0}, {"Tip": 20}).value,
    )
    record(2, got == (0.04, 0.0, 0.0), f"QH = {got}")


def test_criterion_03_medication_surgery():
    sc = scenario.load("medication-surgery")
    um, dist = sc.agent(), sc.distribution
    half = UtilityModel.make(um.model, um.outcome, zip(um.outcome_values, um.utilities), 0.5)
    med, surg = {"X": 1}, {"X": 0}
    got = (
        expected_utility(um, dist, med), expected_utility(um, dist, surg),
        expected_harm(um, dist, med), expected_harm(um, dist, surg),
        expected_harm(half, dist, med), expected_harm(half, dist, surg),
    )
    record(3, got == (0.5, 0.9, 0.5, 0.1, 0.0, 0.05), f"EU, EH(d=1), EH(d=0.5) = {got}")


def test_criterion_04_driving_orderings():
    sc = scenario.load("driving")
    um, dist = sc.agent(), sc.distribution
    fast, slow = sc.policy("fast"), sc.policy("slow")
    table = sc.weighting("table:experience")
    w_fast, w_slow = wqh(um, dist, fast, table).total, wqh(um, dist, slow, table).total
    e_fast, e_slow = expected_harm(um, dist, fast), expected_harm(um, dist, slow)
    ok = w_fast == 0.0 and w_slow == pytest.approx(0.1, abs=1e-12) and e_fast > e_slow
    record(4, ok, f"table: fast={w_fast!r} < slow={w_slow!r}; identity: fast={e_fast!r} > slow={e_slow!r}")


def test_criterion_05_organ_donation():
    sc = scenario.load("organ-donation")
    cm = sc.collective()
    harvest, refrain = aggregate_harm(cm, sc.policy("harvest")), aggregate_harm(cm, sc.policy("refrain"))
    harmed = [a for a, v in harvest.per_agent.items() if v > 0]
    ranking = [n for n, _ in compare_policies(cm, sc.policies)]
    ok = harvest.total > 0 and harmed == ["billy"] and refrain.total == 0 and ranking[0] == "refrain"
    record(5, ok, f"harvest={harvest.total!r} (harmed {harmed}), refrain={refrain.total!r}, ranking={ranking}")


def test_criterion_06_iff_property():
    rng = random.Random(6)
    violations = checked = 0
    while checked < 1000:
        c = random_harm_case(rng, max_endogenous=4, max_range=2)
        if any(len(c.utility.model.range_of(n)) != 2 for n in c.utility.model.order
               if n not in c.utility.model.exogenous):
            continue
        positive = quantitative_harm(c.utility, c.context, c.action).value > 0
        violations += positive != h1_h2_only(c.utility, c.context, c.action)
        checked += 1
    record(6, violations == 0, f"{violations} violations in {checked} models")


def test_criterion_07_oracle_equivalence():
    start = time.perf_counter()
    rng = random.Random(7)
    cause_cases = cause_bad = 0
    while cause_cases < 1000:
        m = random_model(rng, max_endogenous=5, max_range=3)
        ctx = rng.choice(enumerate_contexts(m))
        q = random_cause_query(rng, m, ctx)
        if q is None:
            continue
        cause_bad += check_contrastive_cause(m, ctx, q) != oracle_check(m, ctx, q)
        cause_cases += 1
    harm_bad = 0
    for _ in range(1000):
        c = random_harm_case(rng, max_endogenous=5, max_range=3)
        fast = quantitative_harm(c.utility, c.context, c.action)
        slow = oracle_quantitative_harm(c.utility, c.context, c.action)
        harm_bad += fast.value != slow.value or _keys(fast) != _keys(slow)
    elapsed = time.perf_counter() - start
    ok = cause_bad == 0 and harm_bad == 0 and elapsed < 60
    record(7, ok, f"cause {cause_bad}/1000, harm {harm_bad}/1000 disagreements in {elapsed:.1f}s")


def _scaled(cm, a, b):
    agents = tuple(Agent(x.id, x.utility.affine(a, b)) for x in cm.agents)
    return CollectiveModel(cm.model, cm.dist, agents, cm.groups, a * cm.alpha, a * cm.beta,
                           cm.weighting, cm.penalty_mode)


def test_criterion_08_affine_covariance():
    a, b = 3.0, -2.0
    values = mismatched = 0
    for name in scenario.corpus_names():
        sc = scenario.load(name)
        names = sorted(sc.policies)
        for um in sc.agents.values():
            moved = um.affine(a, b)
            for ctx in enumerate_contexts(sc.model):
                harms = {}
                for n in names:
                    for fn in (quantitative_harm, quantitative_benefit):
                        x, y = fn(um, ctx, sc.policy(n)), fn(moved, ctx, sc.policy(n))
                        values += 1
                        mismatched += abs(y.value - a * x.value) > 1e-9 or _keys(x) != _keys(y)
                        if fn is quantitative_harm:
                            harms[n] = (x.value, y.value)
                values += 1
                mismatched += sorted(names, key=lambda n: (harms[n][0], n)) != \
                    sorted(names, key=lambda n: (harms[n][1], n))
        if len(names) >= 2 and (sc.file.distribution_kind or not sc.model.exogenous):
            cm = sc.collective()
            before = [n for n, _ in compare_policies(cm, sc.policies)]
            after = [n for n, _ in compare_policies(_scaled(cm, a, b), sc.policies)]
            values += 1
            mismatched += before != after
    record(8, mismatched == 0, f"{mismatched} mismatches over {values} values and rankings")


def test_criterion_09_fairness_penalty():
    sc = scenario.load("concentrated-diffuse")
    conc, diff = sc.policy("concentrate"), sc.policy("diffuse")
    gaps = {}
    for alpha in (1.0, 100.0):
        cm = sc.collective(alpha=alpha)
        gaps[alpha] = aggregate_harm(cm, conc).total - aggregate_harm(cm, diff).total
    plain = sc.collective(groups={})
    tie = (aggregate_harm(plain, conc).total, aggregate_harm(plain, diff).total)
    ok = all(gaps[k] == k for k in gaps) and tie[0] == tie[1]
    record(9, ok, f"gap(alpha=1)={gaps[1.0]!r}, gap(alpha=100)={gaps[100.0]!r}, no groups: {tie}")


def test_criterion_10_norcross_ordinal():
    def harm(name, w):
        sc = scenario.load(name)
        return aggregate_harm(sc.collective(w), {"Act": "impose"}).total

    floor = Floor(1 / 1000)
    b_floor, c_floor = harm("norcross-b", floor), harm("norcross-c", floor)
    over = Prelec(0.5)
    c_over, a_over = harm("norcross-c", over), harm("norcross-a", over)
    ok = b_floor > c_floor and c_over > a_over
    record(10, ok, f"floor: B={b_floor!r} > C={c_floor!r}; prelec(0.5): C={c_over!r} > A={a_over!r}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
