import random

import pytest
from hypothesis import given, strategies as st

from harmcalc.errors import PreconditionError, QueryError
from harmcalc.harm import (
    UtilityModel, h1_h2_only, harm_bound, oracle_quantitative_harm, qualitative_harm,
    quantitative_benefit, quantitative_harm, rbt_harm, relative_harm,
)
from harmcalc.scm import enumerate_contexts
from harmcalc.testing import random_harm_case

W5 = {"wallet": 5, "tip_choice": 1}
W30 = {"wallet": 30, "tip_choice": 1}


def test_relative_harm_tipping(tipping):
    um = tipping.agent()
    assert relative_harm(um, W5, {"Tip": 1}, {"Tip": 5}, 5) == 0.04


def test_relative_harm_requires_a_cause(tipping):
    um = tipping.agent()
    # tipping 20 from a 5-dollar wallet gives 5 again: no contrast with outcome 20
    with pytest.raises(PreconditionError, match="AC2"):
        relative_harm(um, W5, {"Tip": 1}, {"Tip": 20}, 20)


def test_relative_harm_zero_at_default(tipping):
    um = tipping.agent()
    assert relative_harm(um, W30, {"Tip": 20}, {"Tip": 30}, 30) == 0.0


def test_quantitative_harm_tipping(tipping):
    um = tipping.agent()
    a = quantitative_harm(um, W5, {"Tip": 1})
    assert a.value == 0.04
    assert a.actual_outcome == 1 and a.actual_utility == 0.01
    # tipping 5 or 20 (capped at 5) both give the waiter 0.05
    assert sorted(dict(w.alternative)["Tip"] for w in a.witnesses) == [5, 20, 30]
    assert quantitative_harm(um, W5, {"Tip": 5}).value == 0.0
    assert quantitative_harm(um, W30, {"Tip": 20}).value == 0.0
    assert quantitative_harm(um, W30, {"Tip": 30}).value == 0.0


def test_quantitative_harm_treatments(treatments):
    um = treatments.agent()
    a = quantitative_harm(um, {"g1": "no", "g2": "yes", "g3": "yes"}, {"T": "t1"})
    assert a.value == 1.0
    assert [(dict(w.alternative), w.contrast_outcome) for w in a.witnesses] == [({"T": "t2"}, "alive")]


def test_outcome_in_action_is_rejected(treatments):
    with pytest.raises(QueryError):
        quantitative_harm(treatments.agent(), {"g1": "no", "g2": "no", "g3": "no"}, {"O": "dead"})
    with pytest.raises(QueryError):
        quantitative_harm(treatments.agent(), {"g1": "no", "g2": "no", "g3": "no"}, {})


def test_qualitative_harm_organ_donation(load):
    sc = load("organ-donation")
    q = qualitative_harm(sc.agent("billy"), {}, {"Harvest": "yes"})
    assert q.harmed and q.actual_outcome == "dead" and q.contrast_outcome == "alive"
    for pid in ("p1", "p2", "p3", "p4", "p5"):
        assert not qualitative_harm(sc.agent(pid), {}, {"Harvest": "no"}).harmed
    assert not qualitative_harm(sc.agent("billy"), {}, {"Harvest": "no"}).harmed


def test_h3_blocks_when_the_alternative_is_worse():
    from _helpers import mk
    # X=1 rather than 0 gives O=1 rather than 2, but X=0 without holding anything gives 0 (worse)
    m = mk([("X", False, (0, 1)), ("Y", False, (0, 1)), ("O", False, (0, 1, 2))],
           {"X": "1", "Y": "X", "O": "if X = 1 then 1 elif Y = 1 then 2 else 0"})
    um = UtilityModel.make(m, "O", {0: 0.0, 1: 0.5, 2: 1.0}, 1.0)
    a = quantitative_harm(um, {}, {"X": 1})
    assert a.value == 0.5 and a.witnesses[0].held[0].as_dict() == {"Y": 1}
    assert h1_h2_only(um, {}, {"X": 1})
    assert not qualitative_harm(um, {}, {"X": 1}).harmed


def test_benefit(tipping):
    um = tipping.agent()
    b = quantitative_benefit(um, W30, {"Tip": 30})
    assert b.value == pytest.approx(0.05, abs=1e-12)
    # every smaller tip leaves the waiter below d_b, so all of them attain the maximum
    assert [dict(w.alternative)["Tip"] for w in b.witnesses] == [0, 1, 5, 20]
    # u(o) = d_b exactly
    at_edge = UtilityModel.make(um.model, "O", zip(um.outcome_values, um.utilities), (0.2, 0.3))
    assert quantitative_benefit(at_edge, W30, {"Tip": 30}).value == 0.0
    assert quantitative_benefit(um, W30, {"Tip": 20}).value == 0.0


def test_rbt_harm(treatments):
    um = treatments.agent()
    for ctx in enumerate_contexts(treatments.model):
        assert rbt_harm(um, ctx, {"T": "t1"}, {"T": "none"}) == 0.0
        assert rbt_harm(um, ctx, {"T": "none"}, {"T": "none"}) == 0.0
    assert rbt_harm(um, {"g1": "no", "g2": "no", "g3": "no"}, {"T": "t2"}, {"T": "none"}) == 1.0


def test_default_gate_and_h1_h2(tipping):
    um = tipping.agent()
    assert h1_h2_only(um, W5, {"Tip": 1})
    assert not h1_h2_only(um, W5, {"Tip": 5})


# -- properties -------------------------------------------------------------

seeds = st.integers(0, 10**6)


def _keys(a):
    return [w.key() for w in a.witnesses]


@given(seeds)
def test_harm_invariants(seed):
    c = random_harm_case(random.Random(seed))
    um, ctx, iv = c.utility, c.context, c.action
    a = quantitative_harm(um, ctx, iv)
    assert a.value >= 0
    assert (a.value == 0) == (not a.witnesses)
    if a.actual_utility >= um.default_low:
        assert a.value == 0
    assert a.value <= max(0.0, harm_bound(um)) + 1e-12
    assert (a.value > 1e-12) == h1_h2_only(um, ctx, iv)


@given(seeds, st.floats(0.1, 10), st.floats(-5, 5))
def test_affine_covariance(seed, scale, shift):
    c = random_harm_case(random.Random(seed))
    um = c.utility.affine(scale, shift)
    for fn in (quantitative_harm, quantitative_benefit):
        base, moved = fn(c.utility, c.context, c.action), fn(um, c.context, c.action)
        assert moved.value == pytest.approx(scale * base.value, abs=1e-9)
        if base.value > 1e-9:
            assert _keys(moved) == _keys(base)


@given(seeds)
def test_harm_matches_oracle(seed):
    c = random_harm_case(random.Random(seed), max_endogenous=5, max_range=3)
    fast = quantitative_harm(c.utility, c.context, c.action)
    slow = oracle_quantitative_harm(c.utility, c.context, c.action)
    assert fast.value == slow.value and _keys(fast) == _keys(slow)
