import random

import pytest
from hypothesis import given, strategies as st

from harmcalc.collective import (
    Agent, CollectiveModel, aggregate_harm, compare_policies, disproportionate_groups, per_agent_wqh,
)
from harmcalc.errors import InputError
from harmcalc.uncertainty import wqh


def test_organ_donation(load):
    sc = load("organ-donation")
    cm = sc.collective()
    harvest = per_agent_wqh(cm, {"Harvest": "yes"})
    assert harvest["billy"] > 0 and all(v == 0 for k, v in harvest.items() if k != "billy")
    assert all(v == 0 for v in per_agent_wqh(cm, {"Harvest": "no"}).values())
    ranking = compare_policies(cm, sc.policies)
    assert [name for name, _ in ranking] == ["refrain", "harvest"]


def test_single_agent_reduces_to_wqh(load):
    sc = load("driving")
    cm = sc.collective()
    assert per_agent_wqh(cm, {"X": 0}) == {"driver": wqh(sc.agent(), sc.distribution, {"X": 0}, sc.weighting()).total}


def test_norcross_sums_cross(load):
    a = aggregate_harm(load("norcross-a").collective(), {"Act": "impose"}).total
    b = aggregate_harm(load("norcross-b").collective(), {"Act": "impose"}).total
    # 50 headaches of 0.01 stay below one death; 101 would not
    assert a == 1.0 and b == pytest.approx(0.5, abs=1e-12)


def _flat(n=10):
    return {f"a{i}": 0.0 for i in range(1, n + 1)}


def test_disproportionate_examples(load):
    cm = load("concentrated-diffuse").collective()
    harms = _flat()
    assert disproportionate_groups(cm, harms) == ()
    harms["a1"] = 1.0
    assert disproportionate_groups(cm, harms) == ("g1",)
    assert disproportionate_groups(cm.with_options(beta=1.0), harms) == ()


def test_penalty_modes(load):
    sc = load("concentrated-diffuse")
    cm = sc.collective()
    once = aggregate_harm(cm, {"P": "concentrate"})
    assert once.disproportionate == ("g1",) and once.total == 2.0
    wide = cm.with_options(groups={"g1": ("a1",), "also": ("a1",)}, penalty_mode="per-group")
    assert aggregate_harm(wide, {"P": "concentrate"}).total == 3.0
    none = aggregate_harm(cm.with_options(groups={}), {"P": "concentrate"})
    assert none.total == sum(none.per_agent.values())


def test_large_alpha_prefers_unflagged_policy(load):
    sc = load("concentrated-diffuse")
    ranking = compare_policies(sc.collective(alpha=1e6), {"concentrate": {"P": "concentrate"},
                                                         "diffuse": {"P": "diffuse"}})
    assert [n for n, _ in ranking] == ["diffuse", "concentrate"]


def test_ties_break_by_name(load):
    sc = load("concentrated-diffuse")
    ranking = compare_policies(sc.collective(), {"zeta": {"P": "refrain"}, "alpha": {"P": "refrain"}})
    assert [n for n, _ in ranking] == ["alpha", "zeta"]


def test_validation(load):
    sc = load("concentrated-diffuse")
    with pytest.raises(InputError, match="unknown agents"):
        sc.collective(groups={"g": ("nobody",)})
    with pytest.raises(InputError):
        sc.collective(alpha=-1)
    with pytest.raises(InputError, match="penalty mode"):
        sc.collective(penalty_mode="twice")
    with pytest.raises(InputError, match="at least two"):
        compare_policies(sc.collective(), {"x": {"P": "refrain"}})


def test_missing_outcome_variable(load):
    from harmcalc.harm import UtilityModel
    sc = load("concentrated-diffuse")
    with pytest.raises(InputError, match="outcome"):
        UtilityModel.make(sc.model, "Nope", {}, 0)


@given(st.integers(0, 10**6), st.floats(0, 2), st.floats(0, 2), st.floats(0, 5))
def test_penalty_monotonicity_and_all_agent_group(seed, beta, extra, alpha):
    rng = random.Random(seed)
    sc_harms = {f"a{i}": rng.random() for i in range(1, 11)}
    groups = {f"g{i}": tuple(rng.sample(sorted(sc_harms), rng.randint(1, 10))) for i in range(4)}
    groups["all"] = tuple(sorted(sc_harms))
    from harmcalc import scenario
    base = scenario.load("concentrated-diffuse").collective(groups=groups, beta=beta, alpha=alpha)
    loose = base.with_options(beta=beta + extra)
    flagged = set(disproportionate_groups(base, sc_harms))
    assert set(disproportionate_groups(loose, sc_harms)) <= flagged
    assert "all" not in flagged


@given(st.permutations([f"a{i}" for i in range(1, 11)]))
def test_agent_renaming_permutes_report(perm):
    from harmcalc import scenario
    sc = scenario.load("concentrated-diffuse")
    cm = sc.collective()
    rename = dict(zip([f"a{i}" for i in range(1, 11)], perm))
    agents = tuple(Agent(rename[a.id], a.utility) for a in cm.agents)
    groups = {g: tuple(rename[m] for m in ms) for g, ms in cm.groups.items()}
    renamed = CollectiveModel(cm.model, cm.dist, agents, groups, cm.alpha, cm.beta, cm.weighting)
    for iv in ({"P": "concentrate"}, {"P": "diffuse"}):
        r1, r2 = aggregate_harm(cm, iv), aggregate_harm(renamed, iv)
        assert r1.total == r2.total and r1.disproportionate == r2.disproportionate
        assert {rename[k]: v for k, v in r1.per_agent.items()} == r2.per_agent


def test_treatments_as_single_agent_collective(load):
    sc = load("treatments")
    ranking = compare_policies(sc.collective(), {"t2": sc.policy("t2"), "t1": sc.policy("t1")})
    assert [n for n, _ in ranking] == ["t1", "t2"]
    assert [r.total for _, r in ranking] == [pytest.approx(0.16, abs=1e-12), pytest.approx(0.2, abs=1e-12)]


@given(st.floats(0, 50), st.floats(0, 50), st.sampled_from(["once", "per-group"]))
def test_alpha_never_lowers_a_flagged_total(alpha, extra, mode):
    from harmcalc import scenario
    sc = scenario.load("concentrated-diffuse")
    for name in ("concentrate", "diffuse"):
        low = aggregate_harm(sc.collective(alpha=alpha, penalty_mode=mode), sc.policy(name))
        high = aggregate_harm(sc.collective(alpha=alpha + extra, penalty_mode=mode), sc.policy(name))
        assert high.total >= low.total
        assert low.disproportionate == high.disproportionate
