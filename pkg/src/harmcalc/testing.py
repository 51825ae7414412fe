"""Random small models for property tests and oracle comparisons."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, List

from .harm import UtilityModel
from .scm import CausalModel, TableEquation, Variable, enumerate_contexts

_SYMBOLS = ("a", "b", "c")


def random_model(rng: random.Random, max_endogenous: int = 5, max_range: int = 3,
                 max_exogenous: int = 2, max_parents: int = 3) -> CausalModel:
    """A random acyclic model with table equations.

    Variables are declared in a random topological order; each endogenous
    variable reads a random subset of earlier variables.
    """
    n_exo = rng.randint(0, max_exogenous)
    n_endo = rng.randint(1, max_endogenous)
    variables: List[Variable] = []
    for i in range(n_exo):
        variables.append(Variable(f"U{i}", True, _SYMBOLS[: rng.randint(1, max_range)]))
    equations = []
    for i in range(n_endo):
        size = rng.randint(2, max_range)
        values = tuple(range(size)) if rng.random() < 0.5 else _SYMBOLS[:size]
        earlier = [v.name for v in variables]
        k = rng.randint(0, min(max_parents, len(earlier)))
        inputs = tuple(sorted(rng.sample(earlier, k), key=earlier.index))
        by_name = {v.name: v for v in variables}
        rows = tuple((combo, rng.choice(values))
                     for combo in itertools.product(*(by_name[n].values for n in inputs)))
        var = Variable(f"V{i}", False, values)
        variables.append(var)
        equations.append(TableEquation(var.name, inputs, rows))
    # interleave exogenous variables into the declaration order; semantics are unchanged
    rng.shuffle(variables)
    return CausalModel.build(variables, equations)


@dataclass(frozen=True)
class HarmCase:
    utility: UtilityModel
    context: Dict[str, object]
    action: Dict[str, object]


def random_harm_case(rng: random.Random, max_endogenous: int = 4, max_range: int = 2,
                     max_action: int = 2) -> HarmCase:
    """A random utility model, context and action (never on the outcome)."""
    while True:
        model = random_model(rng, max_endogenous=max_endogenous, max_range=max_range)
        outcome = model.order[-1]
        others = [n for n in model.order if n in model.ancestors([outcome]) and n != outcome]
        if others:
            break
    names = rng.sample(others, rng.randint(1, min(max_action, len(others))))
    action = {n: rng.choice(model.range_of(n)) for n in names}
    utility = {v: rng.random() for v in model.range_of(outcome)}
    um = UtilityModel.make(model, outcome, utility, rng.random())
    ctx = rng.choice(enumerate_contexts(model))
    return HarmCase(um, ctx, action)


def random_cause_query(rng: random.Random, model: CausalModel, ctx, max_cause: int = 2):
    """A query whose cause holds actually: ``X`` among the ancestors of the last variable."""
    from .cause import outcome_query
    from .scm import solve

    actual = solve(model, ctx)
    o = model.order[-1]
    pool = [n for n in model.order if n in model.ancestors([o]) and n != o]
    if not pool or len(model.range_of(o)) < 2:
        return None
    names = rng.sample(pool, rng.randint(1, min(max_cause, len(pool))))
    cause = {n: actual[n] for n in names}
    alts = [dict(zip(names, combo)) for combo in itertools.product(*(model.range_of(n) for n in names))
            if combo != tuple(cause[n] for n in names)]
    o_alt = rng.choice([v for v in model.range_of(o) if v != actual[o]])
    return outcome_query(cause, rng.choice(alts), o, actual[o], o_alt)
