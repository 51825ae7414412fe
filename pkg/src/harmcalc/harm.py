"""Harm and benefit of an intervention to one agent in one context.

All quantities are computed in the model where the action ``X <- x`` has
been performed.  A *cause pair* ``(x', o')`` is an alternative setting of
``X`` together with an outcome value ``o'`` such that ``X=x`` rather than
``X=x'`` causes ``O=o`` rather than ``O=o'``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .atoms import Value, atom_key, format_atom, same
from .cause import (
    Witness,
    _Search,
    check_contrastive_cause,
    oracle_check,
    outcome_query,
)
from .errors import InputError, PreconditionError, QueryError
from .scm import CausalModel, Primitive, check_context, check_intervention, intervene, solve


@dataclass(frozen=True)
class UtilityModel:
    """A causal model with one outcome variable, its utilities and a default interval."""

    model: CausalModel
    outcome: str
    utilities: Tuple[float, ...]  # aligned with the outcome's range
    default_low: float
    default_high: float

    @classmethod
    def make(cls, model: CausalModel, outcome: str, utility, default, default_high=None) -> "UtilityModel":
        """Build from a value -> utility mapping (or pair list) and a default.

        ``default`` may be a number or a ``(d_h, d_b)`` pair.
        """
        var = model.by_name.get(outcome)
        if var is None or var.exogenous:
            raise InputError(f"outcome {outcome!r} must be an endogenous variable")
        pairs = list(utility.items()) if isinstance(utility, Mapping) else list(utility)
        table = {}
        for value, u in pairs:
            model.index_of(outcome, value)
            table[atom_key(value)] = float(u)
        missing = [format_atom(v) for v in var.values if atom_key(v) not in table]
        if missing:
            raise InputError(f"utility for {outcome} is missing values: {', '.join(missing)}")
        if isinstance(default, (tuple, list)):
            low, high = default
        else:
            low = default
            high = default if default_high is None else default_high
        um = cls(model, outcome, tuple(table[atom_key(v)] for v in var.values), float(low), float(high))
        um.check()
        return um

    def check(self) -> None:
        var = self.model.by_name.get(self.outcome)
        if var is None or var.exogenous:
            raise InputError(f"outcome {self.outcome!r} must be an endogenous variable")
        if len(self.utilities) != len(var.values):
            raise InputError("utility must cover the outcome range")
        if not self.default_low <= self.default_high:
            raise InputError("default interval must satisfy low <= high")

    @property
    def outcome_values(self) -> tuple:
        return self.model.by_name[self.outcome].values

    def u(self, value: Value) -> float:
        return self.utilities[self.model.index_of(self.outcome, value)]

    def with_model(self, model: CausalModel) -> "UtilityModel":
        return replace(self, model=model)

    def affine(self, a: float, b: float) -> "UtilityModel":
        """Utilities and defaults mapped through ``a*x + b``."""
        return replace(self, utilities=tuple(a * u + b for u in self.utilities),
                       default_low=a * self.default_low + b, default_high=a * self.default_high + b)


@dataclass(frozen=True)
class HarmWitness:
    alternative: Tuple[Tuple[str, Value], ...]
    contrast_outcome: Value
    held: Tuple[Witness, ...]  # minimal witness sets for this pair

    def key(self):
        return (tuple((n, atom_key(v)) for n, v in self.alternative), atom_key(self.contrast_outcome),
                tuple((w.held, tuple(atom_key(x) for x in w.values)) for w in self.held))


@dataclass(frozen=True)
class HarmAssessment:
    value: float
    witnesses: Tuple[HarmWitness, ...]
    actual_outcome: Value
    actual_utility: float


@dataclass(frozen=True)
class QualitativeHarm:
    harmed: bool
    actual_outcome: Value
    alternative: Optional[Tuple[Tuple[str, Value], ...]] = None
    contrast_outcome: Optional[Value] = None


@dataclass(frozen=True)
class _Pair:
    alternative: Tuple[Tuple[str, Value], ...]
    outcome_code: int
    held: Tuple[Witness, ...]
    default_code: int  # outcome under [X <- x'] with nothing held


def _check_action(um: UtilityModel, iv: Mapping[str, Value]) -> None:
    if not iv:
        raise QueryError("the action must set at least one variable")
    if um.outcome in iv:
        raise QueryError(f"the action may not set the outcome variable {um.outcome}")
    check_intervention(um.model, iv)


def _alternatives(model: CausalModel, iv: Mapping[str, Value], names: Sequence[str]):
    for combo in itertools.product(*(model.range_of(n) for n in names)):
        if not all(same(c, iv[n]) for c, n in zip(combo, names)):
            yield dict(zip(names, combo))


def _all_subsets(items: Sequence[int]) -> List[Tuple[int, ...]]:
    return [s for k in range(len(items) + 1) for s in itertools.combinations(items, k)]


def _cause_pairs(um: UtilityModel, ctx: Mapping[str, Value], iv: Mapping[str, Value]):
    """Actual outcome code and every cause pair, in lexicographic order."""
    _check_action(um, iv)
    model = um.model
    check_context(model, ctx)
    search = _Search(model, ctx, base=dict(iv))
    o_idx = model.position[um.outcome]
    o_code = int(search.actual[o_idx])
    names = tuple(iv)
    effect = Primitive(um.outcome, um.outcome_values[0])

    blocked = set()
    for size in range(1, len(names)):
        for part in itertools.combinations(names, size):
            alts = list(_alternatives(model, iv, part))
            subs = _all_subsets(search.candidates(set(part), effect))
            out = search.rows(np.stack([search.pin(a) for a in alts]), subs)[:, :, o_idx]
            blocked.update(int(c) for c in np.unique(out))

    alts = list(_alternatives(model, iv, names))
    subs = _all_subsets(search.candidates(set(names), effect))
    sizes = np.array([len(s) for s in subs])
    out = search.rows(np.stack([search.pin(a) for a in alts]), subs)[:, :, o_idx]
    pairs = []
    for a, alt in enumerate(alts):
        for code in range(len(um.outcome_values)):
            if code == o_code or code in blocked:
                continue
            hits = np.flatnonzero(out[a] == code)
            if hits.size == 0:
                continue
            k = sizes[hits[0]]
            held = tuple(search.witness(subs[h]) for h in hits if sizes[h] == k)
            pairs.append(_Pair(tuple(alt.items()), code, held, int(out[a, 0])))
    return o_code, pairs


def _assess(um: UtilityModel, o_code: int, pairs, score) -> HarmAssessment:
    u = um.utilities
    best, chosen = 0.0, []
    for p in pairs:
        v = score(u[o_code], u[p.outcome_code])
        if v > best:
            best, chosen = v, [p]
        elif v == best and v > 0:
            chosen.append(p)
    witnesses = tuple(HarmWitness(p.alternative, um.outcome_values[p.outcome_code], p.held) for p in chosen)
    return HarmAssessment(best, witnesses, um.outcome_values[o_code], u[o_code])


def _harm_score(um):
    d = um.default_low
    return lambda uo, ualt: max(0.0, min(d, ualt) - uo)


def _benefit_score(um):
    d = um.default_high
    return lambda uo, ualt: max(0.0, uo - max(d, ualt)) if uo > ualt else 0.0


def quantitative_harm(um: UtilityModel, ctx: Mapping[str, Value], iv: Mapping[str, Value]) -> HarmAssessment:
    """Largest shortfall below the default over all cause pairs (0 if there are none)."""
    o_code, pairs = _cause_pairs(um, ctx, iv)
    return _assess(um, o_code, pairs, _harm_score(um))


def quantitative_benefit(um: UtilityModel, ctx: Mapping[str, Value], iv: Mapping[str, Value]) -> HarmAssessment:
    """Mirror of :func:`quantitative_harm` above the upper default ``d_b``."""
    o_code, pairs = _cause_pairs(um, ctx, iv)
    return _assess(um, o_code, pairs, _benefit_score(um))


def qualitative_harm(um: UtilityModel, ctx: Mapping[str, Value], iv: Mapping[str, Value]) -> QualitativeHarm:
    """Conditions H1-H3, with the first satisfying cause pair as certificate."""
    o_code, pairs = _cause_pairs(um, ctx, iv)
    u = um.utilities
    o = um.outcome_values[o_code]
    if not u[o_code] < um.default_low:
        return QualitativeHarm(False, o)
    for p in pairs:
        if u[o_code] < u[p.outcome_code] and u[o_code] <= u[p.default_code]:
            return QualitativeHarm(True, o, p.alternative, um.outcome_values[p.outcome_code])
    return QualitativeHarm(False, o)


def h1_h2_only(um: UtilityModel, ctx: Mapping[str, Value], iv: Mapping[str, Value]) -> bool:
    """H1 and H2 without H3, decided one cause query at a time."""
    _check_action(um, iv)
    acted = intervene(um.model, iv)
    o = solve(acted, ctx)[um.outcome]
    uo = um.u(o)
    if not uo < um.default_low:
        return False
    for alt in _alternatives(um.model, iv, tuple(iv)):
        for o_alt, u_alt in zip(um.outcome_values, um.utilities):
            if u_alt <= uo or same(o_alt, o):
                continue
            q = outcome_query(iv, alt, um.outcome, o, o_alt)
            if check_contrastive_cause(acted, ctx, q, witnesses=False).holds:
                return True
    return False


def relative_harm(um: UtilityModel, ctx: Mapping[str, Value], iv: Mapping[str, Value],
                  alternative: Mapping[str, Value], o_alt: Value) -> float:
    """Harm of ``iv`` relative to one alternative and contrast outcome."""
    _check_action(um, iv)
    acted = intervene(um.model, iv)
    o = solve(acted, ctx)[um.outcome]
    um.model.index_of(um.outcome, o_alt)
    if same(o, o_alt):
        raise PreconditionError(f"contrast outcome equals the actual outcome {format_atom(o)}", ("AC2",))
    verdict = check_contrastive_cause(acted, ctx, outcome_query(iv, alternative, um.outcome, o, o_alt),
                                      witnesses=False)
    if not verdict.holds:
        failed = verdict.failed
        raise PreconditionError(f"not a cause: {', '.join(failed)} failed", failed)
    return max(0.0, min(um.default_low, um.u(o_alt)) - um.u(o))


def rbt_harm(um: UtilityModel, ctx: Mapping[str, Value], iv: Mapping[str, Value],
             default_action: Mapping[str, Value]) -> float:
    """Utility shortfall against a single default action (pure but-for comparison)."""
    _check_action(um, iv)
    check_intervention(um.model, default_action)
    actual = solve(intervene(um.model, iv), ctx)[um.outcome]
    baseline = solve(intervene(um.model, default_action), ctx)[um.outcome]
    return max(0.0, um.u(baseline) - um.u(actual))


def oracle_quantitative_harm(um: UtilityModel, ctx: Mapping[str, Value],
                             iv: Mapping[str, Value]) -> HarmAssessment:
    """Reference maximizer: every (x', o') pair decided by the brute-force cause oracle."""
    _check_action(um, iv)
    acted = intervene(um.model, iv)
    o = solve(acted, ctx)[um.outcome]
    o_code = um.model.index_of(um.outcome, o)
    pairs = []
    for alt in _alternatives(um.model, iv, tuple(iv)):
        for code, o_alt in enumerate(um.outcome_values):
            if code == o_code:
                continue
            verdict = oracle_check(acted, ctx, outcome_query(iv, alt, um.outcome, o, o_alt))
            if verdict.holds:
                pairs.append(_Pair(tuple(alt.items()), code, verdict.witnesses, -1))
    return _assess(um, o_code, pairs, _harm_score(um))


def harm_bound(um: UtilityModel) -> float:
    return min(um.default_low, max(um.utilities)) - min(um.utilities)
