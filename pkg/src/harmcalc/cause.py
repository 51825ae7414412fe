"""Contrastive actual causation with held witness sets.

``X=x rather than X=x'`` causes ``phi rather than phi'`` in ``(M, u)`` when

* AC1: ``X=x`` and ``phi`` hold in the actual world;
* AC2: some set ``W`` of endogenous variables, held at its actual values,
  makes ``[X <- x', W <- w] phi'`` true;
* AC3: no strict nonempty subset of ``X`` satisfies AC2.

:func:`check_contrastive_cause` runs the search on the compiled model in
batches.  Holding a variable that is not an ancestor of ``phi'`` fixed can
never change ``phi'``, so the optimized search only tries ancestors; every
minimal witness lies among them.  :func:`oracle_check` is the unpruned
enumeration (all subsets, all settings) on the pure Python solver.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from .atoms import Value, format_atom, same
from .errors import PreconditionError, QueryError
from .scm import (
    CausalModel,
    FAnd,
    FNot,
    FOr,
    Interv,
    Primitive,
    check_context,
    check_formula,
    conj,
    formula_variables,
    has_intervention,
    holds_in,
    satisfies,
    solve,
)


@dataclass(frozen=True)
class ContrastiveQuery:
    """``cause`` rather than ``alternative`` causes ``effect`` rather than ``alt_effect``."""

    cause: Mapping[str, Value]
    alternative: Mapping[str, Value]
    effect: object
    alt_effect: object

    @property
    def cause_vars(self) -> Tuple[str, ...]:
        return tuple(self.cause)


@dataclass(frozen=True)
class Witness:
    held: Tuple[str, ...]
    values: Tuple[Value, ...]

    def as_dict(self) -> Dict[str, Value]:
        return dict(zip(self.held, self.values))

    def __str__(self):
        if not self.held:
            return "{}"
        return "{" + ", ".join(f"{n}={format_atom(v)}" for n, v in zip(self.held, self.values)) + "}"


@dataclass(frozen=True)
class CauseVerdict:
    holds: bool
    witnesses: Tuple[Witness, ...] = ()
    ac1: bool = False
    ac2: bool = False
    ac3: bool = False

    @property
    def failed(self) -> Tuple[str, ...]:
        return tuple(n for n, ok in (("AC1", self.ac1), ("AC2", self.ac2), ("AC3", self.ac3)) if not ok)


# -- query checks ----------------------------------------------------------


def entails_negation(model: CausalModel, phi, phi_alt) -> bool:
    """Whether ``phi' => not phi`` is valid, by enumerating the mentioned variables."""
    names = sorted(set(formula_variables(phi)) | set(formula_variables(phi_alt)), key=model.position.get)
    for combo in itertools.product(*(model.range_of(n) for n in names)):
        env = dict(zip(names, combo))
        if holds_in(phi_alt, env) and holds_in(phi, env):
            return False
    return True


def check_query(model: CausalModel, q: ContrastiveQuery) -> None:
    if not q.cause:
        raise QueryError("cause must name at least one variable")
    if set(q.cause) != set(q.alternative):
        raise QueryError("cause and alternative must set the same variables")
    for name in q.cause:
        var = model.by_name.get(name)
        if var is None or var.exogenous:
            raise QueryError(f"cause variable {name!r} must be endogenous")
        model.index_of(name, q.cause[name])
        model.index_of(name, q.alternative[name])
    if all(same(q.cause[n], q.alternative[n]) for n in q.cause):
        raise QueryError("alternative must differ from the cause in some component")
    for f in (q.effect, q.alt_effect):
        if has_intervention(f):
            raise QueryError("effects must be Boolean combinations of primitive events")
        check_formula(model, f)
    if not entails_negation(model, q.effect, q.alt_effect):
        raise QueryError("alternative effect does not entail the negation of the effect")


def outcome_query(cause, alternative, outcome: str, o, o_alt) -> ContrastiveQuery:
    return ContrastiveQuery(dict(cause), dict(alternative), Primitive(outcome, o), Primitive(outcome, o_alt))


def check_ac1(model: CausalModel, ctx: Mapping[str, Value], q: ContrastiveQuery) -> bool:
    actual = solve(model, ctx)
    return all(same(actual[n], v) for n, v in q.cause.items()) and holds_in(q.effect, actual)


def but_for(model: CausalModel, ctx: Mapping[str, Value], q: ContrastiveQuery) -> bool:
    """AC2 with an empty witness set."""
    check_query(model, q)
    if not check_ac1(model, ctx, q):
        raise PreconditionError("AC1 fails: the cause or the effect does not actually hold", ("AC1",))
    return satisfies(model, ctx, Interv.of(q.alternative, q.alt_effect))


# -- optimized search ------------------------------------------------------


def formula_mask(cm, f, out: np.ndarray) -> np.ndarray:
    """Vectorized truth of an intervention-free formula over solved rows."""
    if isinstance(f, Primitive):
        return out[:, cm.idx(f.var)] == cm.code(f.var, f.value)
    if isinstance(f, FNot):
        return ~formula_mask(cm, f.operand, out)
    if isinstance(f, FAnd):
        mask = np.ones(len(out), dtype=bool)
        for o in f.operands:
            mask &= formula_mask(cm, o, out)
        return mask
    if isinstance(f, FOr):
        mask = np.zeros(len(out), dtype=bool)
        for o in f.operands:
            mask |= formula_mask(cm, o, out)
        return mask
    raise QueryError(f"unsupported effect formula {f!r}")


def subsets_by_size(items: Sequence[int], size: int) -> List[Tuple[int, ...]]:
    return list(itertools.combinations(items, size))


@dataclass
class _Search:
    """Batched AC2 evaluation for one causal setting."""

    model: CausalModel
    ctx: Mapping[str, Value]
    base: Mapping[str, Value] = field(default_factory=dict)
    cm: object = field(init=False)
    init: np.ndarray = field(init=False)
    actual: np.ndarray = field(init=False)
    base_pins: np.ndarray = field(init=False)

    def __post_init__(self):
        self.cm = self.model.compiled
        self.init = self.cm.encode_contexts([self.ctx])[0]
        self.base_pins = self.cm.encode_intervention(self.base)
        self.actual = self.cm.solve(self.init[None, :], self.base_pins)[0]

    def candidates(self, cause_vars, effect) -> List[int]:
        pos = self.model.position
        anc = self.model.ancestors(formula_variables(effect), cut=self.base)
        return sorted(pos[n] for n in anc if n not in cause_vars)

    def rows(self, pins: np.ndarray, subsets: Sequence[Tuple[int, ...]]) -> np.ndarray:
        """Solve ``pins`` (A x n) combined with every subset held at actual values.

        Returns solved rows shaped (A, len(subsets), n).
        """
        a = len(pins)
        iv = np.repeat(pins[:, None, :], len(subsets), axis=1)
        for s, sub in enumerate(subsets):
            if sub:
                cols = list(sub)
                iv[:, s, cols] = self.actual[cols]
        iv = iv.reshape(a * len(subsets), -1)
        init = np.broadcast_to(self.init, iv.shape)
        return self.cm.solve(init, iv).reshape(a, len(subsets), -1)

    def pin(self, settings: Mapping[str, Value]) -> np.ndarray:
        row = self.base_pins.copy()
        for name, value in settings.items():
            row[self.cm.idx(name)] = self.cm.code(name, value)
        return row

    def witness(self, sub) -> Witness:
        names = tuple(self.model.variables[i].name for i in sub)
        return Witness(names, tuple(self.cm.value(i, int(self.actual[i])) for i in sub))

    def ac2(self, settings_list: Sequence[Mapping[str, Value]], effect, all_minimal: bool) -> List[Witness]:
        """Minimal witnesses for any of ``settings_list`` (first size that succeeds)."""
        cause_vars = set(settings_list[0])
        cand = self.candidates(cause_vars, effect)
        pins = np.stack([self.pin(s) for s in settings_list])
        for size in range(len(cand) + 1):
            subs = subsets_by_size(cand, size)
            out = self.rows(pins, subs)
            mask = formula_mask(self.cm, effect, out.reshape(-1, out.shape[-1])).reshape(out.shape[:2])
            hit = mask.any(axis=0)
            if hit.any():
                found = [self.witness(sub) for sub, h in zip(subs, hit) if h]
                return found if all_minimal else found[:1]
        return []

    def ac3(self, q: ContrastiveQuery) -> bool:
        names = q.cause_vars
        for size in range(1, len(names)):
            for part in itertools.combinations(names, size):
                settings = [dict(zip(part, combo))
                            for combo in itertools.product(*(self.model.range_of(n) for n in part))]
                settings = [s for s in settings if not all(same(s[n], q.cause[n]) for n in part)]
                if settings and self.ac2(settings, q.alt_effect, all_minimal=False):
                    return False
        return True


def check_contrastive_cause(model: CausalModel, ctx: Mapping[str, Value], q: ContrastiveQuery,
                            witnesses: bool = True) -> CauseVerdict:
    """Decide the contrastive cause query.

    With ``witnesses=False`` the search stops at the first witness and the
    verdict carries at most one.
    """
    check_query(model, q)
    check_context(model, ctx)
    ac1 = check_ac1(model, ctx, q)
    if not ac1 and not witnesses:
        return CauseVerdict(False, (), False, False, False)
    search = _Search(model, ctx)
    found = search.ac2([q.alternative], q.alt_effect, all_minimal=witnesses)
    ac2 = bool(found)
    ac3 = len(q.cause) == 1 or search.ac3(q)
    holds = ac1 and ac2 and ac3
    return CauseVerdict(holds, tuple(found) if holds else (), ac1, ac2, ac3)


# -- brute-force oracle ----------------------------------------------------


def _all_witnesses(model, ctx, actual, settings, phi_alt) -> List[Witness]:
    """Every (W, w) with (M,u) |= W=w and [X<-x', W<-w]phi', no early exit."""
    others = [v.name for v in model.variables if v.endogenous and v.name not in settings]
    found = []
    for size in range(len(others) + 1):
        for held in itertools.combinations(others, size):
            for values in itertools.product(*(model.range_of(n) for n in held)):
                fixed = dict(zip(held, values))
                if fixed and not holds_in(conj(fixed), actual):
                    continue
                if satisfies(model, ctx, Interv.of({**settings, **fixed}, phi_alt)):
                    found.append(Witness(held, values))
    return found


def oracle_check(model: CausalModel, ctx: Mapping[str, Value], q: ContrastiveQuery) -> CauseVerdict:
    """Unpruned reference implementation of :func:`check_contrastive_cause`."""
    check_query(model, q)
    actual = solve(model, ctx)
    ac1 = satisfies(model, ctx, FAnd((conj(q.cause), q.effect)))
    found = _all_witnesses(model, ctx, actual, dict(q.alternative), q.alt_effect)
    ac2 = bool(found)
    blocked = False
    names = q.cause_vars
    for size in range(1, len(names)):
        for part in itertools.combinations(names, size):
            for combo in itertools.product(*(model.range_of(n) for n in part)):
                if all(same(c, q.cause[n]) for c, n in zip(combo, part)):
                    continue
                if _all_witnesses(model, ctx, actual, dict(zip(part, combo)), q.alt_effect):
                    blocked = True
    ac3 = not blocked
    holds = ac1 and ac2 and ac3
    minimal = ()
    if holds:
        smallest = min(len(w.held) for w in found)
        pos = model.position
        minimal = tuple(sorted((w for w in found if len(w.held) == smallest),
                               key=lambda w: [pos[n] for n in w.held]))
    return CauseVerdict(holds, minimal, ac1, ac2, ac3)
