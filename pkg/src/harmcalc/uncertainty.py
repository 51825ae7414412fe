"""Context distributions, probability weighting and weighted harm."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .atoms import Value, atom_key
from .errors import InputError
from .harm import HarmAssessment, UtilityModel, quantitative_harm, rbt_harm
from .scm import CausalModel, check_context, enumerate_contexts, intervene, solve

PROBABILITY_TOLERANCE = 1e-12


def _ctx_key(model: CausalModel, ctx: Mapping[str, Value]) -> tuple:
    return tuple(atom_key(ctx[n]) for n in model.exogenous)


@dataclass(frozen=True)
class ContextDistribution:
    """Exact probabilities over contexts, listed in enumeration order.

    ``literals`` keeps each probability as written in the source so that
    reports can echo it unchanged.
    """

    model: CausalModel
    contexts: Tuple[Dict[str, Value], ...]
    probabilities: Tuple[Fraction, ...]
    literals: Tuple[str, ...]

    @classmethod
    def from_pairs(cls, model: CausalModel, pairs, literals: Optional[Sequence[str]] = None) -> "ContextDistribution":
        """Build from ``(context, probability)`` pairs; unlisted contexts get 0."""
        given = {}
        for i, (ctx, p) in enumerate(pairs):
            check_context(model, ctx)
            key = _ctx_key(model, ctx)
            if key in given:
                raise InputError("context listed twice in distribution")
            p = Fraction(p)
            if p < 0:
                raise InputError("probabilities must be nonnegative")
            given[key] = (p, literals[i] if literals is not None else str(p))
        contexts, probs, lits = [], [], []
        for ctx in enumerate_contexts(model):
            p, lit = given.pop(_ctx_key(model, ctx), (Fraction(0), "0"))
            contexts.append(ctx)
            probs.append(p)
            lits.append(lit)
        dist = cls(model, tuple(contexts), tuple(probs), tuple(lits))
        dist.check()
        return dist

    @classmethod
    def point_mass(cls, model: CausalModel, ctx: Mapping[str, Value]) -> "ContextDistribution":
        return cls.from_pairs(model, [(dict(ctx), 1)], ["1"])

    @classmethod
    def product(cls, model: CausalModel, marginals: Mapping[str, Mapping]) -> "ContextDistribution":
        """Independent exogenous variables; ``marginals[var][value]`` is a probability."""
        pairs = []
        for ctx in enumerate_contexts(model):
            p = Fraction(1)
            for name in model.exogenous:
                table = {atom_key(k): Fraction(v) for k, v in marginals[name].items()}
                p *= table.get(atom_key(ctx[name]), Fraction(0))
            pairs.append((ctx, p))
        return cls.from_pairs(model, pairs)

    @property
    def total(self) -> Fraction:
        return sum(self.probabilities, Fraction(0))

    def check(self) -> None:
        total = float(self.total)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise InputError(f"distribution sums to {total!r}")

    def check_model(self, model: CausalModel) -> None:
        if [(v.name, v.values) for v in model.variables if v.exogenous] != \
                [(v.name, v.values) for v in self.model.variables if v.exogenous]:
            raise InputError("distribution support does not match the model's contexts")

    def items(self):
        return zip(self.contexts, self.probabilities)


# -- weighting functions ---------------------------------------------------


@dataclass(frozen=True)
class Identity:
    def __call__(self, p) -> float:
        return float(p)

    def __str__(self):
        return "identity"


@dataclass(frozen=True)
class Floor:
    """Probabilities below ``tau`` are ignored."""

    tau: float

    def __call__(self, p) -> float:
        return 0.0 if p < self.tau else float(p)

    def __str__(self):
        return f"floor:{self.tau!r}"


@dataclass(frozen=True)
class TableWeighting:
    """Explicit weights for listed probabilities; other probabilities are unchanged."""

    name: str
    entries: Tuple[Tuple[Fraction, float], ...]

    def __call__(self, p) -> float:
        p = Fraction(p)
        for q, w in self.entries:
            if q == p:
                return w
        return float(p)

    def __str__(self):
        return f"table:{self.name}"


@dataclass(frozen=True)
class Prelec:
    """``w(p) = exp(-(-ln p)^alpha)``; overweights small probabilities when alpha < 1."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise InputError("prelec parameter must lie in (0, 1]")

    def __call__(self, p) -> float:
        p = float(p)
        if p <= 0.0:
            return 0.0
        if p >= 1.0:
            return 1.0
        return math.exp(-((-math.log(p)) ** self.alpha))

    def __str__(self):
        return f"prelec:{self.alpha!r}"


def parse_weighting(text: str, tables: Optional[Mapping[str, TableWeighting]] = None):
    """``identity``, ``floor:TAU``, ``table:NAME``, ``table:FILE`` or ``prelec:ALPHA``.

    ``table:`` looks ``NAME`` up in ``tables`` first and otherwise reads it as a
    weight-table file (see :func:`read_weight_table`).
    """
    kind, _, arg = text.strip().partition(":")
    try:
        if kind == "identity" and not arg:
            return Identity()
        if kind == "floor":
            tau = float(Fraction(arg))
            if not 0 <= tau <= 1:
                raise InputError("floor threshold must lie in [0, 1]")
            return Floor(tau)
        if kind == "prelec":
            return Prelec(float(arg))
    except ValueError:
        raise InputError(f"bad weighting parameter in {text!r}") from None
    if kind == "table":
        if tables and arg in tables:
            return tables[arg]
        if arg and Path(arg).is_file():
            return read_weight_table(arg)
        raise InputError(f"unknown weight table {arg!r}")
    raise InputError(f"unknown weighting {text!r}")


def read_weight_table(path) -> TableWeighting:
    """A weight table file: one ``probability -> weight`` per line, ``#`` comments."""
    entries = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        left, arrow, right = line.partition("->")
        try:
            if not arrow:
                raise ValueError
            entry = (Fraction(left.strip()), float(right))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"{path}:{lineno}: expected 'probability -> weight'") from None
        if not 0.0 <= entry[1] <= 1.0:
            raise InputError(f"{path}:{lineno}: weights must lie in [0, 1]")
        entries.append(entry)
    return TableWeighting(str(path), tuple(entries))


# -- weighted harm ---------------------------------------------------------


@dataclass(frozen=True)
class ContextHarm:
    context: Dict[str, Value]
    probability: Fraction
    literal: str
    weight: float
    assessment: HarmAssessment

    @property
    def harm(self) -> float:
        return self.assessment.value


@dataclass(frozen=True)
class WqhReport:
    total: float
    per_context: Tuple[ContextHarm, ...]


def wqh(um: UtilityModel, dist: ContextDistribution, iv: Mapping[str, Value], w=Identity()) -> WqhReport:
    """Sum over contexts of ``w(Pr(u)) * QH(u)``, summed in enumeration order."""
    dist.check_model(um.model)
    rows = []
    for ctx, p, lit in zip(dist.contexts, dist.probabilities, dist.literals):
        rows.append(ContextHarm(ctx, p, lit, w(p), quantitative_harm(um, ctx, iv)))
    return WqhReport(math.fsum(r.weight * r.harm for r in rows), tuple(rows))


def expected_harm(um: UtilityModel, dist: ContextDistribution, iv: Mapping[str, Value]) -> float:
    return wqh(um, dist, iv, Identity()).total


def expected_utility(um: UtilityModel, dist: ContextDistribution, iv: Mapping[str, Value]) -> float:
    dist.check_model(um.model)
    acted = intervene(um.model, iv)
    return math.fsum(float(p) * um.u(solve(acted, ctx)[um.outcome]) for ctx, p in dist.items())


def expected_rbt_harm(um: UtilityModel, dist: ContextDistribution, iv: Mapping[str, Value],
                      default_action: Mapping[str, Value]) -> float:
    dist.check_model(um.model)
    return math.fsum(float(p) * rbt_harm(um, ctx, iv, default_action) for ctx, p in dist.items())
