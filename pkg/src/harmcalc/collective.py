"""Harm to a population of agents, with a penalty for singling out groups."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Sequence, Tuple

from .atoms import Value
from .errors import InputError
from .harm import UtilityModel
from .scm import CausalModel
from .uncertainty import ContextDistribution, Identity, wqh

PENALTY_MODES = ("once", "per-group")


@dataclass(frozen=True)
class Agent:
    id: str
    utility: UtilityModel  # carries the agent's outcome variable, utilities and default


@dataclass(frozen=True)
class CollectiveModel:
    model: CausalModel
    dist: ContextDistribution
    agents: Tuple[Agent, ...]
    groups: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)
    alpha: float = 0.0
    beta: float = 0.0
    weighting: object = Identity()
    penalty_mode: str = "once"

    def __post_init__(self):
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise InputError("agent ids must be unique")
        for a in self.agents:
            if a.utility.model is not self.model and a.utility.model != self.model:
                raise InputError(f"agent {a.id} does not share the collective's causal model")
        for name, members in self.groups.items():
            if not members:
                raise InputError(f"group {name} is empty")
            unknown = [m for m in members if m not in ids]
            if unknown:
                raise InputError(f"group {name} names unknown agents: {', '.join(unknown)}")
        if self.alpha < 0 or self.beta < 0:
            raise InputError("alpha and beta must be nonnegative")
        if self.penalty_mode not in PENALTY_MODES:
            raise InputError(f"penalty mode must be one of {', '.join(PENALTY_MODES)}")
        self.dist.check_model(self.model)

    def with_options(self, **changes) -> "CollectiveModel":
        return replace(self, **changes)


@dataclass(frozen=True)
class AggregateReport:
    per_agent: Dict[str, float]
    group_stats: Dict[str, float]
    population_average: float
    disproportionate: Tuple[str, ...]
    penalty: float
    total: float


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs) if xs else 0.0


def per_agent_wqh(cm: CollectiveModel, iv: Mapping[str, Value]) -> Dict[str, float]:
    return {a.id: wqh(a.utility, cm.dist, iv, cm.weighting).total for a in cm.agents}


def disproportionate_groups(cm: CollectiveModel, harms: Mapping[str, float]) -> Tuple[str, ...]:
    """Groups whose mean harm exceeds the population mean by more than beta."""
    overall = _mean([harms[a.id] for a in cm.agents])
    return tuple(sorted(g for g, members in cm.groups.items()
                        if _mean([harms[m] for m in members]) - overall > cm.beta))


def aggregate_harm(cm: CollectiveModel, iv: Mapping[str, Value]) -> AggregateReport:
    harms = per_agent_wqh(cm, iv)
    flagged = disproportionate_groups(cm, harms)
    if cm.penalty_mode == "per-group":
        penalty = cm.alpha * len(flagged)
    else:
        penalty = cm.alpha if flagged else 0.0
    base = math.fsum(harms.values())
    stats = {g: _mean([harms[m] for m in members]) for g, members in sorted(cm.groups.items())}
    return AggregateReport(harms, stats, _mean(list(harms.values())), flagged, penalty, base + penalty)


def compare_policies(cm: CollectiveModel, policies: Mapping[str, Mapping[str, Value]]) -> List[Tuple[str, AggregateReport]]:
    """Policies ranked by total harm (ascending), ties broken by name."""
    if len(policies) < 2:
        raise InputError("comparison needs at least two policies")
    reports = [(name, aggregate_harm(cm, iv)) for name, iv in policies.items()]
    return sorted(reports, key=lambda item: (item[1].total, item[0]))
