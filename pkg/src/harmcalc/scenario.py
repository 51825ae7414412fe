"""Domain objects built from a model file, and the bundled scenario corpus."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional

from .atoms import Value
from .collective import Agent, CollectiveModel
from .errors import InputError
from .harm import UtilityModel
from .modelfile import ModelFile, parse_model
from .scm import CausalModel
from .uncertainty import ContextDistribution, Identity, TableWeighting, parse_weighting


@dataclass
class Scenario:
    file: ModelFile
    source: str = "<model>"

    @property
    def name(self) -> str:
        return self.file.name or Path(self.source).stem

    @cached_property
    def model(self) -> CausalModel:
        return self.file.model

    @cached_property
    def distribution(self) -> ContextDistribution:
        """The file's distribution; a model without exogenous variables gets a point mass."""
        pairs = self.file.distribution_pairs()
        if pairs is None:
            if self.model.exogenous:
                raise InputError(f"{self.name} has no [distribution] section")
            return ContextDistribution.point_mass(self.model, {})
        return ContextDistribution.from_pairs(self.model, [(c, p) for c, p, _ in pairs],
                                              [lit for _, _, lit in pairs])

    @cached_property
    def tables(self) -> Dict[str, TableWeighting]:
        return {name: TableWeighting(name, tuple((Fraction(lit), w) for lit, w in entries))
                for name, entries in self.file.weights}

    def weighting(self, spec: Optional[str] = None):
        spec = spec if spec is not None else self.file.weighting
        return Identity() if spec is None else parse_weighting(spec, self.tables)

    @cached_property
    def agents(self) -> Dict[str, UtilityModel]:
        return {a.id: UtilityModel.make(self.model, a.outcome, a.utility, a.default)
                for a in self.file.agents}

    def agent(self, agent_id: Optional[str] = None) -> UtilityModel:
        if agent_id is None:
            if len(self.agents) != 1:
                names = ", ".join(self.agents) or "none"
                raise InputError(f"choose an agent with --agent (available: {names})")
            return next(iter(self.agents.values()))
        try:
            return self.agents[agent_id]
        except KeyError:
            raise InputError(f"unknown agent {agent_id!r}") from None

    @cached_property
    def policies(self) -> Dict[str, Dict[str, Value]]:
        return {name: dict(iv) for name, iv in self.file.policies}

    def policy(self, name: str) -> Dict[str, Value]:
        try:
            return self.policies[name]
        except KeyError:
            raise InputError(f"unknown policy {name!r} (available: {', '.join(self.policies)})") from None

    @property
    def default_action(self) -> Optional[Dict[str, Value]]:
        return None if self.file.default_action is None else self.policy(self.file.default_action)

    def collective(self, weighting=None, penalty_mode: Optional[str] = None, **overrides) -> CollectiveModel:
        options = dict(
            groups={name: members for name, members in self.file.groups},
            alpha=self.file.alpha, beta=self.file.beta,
            weighting=weighting if weighting is not None else self.weighting(),
            penalty_mode=penalty_mode or self.file.penalty_mode,
        )
        options.update(overrides)
        agents = tuple(Agent(aid, um) for aid, um in self.agents.items())
        return CollectiveModel(self.model, self.distribution, agents, **options)


def corpus_names() -> List[str]:
    files = resources.files("harmcalc").joinpath("scenarios")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".harm"))


def corpus_text(name: str) -> str:
    return resources.files("harmcalc").joinpath("scenarios").joinpath(name + ".harm").read_text(encoding="utf-8")


def resolve(name: str) -> str:
    """Bundled scenario name for ``name`` (exact, or a unique prefix), else ``''``."""
    names = corpus_names()
    if name in names:
        return name
    hits = [n for n in names if n.startswith(name)]
    return hits[0] if len(hits) == 1 else ""


def load(name_or_path: str) -> Scenario:
    """Load a bundled scenario by name or a model file by path."""
    path = Path(name_or_path)
    if path.is_file():
        return Scenario(parse_model(path.read_text(encoding="utf-8"), str(path)), str(path))
    bundled = resolve(name_or_path)
    if bundled:
        return Scenario(parse_model(corpus_text(bundled), bundled), bundled)
    raise InputError(f"no such model file or bundled scenario: {name_or_path}")
