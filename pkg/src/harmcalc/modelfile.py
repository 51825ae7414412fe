"""Reader and writer for ``.harm`` model files.

The format is line based: ``[section]`` headers followed by entries, with
``#`` starting a comment line.  ``docs/model-format.md`` has the grammar.
Every problem is reported as a :class:`Diagnostic` with a line and column.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from .atoms import IDENT_RE, KEYWORDS, Value, atom_key, format_atom, parse_atom, same
from .errors import ExpressionError, InputError
from .expr import parse_expression, unparse
from .scm import ANY, CausalModel, ExpressionEquation, TableEquation, Variable, validate_model

PENALTY_MODES = ("once", "per-group")
PROBABILITY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self):
        return f"line {self.line}, column {self.column}: {self.message}"


class ModelFileError(InputError):
    def __init__(self, diagnostics: List[Diagnostic], source: str = "<model>"):
        self.diagnostics = list(diagnostics)
        self.source = source
        super().__init__("\n".join(f"{source}: {d}" for d in self.diagnostics))


@dataclass(frozen=True)
class AgentSpec:
    id: str
    outcome: str
    utility: Tuple[Tuple[Value, float], ...]
    default: Tuple[float, float]
    interval: bool = False  # written as [d_h, d_b]


@dataclass(frozen=True)
class ModelFile:
    meta: Tuple[Tuple[str, str], ...] = ()
    variables: Tuple[Variable, ...] = ()
    equations: Tuple[object, ...] = ()  # declaration order of the targets
    distribution_kind: Optional[str] = None  # "joint" | "marginal"
    distribution: Tuple[tuple, ...] = ()
    weights: Tuple[Tuple[str, Tuple[Tuple[str, float], ...]], ...] = ()
    weighting: Optional[str] = None
    agents: Tuple[AgentSpec, ...] = ()
    groups: Tuple[Tuple[str, Tuple[str, ...]], ...] = ()
    alpha: float = 0.0
    beta: float = 0.0
    penalty_mode: str = "once"
    policies: Tuple[Tuple[str, Tuple[Tuple[str, Value], ...]], ...] = ()
    default_action: Optional[str] = None

    @cached_property
    def model(self) -> CausalModel:
        return CausalModel.build(self.variables, self.equations)

    @property
    def name(self) -> str:
        return dict(self.meta).get("name", "")

    def distribution_pairs(self) -> Optional[List[Tuple[Dict[str, Value], Fraction, str]]]:
        """Explicit ``(context, probability, literal)`` entries, or ``None``."""
        if self.distribution_kind == "joint":
            return [(dict(ctx), Fraction(lit), lit) for ctx, lit in self.distribution]
        if self.distribution_kind == "marginal":
            from .scm import enumerate_contexts
            table = {name: {atom_key(v): lit for v, lit in entries} for name, entries in self.distribution}
            out = []
            for ctx in enumerate_contexts(self.model):
                p = Fraction(1)
                lits = []
                for name in self.model.exogenous:
                    lit = table.get(name, {}).get(atom_key(ctx[name]), "0")
                    p *= Fraction(lit)
                    lits.append(lit)
                out.append((ctx, p, "*".join(lits) if len(lits) > 1 else lits[0]))
            return out
        return None


# -- parsing ---------------------------------------------------------------

_SECTION_RE = re.compile(r"\[\s*([a-z]+)(?:\s+([^\]\s]+))?\s*\]\s*\Z")
_VARIABLE_RE = re.compile(r"(\S+?)\s*:\s*(\w+)\s*=(.*)\Z")
_EQUATION_RE = re.compile(r"(\S+?)\s*:=(.*)\Z")
_KEY_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*=(.*)\Z")

_SECTION_KEYS = {
    "meta": ("name", "description", "note", "illustrative"),
    "agent": ("outcome", "default", "utility"),
    "fairness": ("alpha", "beta", "penalty_mode"),
    "weighting": ("function",),
    "rbt": ("default_action",),
}
_NAMED = ("table", "agent", "weights")
_SECTIONS = ("meta", "variables", "equations", "table", "distribution", "agent", "groups",
             "fairness", "weighting", "weights", "policies", "rbt")


def _split(text: str, col: int, sep: str = ",") -> List[Tuple[str, int]]:
    """Split on ``sep`` outside quotes; returns stripped items with their columns."""
    items, start, quote = [], 0, None
    for i, ch in enumerate(text + sep):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == sep or i == len(text):
            piece = text[start:i]
            stripped = piece.strip()
            lead = len(piece) - len(piece.lstrip())
            items.append((stripped, col + start + lead))
            start = i + 1
    return items


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.diags: List[Diagnostic] = []
        self.meta: Dict[str, str] = {}
        self.variables: List[Tuple[Variable, int]] = []
        self.raw_equations: Dict[str, tuple] = {}
        self.tables: Dict[str, dict] = {}
        self.dist_lines: List[Tuple[str, int]] = []
        self.dist_header = 0
        self.agents: Dict[str, dict] = {}
        self.groups: List[tuple] = []
        self.fairness: Dict[str, tuple] = {}
        self.weighting: Optional[tuple] = None
        self.weights: Dict[str, list] = {}
        self.policies: List[tuple] = []
        self.rbt: Optional[tuple] = None
        self.seen_sections = set()

    def error(self, line, col, message):
        self.diags.append(Diagnostic(line, col, message))

    def atom(self, text, line, col):
        try:
            return parse_atom(text)
        except ValueError as exc:
            self.error(line, col, str(exc))
            return None

    def number(self, text, line, col, what="number"):
        try:
            return float(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError):
            self.error(line, col, f"expected a {what}, found {text.strip()!r}")
            return None

    # -- first pass: lines ---------------------------------------------------

    def read(self):
        section, arg = None, None
        for lineno, raw in enumerate(self.text.splitlines(), start=1):
            line = raw.rstrip()
            body = line.lstrip()
            if not body or body.startswith("#"):
                continue
            col = len(line) - len(body) + 1
            if body.startswith("["):
                section, arg = self.header(body, lineno, col)
                continue
            if section is None:
                self.error(lineno, col, "entry outside of any section")
                continue
            if section == "?":
                continue
            getattr(self, "line_" + section)(arg, body, lineno, col)
        return self

    def header(self, body, lineno, col):
        m = _SECTION_RE.match(body)
        if m is None:
            self.error(lineno, col, f"malformed section header {body!r}")
            return "?", None
        kind, arg = m.group(1), m.group(2)
        if kind not in _SECTIONS:
            self.error(lineno, col, f"unknown section [{kind}]")
            return "?", None
        if (kind in _NAMED) != (arg is not None):
            self.error(lineno, col, f"section [{kind}] " + ("needs a name" if kind in _NAMED else "takes no name"))
            return "?", None
        key = (kind, arg)
        if key in self.seen_sections:
            self.error(lineno, col, f"duplicate section [{kind}{' ' + arg if arg else ''}]")
            return "?", None
        self.seen_sections.add(key)
        if kind == "table":
            self.tables[arg] = {"line": lineno, "inputs": None, "rows": []}
        elif kind == "agent":
            self.agents[arg] = {"line": lineno}
        elif kind == "weights":
            self.weights[arg] = []
        elif kind == "distribution":
            self.dist_header = lineno
        return kind, arg

    def keyed(self, kind, body, lineno, col):
        m = _KEY_RE.match(body)
        if m is None:
            self.error(lineno, col, "expected 'key = value'")
            return None
        key = m.group(1)
        if key not in _SECTION_KEYS[kind]:
            self.error(lineno, col, f"unknown key {key!r} in [{kind}]")
            return None
        value = m.group(2)
        vcol = col + m.start(2) + (len(value) - len(value.lstrip()))
        return key, value.strip(), vcol

    def line_meta(self, arg, body, lineno, col):
        kv = self.keyed("meta", body, lineno, col)
        if kv:
            self.meta[kv[0]] = kv[1]

    def line_variables(self, arg, body, lineno, col):
        m = _VARIABLE_RE.match(body)
        if m is None:
            self.error(lineno, col, "expected 'name : exogenous|endogenous = v1, v2, ...'")
            return
        name, role = m.group(1), m.group(2)
        if not IDENT_RE.match(name) or name in KEYWORDS:
            self.error(lineno, col, f"invalid variable name {name!r}")
            return
        if role not in ("exogenous", "endogenous"):
            self.error(lineno, col + m.start(2), f"role must be exogenous or endogenous, found {role!r}")
            return
        values = []
        for text, c in _split(m.group(3), col + m.start(3)):
            if not text:
                self.error(lineno, c, "empty value in range")
                return
            v = self.atom(text, lineno, c)
            if v is None:
                return
            values.append(v)
        self.variables.append((Variable(name, role == "exogenous", tuple(values)), lineno))

    def line_equations(self, arg, body, lineno, col):
        m = _EQUATION_RE.match(body)
        if m is None:
            self.error(lineno, col, "expected 'name := expression'")
            return
        name = m.group(1)
        if name in self.raw_equations:
            self.error(lineno, col, f"second equation for {name}")
            return
        text = m.group(2)
        self.raw_equations[name] = ("expr", text, lineno, col + m.start(2))

    def line_table(self, arg, body, lineno, col):
        table = self.tables[arg]
        if table["inputs"] is None:
            m = _KEY_RE.match(body)
            if m is None or m.group(1) != "inputs":
                self.error(lineno, col, "a table starts with 'inputs = A, B, ...'")
                table["inputs"] = ()
                return
            names = [t for t in _split(m.group(2), col + m.start(2))]
            if len(names) == 1 and not names[0][0]:
                names = []
            table["inputs"] = tuple(names)
            table["inputs_line"] = lineno
            return
        left, arrow, right = body.partition("->")
        if not arrow:
            self.error(lineno, col, "table row needs '->'")
            return
        cells = _split(left, col) if left.strip() else []
        table["rows"].append((cells, (right.strip(), col + len(left) + 2 + (len(right) - len(right.lstrip()))), lineno))

    def line_distribution(self, arg, body, lineno, col):
        self.dist_lines.append((body, lineno, col))

    def line_agent(self, arg, body, lineno, col):
        kv = self.keyed("agent", body, lineno, col)
        if kv:
            if kv[0] in self.agents[arg]:
                self.error(lineno, col, f"duplicate key {kv[0]!r}")
            self.agents[arg][kv[0]] = (kv[1], lineno, kv[2])

    def line_groups(self, arg, body, lineno, col):
        m = _KEY_RE.match(body)
        if m is None:
            self.error(lineno, col, "expected 'group = agent, agent, ...'")
            return
        members = _split(m.group(2), col + m.start(2))
        self.groups.append((m.group(1), members, lineno, col))

    def line_fairness(self, arg, body, lineno, col):
        kv = self.keyed("fairness", body, lineno, col)
        if kv:
            self.fairness[kv[0]] = (kv[1], lineno, kv[2])

    def line_weighting(self, arg, body, lineno, col):
        kv = self.keyed("weighting", body, lineno, col)
        if kv:
            self.weighting = (kv[1], lineno, kv[2])

    def line_weights(self, arg, body, lineno, col):
        left, arrow, right = body.partition("->")
        if not arrow:
            self.error(lineno, col, "weight entry needs 'probability -> weight'")
            return
        lit = left.strip()
        try:
            Fraction(lit)
        except (ValueError, ZeroDivisionError):
            self.error(lineno, col, f"bad probability {lit!r}")
            return
        w = self.number(right, lineno, col + len(left) + 2, "weight")
        if w is not None:
            if not 0.0 <= w <= 1.0:
                self.error(lineno, col + len(left) + 2, "weights must lie in [0, 1]")
                return
            self.weights[arg].append((lit, w))

    def line_policies(self, arg, body, lineno, col):
        name, colon, rest = body.partition(":")
        name = name.strip()
        if not colon or not IDENT_RE.match(name.replace("-", "_")):
            self.error(lineno, col, "expected 'policy: X = v, ...'")
            return
        settings = []
        for text, c in _split(rest, col + len(body) - len(rest)):
            var, eq, val = text.partition("=")
            if not eq:
                self.error(lineno, c, f"expected 'X = v', found {text!r}")
                return
            settings.append((var.strip(), val.strip(), c))
        self.policies.append((name, settings, lineno, col))

    def line_rbt(self, arg, body, lineno, col):
        kv = self.keyed("rbt", body, lineno, col)
        if kv:
            self.rbt = (kv[1], lineno, kv[2])

    # -- second pass: resolution ----------------------------------------------

    def resolve(self) -> Optional[ModelFile]:
        decl_line = {}
        by_name = {}
        for var, lineno in self.variables:
            if var.name in by_name:
                self.error(lineno, 1, f"variable {var.name} declared twice")
                continue
            by_name[var.name] = var
            decl_line[var.name] = lineno
        ranges = {n: v.values for n, v in by_name.items()}

        def in_range(name, value, lineno, col):
            if name not in by_name:
                self.error(lineno, col, f"undeclared variable {name!r}")
                return False
            if not any(same(value, x) for x in by_name[name].values):
                self.error(lineno, col, f"value {format_atom(value)} is not in the range of {name}")
                return False
            return True

        equations, eq_line = {}, {}
        for name, (_, text, lineno, col) in self.raw_equations.items():
            if name not in by_name:
                self.error(lineno, 1, f"equation for undeclared variable {name!r}")
                continue
            try:
                equations[name] = ExpressionEquation(name, parse_expression(text, ranges))
            except ExpressionError as exc:
                self.error(lineno, col + (exc.column or 1) - 1, str(exc))
                continue
            eq_line[name] = lineno
        for name, table in self.tables.items():
            if name not in by_name:
                self.error(table["line"], 1, f"table for undeclared variable {name!r}")
                continue
            if name in self.raw_equations:
                self.error(table["line"], 1, f"second equation for {name}")
                continue
            inputs = table["inputs"] or ()
            ok = True
            for n, c in inputs:
                if n not in by_name:
                    self.error(table.get("inputs_line", table["line"]), c, f"undeclared variable {n!r}")
                    ok = False
            rows = []
            for cells, (out_text, out_col), lineno in table["rows"]:
                if len(cells) != len(inputs):
                    self.error(lineno, 1, f"row has {len(cells)} cells for {len(inputs)} inputs")
                    ok = False
                    continue
                pattern = []
                for (text, c), (n, _) in zip(cells, inputs):
                    if text == "*":
                        pattern.append(ANY)
                        continue
                    v = self.atom(text, lineno, c)
                    if v is None or not in_range(n, v, lineno, c):
                        ok = False
                    pattern.append(v)
                out = self.atom(out_text, lineno, out_col)
                if out is None or not in_range(name, out, lineno, out_col):
                    ok = False
                rows.append((tuple(pattern), out))
            if ok:
                equations[name] = TableEquation(name, tuple(n for n, _ in inputs), tuple(rows))
                eq_line[name] = table["line"]

        variables = tuple(by_name.values())
        ordered = tuple(equations[v.name] for v in variables if v.name in equations)
        if not self.diags:
            model = CausalModel.build(variables, ordered)
            for violation in validate_model(model):
                first = violation.variables[0] if violation.variables else None
                lineno = eq_line.get(first, decl_line.get(first, 1))
                self.error(lineno, 1, violation.message)

        dist_kind, dist = self.resolve_distribution(by_name, in_range)
        weights = tuple((name, tuple(entries)) for name, entries in self.weights.items())
        weighting = None
        if self.weighting:
            text, lineno, col = self.weighting
            weighting = text
            kind, _, param = text.partition(":")
            if kind == "table":
                if param not in self.weights:
                    self.error(lineno, col, f"unknown weight table {param!r}")
            elif kind in ("floor", "prelec"):
                try:
                    value = float(Fraction(param))
                    if kind == "floor" and not 0 <= value <= 1 or kind == "prelec" and not 0 < value <= 1:
                        raise ValueError
                except (ValueError, ZeroDivisionError):
                    self.error(lineno, col, f"bad weighting parameter {param!r}")
            elif text != "identity":
                self.error(lineno, col, f"unknown weighting {text!r}")

        agents = self.resolve_agents(by_name, in_range)
        agent_ids = {a.id for a in agents}
        groups = []
        for name, members, lineno, col in self.groups:
            names = tuple(m for m, _ in members if m)
            for m, c in members:
                if m not in agent_ids:
                    self.error(lineno, c, f"unknown agent {m!r} in group {name}")
            if not names:
                self.error(lineno, col, f"group {name} is empty")
            groups.append((name, names))

        alpha, beta, mode = 0.0, 0.0, "once"
        for key, (text, lineno, col) in self.fairness.items():
            if key == "penalty_mode":
                if text not in PENALTY_MODES:
                    self.error(lineno, col, f"penalty_mode must be one of {', '.join(PENALTY_MODES)}")
                mode = text
                continue
            value = self.number(text, lineno, col)
            if value is not None and value < 0:
                self.error(lineno, col, f"{key} must be nonnegative")
            if key == "alpha":
                alpha = value
            else:
                beta = value

        policies = []
        seen = set()
        for name, settings, lineno, col in self.policies:
            if name in seen:
                self.error(lineno, col, f"policy {name} defined twice")
            seen.add(name)
            iv = []
            for var, text, c in settings:
                value = self.atom(text, lineno, c)
                if value is None or not in_range(var, value, lineno, c):
                    continue
                if by_name[var].exogenous:
                    self.error(lineno, c, f"policy {name} sets exogenous variable {var}")
                iv.append((var, value))
            policies.append((name, tuple(iv)))

        default_action = None
        if self.rbt:
            default_action, lineno, col = self.rbt
            if default_action not in seen:
                self.error(lineno, col, f"unknown policy {default_action!r}")

        if self.diags:
            return None
        return ModelFile(
            meta=tuple(self.meta.items()), variables=variables, equations=ordered,
            distribution_kind=dist_kind, distribution=dist, weights=weights, weighting=weighting,
            agents=agents, groups=tuple(groups), alpha=alpha, beta=beta, penalty_mode=mode,
            policies=tuple(policies), default_action=default_action,
        )

    def resolve_distribution(self, by_name, in_range):
        if not self.dist_lines:
            return None, ()
        exo = [n for n, v in by_name.items() if v.exogenous]
        kinds = set()
        joint, marginal = [], {}
        total = Fraction(0)
        for body, lineno, col in self.dist_lines:
            left, colon, right = body.rpartition(":")
            if not colon:
                self.error(lineno, col, "expected 'assignments : probability' or 'var : v=p, ...'")
                continue
            if "=" in left:
                kinds.add("joint")
                ctx = {}
                for text, c in _split(left, col):
                    var, eq, val = text.partition("=")
                    var = var.strip()
                    value = self.atom(val, lineno, c) if eq else None
                    if value is None or not in_range(var, value, lineno, c):
                        continue
                    if not by_name[var].exogenous:
                        self.error(lineno, c, f"{var} is not exogenous")
                    ctx[var] = value
                missing = [n for n in exo if n not in ctx]
                if missing:
                    self.error(lineno, col, f"context is missing {', '.join(missing)}")
                lit = right.strip()
                p = self.probability(lit, lineno, col + len(left) + 1)
                if p is not None:
                    total += p
                    joint.append((tuple((n, ctx[n]) for n in exo if n in ctx), lit))
            else:
                kinds.add("marginal")
                var = left.strip()
                if var not in by_name or not by_name[var].exogenous:
                    self.error(lineno, col, f"{var!r} is not an exogenous variable")
                    continue
                entries, subtotal = [], Fraction(0)
                for text, c in _split(right, col + len(left) + 1):
                    val, eq, lit = text.partition("=")
                    value = self.atom(val, lineno, c) if eq else None
                    if value is None or not in_range(var, value, lineno, c):
                        continue
                    lit = lit.strip()
                    p = self.probability(lit, lineno, c)
                    if p is not None:
                        subtotal += p
                        entries.append((value, lit))
                marginal[var] = (tuple(entries), subtotal, lineno)
        if len(kinds) > 1:
            self.error(self.dist_header, 1, "distribution mixes joint rows and marginals")
            return None, ()
        if "joint" in kinds:
            keys = [tuple(atom_key(v) for _, v in ctx) for ctx, _ in joint]
            if len(set(keys)) != len(keys):
                self.error(self.dist_header, 1, "a context is listed twice in the distribution")
            self.check_sum(total, self.dist_header)
            return "joint", tuple(joint)
        for var in exo:
            if var not in marginal:
                self.error(self.dist_header, 1, f"no marginal for {var}")
        for var, (_, subtotal, lineno) in marginal.items():
            self.check_sum(subtotal, lineno, f" for {var}")
        return "marginal", tuple((v, marginal[v][0]) for v in exo if v in marginal)

    def probability(self, lit, lineno, col):
        try:
            p = Fraction(lit)
        except (ValueError, ZeroDivisionError):
            self.error(lineno, col, f"bad probability {lit!r}")
            return None
        if p < 0:
            self.error(lineno, col, "probabilities must be nonnegative")
            return None
        return p

    def check_sum(self, total, lineno, suffix=""):
        if abs(float(total) - 1.0) > PROBABILITY_TOLERANCE:
            self.error(lineno, 1, f"distribution{suffix} sums to {float(total)!r}")

    def resolve_agents(self, by_name, in_range):
        agents = []
        for aid, entries in self.agents.items():
            missing = [k for k in _SECTION_KEYS["agent"] if k not in entries]
            if missing:
                self.error(entries["line"], 1, f"agent {aid} is missing {', '.join(missing)}")
                continue
            outcome, lineno, col = entries["outcome"]
            if outcome not in by_name or by_name[outcome].exogenous:
                self.error(lineno, col, f"outcome {outcome!r} must be an endogenous variable")
                continue
            text, lineno, col = entries["default"]
            interval = text.startswith("[")
            if interval:
                if not text.endswith("]"):
                    self.error(lineno, col, "default interval must be '[low, high]'")
                    continue
                parts = _split(text[1:-1], col + 1)
                if len(parts) != 2:
                    self.error(lineno, col, "default interval must be '[low, high]'")
                    continue
                bounds = [self.number(t, lineno, c) for t, c in parts]
            else:
                bounds = [self.number(text, lineno, col)] * 2
            if None in bounds:
                continue
            if bounds[0] > bounds[1]:
                self.error(lineno, col, "default interval must satisfy low <= high")
                continue
            text, lineno, col = entries["utility"]
            table = []
            for item, c in _split(text, col):
                val, colon, num = item.rpartition(":")
                if not colon:
                    self.error(lineno, c, f"expected 'value: utility', found {item!r}")
                    continue
                value = self.atom(val, lineno, c)
                u = self.number(num, lineno, c, "utility")
                if value is None or u is None or not in_range(outcome, value, lineno, c):
                    continue
                table.append((value, u))
            covered = {atom_key(v) for v, _ in table}
            gaps = [format_atom(v) for v in by_name[outcome].values if atom_key(v) not in covered]
            if gaps:
                self.error(lineno, col, f"utility for agent {aid} misses {', '.join(gaps)}")
                continue
            order = [atom_key(x) for x in by_name[outcome].values]
            table.sort(key=lambda item: order.index(atom_key(item[0])))
            agents.append(AgentSpec(aid, outcome, tuple(table), (bounds[0], bounds[1]), interval))
        return tuple(agents)


def parse_model(text: str, source: str = "<model>") -> ModelFile:
    """Parse model-file text; raises :class:`ModelFileError` with every diagnostic."""
    reader = _Reader(text).read()
    result = reader.resolve()
    if result is None:
        raise ModelFileError(sorted(reader.diags, key=lambda d: (d.line, d.column)), source)
    return result


def diagnose(text: str) -> List[Diagnostic]:
    try:
        parse_model(text)
    except ModelFileError as exc:
        return exc.diagnostics
    return []


# -- serialization ---------------------------------------------------------


def _num(x: float) -> str:
    return repr(float(x))


def serialize(mf: ModelFile) -> str:
    """Canonical text for ``mf``; parsing it gives back an equal :class:`ModelFile`."""
    ranges = {v.name: v.values for v in mf.variables}
    out: List[str] = []

    def section(header):
        if out:
            out.append("")
        out.append(header)

    if mf.meta:
        section("[meta]")
        out.extend(f"{k} = {v}" for k, v in mf.meta)
    section("[variables]")
    for v in mf.variables:
        role = "exogenous" if v.exogenous else "endogenous"
        out.append(f"{v.name} : {role} = " + ", ".join(format_atom(x) for x in v.values))
    exprs = [eq for eq in mf.equations if isinstance(eq, ExpressionEquation)]
    if exprs:
        section("[equations]")
        out.extend(f"{eq.target} := {unparse(eq.expr, ranges)}" for eq in exprs)
    for eq in mf.equations:
        if isinstance(eq, TableEquation):
            section(f"[table {eq.target}]")
            out.append("inputs = " + ", ".join(eq.inputs))
            for pattern, value in eq.rows:
                cells = ", ".join("*" if c is ANY else format_atom(c) for c in pattern)
                out.append(f"{cells} -> {format_atom(value)}".lstrip())
    if mf.distribution_kind == "joint":
        section("[distribution]")
        for ctx, lit in mf.distribution:
            out.append(", ".join(f"{n}={format_atom(v)}" for n, v in ctx) + f" : {lit}")
    elif mf.distribution_kind == "marginal":
        section("[distribution]")
        for name, entries in mf.distribution:
            out.append(f"{name} : " + ", ".join(f"{format_atom(v)}={lit}" for v, lit in entries))
    for name, entries in mf.weights:
        section(f"[weights {name}]")
        out.extend(f"{lit} -> {_num(w)}" for lit, w in entries)
    if mf.weighting is not None:
        section("[weighting]")
        out.append(f"function = {mf.weighting}")
    for a in mf.agents:
        section(f"[agent {a.id}]")
        out.append(f"outcome = {a.outcome}")
        low, high = a.default
        out.append(f"default = [{_num(low)}, {_num(high)}]" if a.interval else f"default = {_num(low)}")
        out.append("utility = " + ", ".join(f"{format_atom(v)}: {_num(u)}" for v, u in a.utility))
    if mf.groups:
        section("[groups]")
        out.extend(f"{name} = {', '.join(members)}" for name, members in mf.groups)
    if (mf.alpha, mf.beta, mf.penalty_mode) != (0.0, 0.0, "once"):
        section("[fairness]")
        out.append(f"alpha = {_num(mf.alpha)}")
        out.append(f"beta = {_num(mf.beta)}")
        out.append(f"penalty_mode = {mf.penalty_mode}")
    if mf.policies:
        section("[policies]")
        for name, iv in mf.policies:
            out.append(f"{name}: " + ", ".join(f"{n} = {format_atom(v)}" for n, v in iv))
    if mf.default_action is not None:
        section("[rbt]")
        out.append(f"default_action = {mf.default_action}")
    return "\n".join(out) + "\n"
