"""Acyclic structural causal models over finite ranges.

This module is the reference (pure Python) evaluation path.  The batched
path used by the cause and harm searches lives in :mod:`harmcalc.compiled`
and must agree with :func:`solve` here on every input.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .atoms import Value, atom_key, format_atom, same
from .errors import ExpressionError, InputError, ModelError
from .expr import eval_expression, variables_of

Context = Dict[str, Value]
Intervention = Mapping[str, Value]
Assignment = Dict[str, Value]

ANY = None  # wildcard cell in a table row


@dataclass(frozen=True)
class Variable:
    name: str
    exogenous: bool
    values: tuple

    @property
    def endogenous(self) -> bool:
        return not self.exogenous


@dataclass(frozen=True)
class ConstantEquation:
    target: str
    value: Value
    inputs: tuple = ()

    def evaluate(self, env: Mapping[str, Value]) -> Value:
        return self.value


@dataclass(frozen=True)
class ExpressionEquation:
    target: str
    expr: object

    @cached_property
    def inputs(self) -> tuple:
        return variables_of(self.expr)

    def evaluate(self, env: Mapping[str, Value]) -> Value:
        return eval_expression(self.expr, env)


@dataclass(frozen=True)
class TableEquation:
    """Explicit table; rows are ``(pattern, output)`` and the first match wins.

    A pattern cell of :data:`ANY` matches every value.
    """

    target: str
    inputs: tuple
    rows: tuple

    @cached_property
    def _exact(self):
        index = {}
        for pattern, out in self.rows:
            if any(c is ANY for c in pattern):
                return None
            index.setdefault(tuple(atom_key(c) for c in pattern), out)
        return index

    def evaluate(self, env: Mapping[str, Value]) -> Value:
        try:
            args = [env[name] for name in self.inputs]
        except KeyError as exc:
            raise ExpressionError(f"no value for variable {exc.args[0]!r}") from None
        exact = self._exact
        if exact is not None:
            try:
                return exact[tuple(atom_key(a) for a in args)]
            except KeyError:
                pass
        else:
            for pattern, out in self.rows:
                if all(c is ANY or same(c, a) for c, a in zip(pattern, args)):
                    return out
        shown = ", ".join(f"{n}={format_atom(a)}" for n, a in zip(self.inputs, args))
        raise ExpressionError(f"table for {self.target} has no row for {shown}")


@dataclass(frozen=True)
class CausalModel:
    """Signature plus one equation per endogenous variable.

    Immutable by convention; derived structure is cached on first use.
    """

    variables: tuple
    equations: Mapping[str, object] = field(default_factory=dict)

    @classmethod
    def build(cls, variables: Sequence[Variable], equations) -> "CausalModel":
        if not isinstance(equations, Mapping):
            equations = {eq.target: eq for eq in equations}
        return cls(tuple(variables), dict(equations))

    @cached_property
    def by_name(self) -> Dict[str, Variable]:
        return {v.name: v for v in self.variables}

    @cached_property
    def exogenous(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables if v.exogenous)

    @cached_property
    def endogenous(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables if not v.exogenous)

    @cached_property
    def position(self) -> Dict[str, int]:
        return {v.name: i for i, v in enumerate(self.variables)}

    def range_of(self, name: str) -> tuple:
        try:
            return self.by_name[name].values
        except KeyError:
            raise InputError(f"unknown variable {name!r}") from None

    def index_of(self, name: str, value: Value) -> int:
        for i, v in enumerate(self.range_of(name)):
            if same(v, value):
                return i
        raise InputError(f"value {format_atom(value)} not in range of {name}")

    @cached_property
    def parents(self) -> Dict[str, Tuple[str, ...]]:
        """Semantic parents: inputs whose variation changes the equation's output."""
        return {name: _semantic_parents(self, self.equations[name]) for name in self.endogenous}

    @cached_property
    def order(self) -> Tuple[str, ...]:
        return tuple(dependency_order(self))

    @cached_property
    def compiled(self):
        from .compiled import compile_model

        return compile_model(self)

    def ancestors(self, names, cut=()) -> frozenset:
        """Endogenous variables with a directed path into ``names`` (inclusive).

        Variables in ``cut`` are treated as intervened on: their parents are
        not followed.
        """
        out = set()
        stack = [n for n in names if n in self.equations]
        while stack:
            n = stack.pop()
            if n in out:
                continue
            out.add(n)
            if n not in cut:
                stack.extend(p for p in self.parents[n] if p in self.equations)
        return frozenset(out)


@dataclass(frozen=True)
class Violation:
    kind: str
    variables: tuple
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


def _input_grid(model: CausalModel, inputs):
    return itertools.product(*(model.by_name[n].values for n in inputs))


def _semantic_parents(model: CausalModel, eq) -> Tuple[str, ...]:
    inputs = tuple(n for n in eq.inputs if n != eq.target)
    if not inputs:
        return ()
    table = {}
    for combo in _input_grid(model, inputs):
        table[tuple(atom_key(c) for c in combo)] = atom_key(eq.evaluate(dict(zip(inputs, combo))))
    keys = list(table)
    parents = []
    for i, name in enumerate(inputs):
        groups = {}
        for k in keys:
            rest = k[:i] + k[i + 1:]
            out = table[k]
            if groups.setdefault(rest, out) != out:
                parents.append(name)
                break
    return tuple(parents)


def validate_model(model: CausalModel) -> List[Violation]:
    """Every violated invariant, as data; an empty list means well-formed."""
    report: List[Violation] = []
    names = [v.name for v in model.variables]
    seen = set()
    for n in names:
        if not n:
            report.append(Violation("name", (n,), "empty variable name"))
        if n in seen:
            report.append(Violation("duplicate", (n,), f"variable {n} declared twice"))
        seen.add(n)
    for v in model.variables:
        if not v.values:
            report.append(Violation("range", (v.name,), f"{v.name} has an empty range"))
        keys = [atom_key(x) for x in v.values]
        if len(set(keys)) != len(keys):
            report.append(Violation("range", (v.name,), f"{v.name} has duplicate values in its range"))
    for name, eq in model.equations.items():
        if name not in model.by_name:
            report.append(Violation("equation", (name,), f"equation for unknown variable {name}"))
        elif model.by_name[name].exogenous:
            report.append(Violation("equation", (name,), f"exogenous variable {name} has an equation"))
        if getattr(eq, "target", name) != name:
            report.append(Violation("equation", (name,), f"equation stored under {name} targets {eq.target}"))
    for name in model.endogenous:
        if name not in model.equations:
            report.append(Violation("equation", (name,), f"endogenous variable {name} has no equation"))
    if report:
        return report

    evaluable = True
    for name in model.endogenous:
        eq = model.equations[name]
        unknown = [n for n in eq.inputs if n not in model.by_name]
        if unknown:
            report.append(Violation("unknown", (name, *unknown),
                                    f"equation for {name} reads undeclared {', '.join(unknown)}"))
            evaluable = False
            continue
        if name in eq.inputs:
            report.append(Violation("self", (name,), f"equation for {name} reads {name} itself"))
            evaluable = False
            continue
        allowed = {atom_key(x) for x in model.by_name[name].values}
        for combo in _input_grid(model, eq.inputs):
            env = dict(zip(eq.inputs, combo))
            try:
                out = eq.evaluate(env)
            except ExpressionError as exc:
                report.append(Violation("evaluation", (name,), f"{name}: {exc}"))
                evaluable = False
                break
            if atom_key(out) not in allowed:
                shown = ", ".join(f"{k}={format_atom(x)}" for k, x in env.items())
                report.append(Violation("range", (name,),
                                        f"{name} evaluates to {format_atom(out)} outside its range"
                                        + (f" at {shown}" if shown else "")))
                evaluable = False
                break
    if evaluable:
        cycle = _find_cycle(model)
        if cycle:
            report.append(Violation("cyclic", tuple(cycle), "cyclic dependency " + " -> ".join(cycle)))
    return report


def check_valid(model: CausalModel) -> None:
    report = validate_model(model)
    if report:
        raise ModelError("; ".join(str(v) for v in report))


def _find_cycle(model: CausalModel) -> Optional[List[str]]:
    parents = model.parents
    state = {}
    stack_path: List[str] = []

    def visit(n):
        state[n] = 1
        stack_path.append(n)
        for p in parents[n]:
            if p not in parents:
                continue
            if state.get(p) == 1:
                return stack_path[stack_path.index(p):] + [p]
            if p not in state:
                found = visit(p)
                if found:
                    return found
        stack_path.pop()
        state[n] = 2
        return None

    for n in model.endogenous:
        if n not in state:
            found = visit(n)
            if found:
                # report in cause -> effect direction
                return found[::-1]
    return None


def dependency_order(model: CausalModel) -> List[str]:
    """Topological order of the endogenous variables, ties by declaration order."""
    parents = {n: [p for p in model.parents[n] if p in model.equations] for n in model.endogenous}
    pos = model.position
    remaining = {n: len(ps) for n, ps in parents.items()}
    children: Dict[str, List[str]] = {n: [] for n in parents}
    for n, ps in parents.items():
        for p in ps:
            children[p].append(n)
    ready = sorted((n for n, k in remaining.items() if k == 0), key=pos.__getitem__)
    order = []
    while ready:
        n = ready.pop(0)
        order.append(n)
        for c in children[n]:
            remaining[c] -= 1
            if remaining[c] == 0:
                ready.append(c)
        ready.sort(key=pos.__getitem__)
    if len(order) != len(parents):
        cycle = _find_cycle(model) or sorted(set(parents) - set(order), key=pos.__getitem__)
        raise ModelError("cyclic dependency " + " -> ".join(cycle))
    return order


def check_intervention(model: CausalModel, iv: Intervention) -> None:
    for name, value in iv.items():
        var = model.by_name.get(name)
        if var is None:
            raise InputError(f"cannot intervene on unknown variable {name!r}")
        if var.exogenous:
            raise InputError(f"cannot intervene on exogenous variable {name!r}")
        model.index_of(name, value)


def intervene(model: CausalModel, iv: Intervention) -> CausalModel:
    """Copy of ``model`` with each intervened equation replaced by a constant."""
    check_intervention(model, iv)
    if not iv:
        return model
    equations = dict(model.equations)
    for name, value in iv.items():
        equations[name] = ConstantEquation(name, value)
    out = CausalModel(model.variables, equations)
    if "parents" in model.__dict__:
        # reuse the already derived graph; pinned variables lose their parents
        out.__dict__["parents"] = {n: (() if n in iv else ps) for n, ps in model.parents.items()}
    return out


def check_context(model: CausalModel, ctx: Mapping[str, Value]) -> None:
    missing = [n for n in model.exogenous if n not in ctx]
    if missing:
        raise InputError(f"context is missing {', '.join(missing)}")
    for name, value in ctx.items():
        var = model.by_name.get(name)
        if var is None or not var.exogenous:
            raise InputError(f"{name!r} is not an exogenous variable")
        model.index_of(name, value)


def solve(model: CausalModel, ctx: Mapping[str, Value]) -> Assignment:
    """The unique solution of the equations in context ``ctx``."""
    check_context(model, ctx)
    env: Assignment = {n: ctx[n] for n in model.exogenous}
    # placeholders: only non-parents of a variable can still hold one when it is evaluated
    for n in model.endogenous:
        env[n] = model.by_name[n].values[0]
    for n in model.order:
        env[n] = model.equations[n].evaluate(env)
    return {v.name: env[v.name] for v in model.variables}


def enumerate_contexts(model: CausalModel) -> List[Context]:
    """Cross product of the exogenous ranges, lexicographic in declaration order."""
    names = model.exogenous
    return [dict(zip(names, combo)) for combo in _input_grid(model, names)]


# -- causal formulas -------------------------------------------------------


@dataclass(frozen=True)
class Primitive:
    var: str
    value: Value


@dataclass(frozen=True)
class FNot:
    operand: object


@dataclass(frozen=True)
class FAnd:
    operands: tuple


@dataclass(frozen=True)
class FOr:
    operands: tuple


@dataclass(frozen=True)
class Interv:
    settings: tuple  # ((name, value), ...)
    formula: object

    @classmethod
    def of(cls, settings: Mapping[str, Value], formula) -> "Interv":
        return cls(tuple(settings.items()), formula)


def formula_variables(f) -> tuple:
    seen = {}

    def walk(g):
        if isinstance(g, Primitive):
            seen.setdefault(g.var, None)
        elif isinstance(g, FNot):
            walk(g.operand)
        elif isinstance(g, (FAnd, FOr)):
            for o in g.operands:
                walk(o)
        elif isinstance(g, Interv):
            walk(g.formula)
        else:
            raise InputError(f"not a causal formula: {g!r}")

    walk(f)
    return tuple(seen)


def has_intervention(f) -> bool:
    if isinstance(f, Interv):
        return True
    if isinstance(f, FNot):
        return has_intervention(f.operand)
    if isinstance(f, (FAnd, FOr)):
        return any(has_intervention(o) for o in f.operands)
    return False


def check_formula(model: CausalModel, f, nested=False) -> None:
    if isinstance(f, Primitive):
        model.index_of(f.var, f.value)
    elif isinstance(f, FNot):
        check_formula(model, f.operand, nested)
    elif isinstance(f, (FAnd, FOr)):
        for o in f.operands:
            check_formula(model, o, nested)
    elif isinstance(f, Interv):
        if nested:
            raise InputError("interventions may not be nested")
        check_intervention(model, dict(f.settings))
        check_formula(model, f.formula, True)
    else:
        raise InputError(f"not a causal formula: {f!r}")


def holds_in(f, assignment: Mapping[str, Value]) -> bool:
    """Truth of an intervention-free formula in a full assignment."""
    if isinstance(f, Primitive):
        return same(assignment[f.var], f.value)
    if isinstance(f, FNot):
        return not holds_in(f.operand, assignment)
    if isinstance(f, FAnd):
        return all(holds_in(o, assignment) for o in f.operands)
    if isinstance(f, FOr):
        return any(holds_in(o, assignment) for o in f.operands)
    raise InputError(f"formula {f!r} contains an intervention")


def satisfies(model: CausalModel, ctx: Mapping[str, Value], f) -> bool:
    """``(M, u) |= f``."""
    check_formula(model, f)
    return _sat(model, ctx, f, None)


def _sat(model, ctx, f, cache):
    if isinstance(f, Interv):
        return _sat(intervene(model, dict(f.settings)), ctx, f.formula, None)
    if isinstance(f, Primitive):
        if cache is None:
            cache = solve(model, ctx)
        return same(cache[f.var], f.value)
    if cache is None and not has_intervention(f):
        cache = solve(model, ctx)
    if isinstance(f, FNot):
        return not _sat(model, ctx, f.operand, cache)
    if isinstance(f, FAnd):
        return all(_sat(model, ctx, o, cache) for o in f.operands)
    if isinstance(f, FOr):
        return any(_sat(model, ctx, o, cache) for o in f.operands)
    raise InputError(f"not a causal formula: {f!r}")


def conj(settings: Mapping[str, Value]):
    """Formula asserting every ``name = value`` in ``settings``."""
    prims = tuple(Primitive(n, v) for n, v in settings.items())
    return prims[0] if len(prims) == 1 else FAnd(prims)
