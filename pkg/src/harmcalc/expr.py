"""Small expression language for structural equations.

Grammar (keywords are reserved, identifiers resolve to variables first
and to symbols from declared ranges second)::

    expr     := 'if' expr 'then' expr ('elif' expr 'then' expr)* 'else' expr
              | or_expr
    or_expr  := and_expr ('or' and_expr)*
    and_expr := not_expr ('and' not_expr)*
    not_expr := 'not' not_expr | cmp
    cmp      := atom (CMP_OP atom)?
    atom     := NUMBER | 'true' | 'false' | IDENT | QUOTED | '(' expr ')'
    CMP_OP   := '=' | '!=' | '≠' | '<' | '<=' | '≤' | '>' | '>=' | '≥'

``elif`` is sugar for a nested ``if`` in the ``else`` branch.  Ordered
comparisons work on numbers, or on symbols of a variable's range (by
declaration order).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .atoms import KEYWORDS, Value, format_atom, is_number, same
from .errors import ExpressionError


@dataclass(frozen=True)
class Lit:
    value: Value


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Cmp:
    op: str
    left: "Expr"
    right: "Expr"
    order: Optional[tuple] = None


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class BoolOp:
    op: str
    operands: tuple


@dataclass(frozen=True)
class If:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"


Expr = (Lit, Var, Cmp, Not, BoolOp, If)

_CANONICAL_OPS = {"≠": "!=", "≤": "<=", "≥": ">="}
_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>-?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<quoted>'[^']*'|"[^"]*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|!=|[=<>≠≤≥()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionError(f"unexpected character {text[pos]!r}", column=pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            word = m.group()
            if kind == "ident" and word in KEYWORDS:
                kind = "kw"
            tokens.append(_Token(kind, word, pos + 1))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text, ranges):
        self.tokens = _tokenize(text)
        self.i = 0
        self.ranges = ranges
        self.symbols = {v for vals in ranges.values() for v in vals if isinstance(v, str)}

    @property
    def tok(self):
        return self.tokens[self.i]

    def take(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def accept(self, kind, text=None):
        t = self.tok
        if t.kind == kind and (text is None or t.text == text):
            self.i += 1
            return t
        return None

    def expect(self, kind, text):
        t = self.accept(kind, text)
        if t is None:
            found = self.tok.text or "end of expression"
            raise ExpressionError(f"expected {text!r}, found {found!r}", column=self.tok.column)
        return t

    def parse(self):
        node = self.expr()
        if self.tok.kind != "eof":
            raise ExpressionError(f"unexpected {self.tok.text!r}", column=self.tok.column)
        return node

    def expr(self):
        start = self.accept("kw", "if")
        if start is None:
            return self.or_expr()
        cond = self.expr()
        self.expect("kw", "then")
        then = self.expr()
        branches = [(cond, then)]
        while self.accept("kw", "elif"):
            c = self.expr()
            self.expect("kw", "then")
            branches.append((c, self.expr()))
        if self.accept("kw", "else") is None:
            raise ExpressionError("conditional without 'else'", column=start.column)
        node = self.expr()
        for c, t in reversed(branches):
            node = If(c, t, node)
        return node

    def or_expr(self):
        items = [self.and_expr()]
        while self.accept("kw", "or"):
            items.append(self.and_expr())
        return items[0] if len(items) == 1 else BoolOp("or", tuple(items))

    def and_expr(self):
        items = [self.not_expr()]
        while self.accept("kw", "and"):
            items.append(self.not_expr())
        return items[0] if len(items) == 1 else BoolOp("and", tuple(items))

    def not_expr(self):
        if self.accept("kw", "not"):
            return Not(self.not_expr())
        return self.cmp()

    def cmp(self):
        left = self.atom()
        t = self.tok
        if t.kind == "op" and t.text not in "()":
            self.take()
            op = _CANONICAL_OPS.get(t.text, t.text)
            right = self.atom()
            order = None
            if op in ("<", "<=", ">", ">="):
                order = self._order_for(left, right, t.column)
            return Cmp(op, left, right, order)
        return left

    def _order_for(self, left, right, column):
        for side in (left, right):
            if isinstance(side, Var):
                values = self.ranges[side.name]
                if all(is_number(v) for v in values):
                    return None
                return tuple(values)
        if isinstance(left, Lit) and isinstance(right, Lit):
            if is_number(left.value) and is_number(right.value):
                return None
        raise ExpressionError("ordered comparison needs a numeric or ranged operand", column=column)

    def atom(self):
        t = self.take()
        if t.kind == "number":
            return Lit(float(t.text) if any(c in t.text for c in ".eE") else int(t.text))
        if t.kind == "quoted":
            return Lit(t.text[1:-1])
        if t.kind == "kw" and t.text in ("true", "false"):
            return Lit(t.text == "true")
        if t.kind == "ident":
            if t.text in self.ranges:
                return Var(t.text)
            if t.text in self.symbols:
                return Lit(t.text)
            raise ExpressionError(f"undeclared variable {t.text!r}", column=t.column)
        if t.kind == "op" and t.text == "(":
            node = self.expr()
            self.expect("op", ")")
            return node
        found = t.text or "end of expression"
        raise ExpressionError(f"unexpected {found!r}", column=t.column)


def parse_expression(text: str, ranges: Mapping[str, Sequence[Value]]):
    """Parse ``text``; ``ranges`` maps every declared variable to its range."""
    return _Parser(text, ranges).parse()


def variables_of(node) -> tuple:
    """Referenced variable names, in first-occurrence order."""
    seen = {}

    def walk(n):
        if isinstance(n, Var):
            seen.setdefault(n.name, None)
        elif isinstance(n, Cmp):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, Not):
            walk(n.operand)
        elif isinstance(n, BoolOp):
            for o in n.operands:
                walk(o)
        elif isinstance(n, If):
            walk(n.cond)
            walk(n.then)
            walk(n.orelse)

    walk(node)
    return tuple(seen)


def _as_bool(value, what):
    if not isinstance(value, bool):
        raise ExpressionError(f"{what} expects a boolean, got {format_atom(value)}")
    return value


def _ordered(value, order):
    if is_number(value):
        return value
    if order is not None:
        for i, v in enumerate(order):
            if same(v, value):
                return i
    raise ExpressionError(f"{format_atom(value)} is not ordered")


def eval_expression(node, env: Mapping[str, Value]) -> Value:
    """Evaluate ``node`` with variables looked up in ``env``."""
    if isinstance(node, Lit):
        return node.value
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise ExpressionError(f"no value for variable {node.name!r}") from None
    if isinstance(node, Cmp):
        a = eval_expression(node.left, env)
        b = eval_expression(node.right, env)
        if node.op == "=":
            return same(a, b)
        if node.op == "!=":
            return not same(a, b)
        x, y = _ordered(a, node.order), _ordered(b, node.order)
        if is_number(a) != is_number(b):
            raise ExpressionError(f"cannot compare {format_atom(a)} with {format_atom(b)}")
        if node.op == "<":
            return x < y
        if node.op == "<=":
            return x <= y
        if node.op == ">":
            return x > y
        return x >= y
    if isinstance(node, Not):
        return not _as_bool(eval_expression(node.operand, env), "'not'")
    if isinstance(node, BoolOp):
        # no short-circuit: every operand must type-check
        vals = [_as_bool(eval_expression(o, env), repr(node.op)) for o in node.operands]
        return all(vals) if node.op == "and" else any(vals)
    if isinstance(node, If):
        if _as_bool(eval_expression(node.cond, env), "'if'"):
            return eval_expression(node.then, env)
        return eval_expression(node.orelse, env)
    raise TypeError(f"not an expression node: {node!r}")


_PREC = {If: 0, BoolOp: None, Not: 3, Cmp: 4, Lit: 5, Var: 5}


def _prec(node):
    if isinstance(node, BoolOp):
        return 1 if node.op == "or" else 2
    return _PREC[type(node)]


def unparse(node, ranges: Optional[Mapping[str, Sequence[Value]]] = None) -> str:
    """Render ``node`` so that parsing the text gives back an equal tree.

    With ``ranges``, symbols that would not resolve back to themselves
    (variable names, or symbols outside every range) are quoted.
    """
    symbols = None
    if ranges is not None:
        symbols = {v for vals in ranges.values() for v in vals if isinstance(v, str)}
    return _unparse(node, ranges or {}, symbols)


def _unparse(node, ranges, symbols) -> str:
    def wrap(child, min_prec):
        text = _unparse(child, ranges, symbols)
        return f"({text})" if _prec(child) < min_prec else text

    if isinstance(node, Lit):
        text = format_atom(node.value)
        if isinstance(node.value, str) and symbols is not None:
            if text in ranges or node.value not in symbols:
                text = f"'{node.value}'"
        return text
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Cmp):
        return f"{wrap(node.left, 5)} {node.op} {wrap(node.right, 5)}"
    if isinstance(node, Not):
        return "not " + wrap(node.operand, 3)
    if isinstance(node, BoolOp):
        p = _prec(node)
        return f" {node.op} ".join(wrap(o, p + 1) for o in node.operands)
    if isinstance(node, If):
        cond, then, orelse = (_unparse(n, ranges, symbols) for n in (node.cond, node.then, node.orelse))
        return f"if {cond} then {then} else {orelse}"
    raise TypeError(f"not an expression node: {node!r}")
