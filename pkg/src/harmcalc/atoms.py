"""Typed value atoms: integers, reals, booleans and symbols.

Python treats ``True == 1`` and ``1 == 1.0``; range lookups must not, so
every comparison between atoms goes through :func:`atom_key`.
"""
import math
import re
from typing import Union

Value = Union[bool, int, float, str]

KEYWORDS = frozenset({"if", "then", "elif", "else", "and", "or", "not", "true", "false"})

_INT_RE = re.compile(r"[+-]?\d+\Z")
_REAL_RE = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\Z")
IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def atom_key(value: Value):
    """Hashable key with exact atom semantics (bool is not a number)."""
    if isinstance(value, bool):
        return ("bool", value)
    if isinstance(value, (int, float)):
        return ("num", value)
    return ("sym", value)


def same(a: Value, b: Value) -> bool:
    return atom_key(a) == atom_key(b)


def is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def parse_atom(text: str) -> Value:
    """Parse a literal as written in a model file or on the command line."""
    text = text.strip()
    if not text:
        raise ValueError("empty value")
    if text == "true":
        return True
    if text == "false":
        return False
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "'\"":
        return text[1:-1]
    if _INT_RE.match(text):
        return int(text)
    if _REAL_RE.match(text):
        value = float(text)
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {text!r}")
        return value
    if IDENT_RE.match(text):
        return text
    raise ValueError(f"cannot parse value {text!r}")


def format_atom(value: Value) -> str:
    """Inverse of :func:`parse_atom`."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if IDENT_RE.match(value) and value not in KEYWORDS:
        return value
    return "'" + value + "'"
