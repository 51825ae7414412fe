import pytest
from hypothesis import given, strategies as st

from harmcalc.atoms import atom_key, format_atom, parse_atom, same
from harmcalc.errors import ExpressionError
from harmcalc.expr import BoolOp, Cmp, If, Lit, Not, Var, eval_expression, parse_expression, unparse

RANGES = {"T": ("none", "t1", "t2"), "g2": ("no", "yes"), "N": (0, 1, 5), "B": (False, True),
          "O": ("alive", "dead")}


def test_bool_and_number_atoms_are_distinct():
    assert not same(True, 1)
    assert same(1, 1.0)
    assert atom_key("1") != atom_key(1)


@pytest.mark.parametrize("text,value", [("true", True), ("false", False), ("3", 3), ("-2", -2),
                                        ("0.25", 0.25), ("yes", "yes"), ("'if'", "if"), ("'5'", "5")])
def test_parse_atom(text, value):
    parsed = parse_atom(text)
    assert same(parsed, value) and type(parsed) is type(value)


@given(st.one_of(st.booleans(), st.integers(-10**6, 10**6),
                 st.floats(allow_nan=False, allow_infinity=False),
                 st.text(alphabet="abcxyz_' 09", min_size=1, max_size=6).filter(lambda s: "'" not in s)))
def test_format_parse_round_trip(value):
    assert same(parse_atom(format_atom(value)), value)


def test_treatment_fragment_matches_table():
    node = parse_expression("if T = t2 and g2 = no then dead else alive", RANGES)
    for t in RANGES["T"]:
        for g in RANGES["g2"]:
            expected = "dead" if (t, g) == ("t2", "no") else "alive"
            assert eval_expression(node, {"T": t, "g2": g}) == expected


def test_elif_chain_and_ordered_comparisons():
    node = parse_expression("if N <= 0 then 0 elif N < 5 then 1 else 5", RANGES)
    assert [eval_expression(node, {"N": n}) for n in (0, 1, 5)] == [0, 1, 5]
    sym = parse_expression("T > t1", RANGES)
    assert [eval_expression(sym, {"T": t}) for t in RANGES["T"]] == [False, False, True]


def test_unicode_operators():
    node = parse_expression("N ≥ 1 and T ≠ none", RANGES)
    assert eval_expression(node, {"N": 5, "T": "t1"}) is True


def test_constant_expression():
    assert eval_expression(parse_expression("5", RANGES), {}) == 5


def test_undeclared_variable_is_named_with_column():
    with pytest.raises(ExpressionError) as exc:
        parse_expression("T = t1 and Q = 1", RANGES)
    assert "'Q'" in str(exc.value) and exc.value.column == 12


def test_conditional_needs_else():
    with pytest.raises(ExpressionError, match="without 'else'"):
        parse_expression("if B then 1", RANGES)


def test_type_mismatch_raises():
    node = parse_expression("not N", RANGES)
    with pytest.raises(ExpressionError, match="boolean"):
        eval_expression(node, {"N": 1})


def _exprs():
    leaves = st.one_of(
        st.sampled_from([Var("T"), Var("N"), Var("B"), Lit(1), Lit(True), Lit("t1"), Lit("odd one")]),
    )
    cmps = st.builds(lambda l, op, r: Cmp(op, l, r), leaves, st.sampled_from(["=", "!="]), leaves)
    return st.recursive(
        st.one_of(leaves, cmps),
        lambda inner: st.one_of(
            st.builds(Not, inner),
            st.builds(lambda op, xs: BoolOp(op, tuple(xs)), st.sampled_from(["and", "or"]),
                      st.lists(inner, min_size=2, max_size=3)),
            st.builds(If, inner, inner, inner),
        ),
        max_leaves=8,
    )


@given(_exprs())
def test_unparse_round_trip(node):
    text = unparse(node, RANGES)
    assert parse_expression(text, RANGES) == node
