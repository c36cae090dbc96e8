from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pseudoshift import dsl
from pseudoshift.errors import NonmonotoneFamilyError, ParseError, ValidationError
from pseudoshift.gallery import block_of, example_4_3_entry

C_TEXT = "family s>=0: range(2^(2*s+1) - (2*s+1), 2^(2*s+1) - 1)"
D_TEXT = "family s>=0: range(2^(2*s+1), 2^(2*s+1) + 2*s)"
P_TEXT = "family s>=0: range(2^(2*s+1), 2^(2*s+1))"


def test_family_membership():
    C = dsl.parse_set_expr(C_TEXT)
    assert C.contains(7) and not C.contains(8)
    assert [n for n in range(40) if n in C] == [1, 5, 6, 7, 27, 28, 29, 30, 31]


def test_explicit_list():
    E = dsl.parse_set_expr("list(-2, -8, -32)")
    assert E.contains(-8) and not E.contains(-4)


def test_singleton_range():
    S = dsl.parse_set_expr("range(0, 0)")
    assert S.contains(0) and not S.contains(1)


def test_decreasing_family_is_rejected():
    with pytest.raises(NonmonotoneFamilyError) as err:
        dsl.parse_set_expr("family s>=0: range(10 - s, 20 - s)")
    assert err.value.code == "NONMONOTONE-FAMILY" and err.value.col == 14


@pytest.mark.parametrize("text,col", [("k <= ", 6), ("n in range(1, 2", 16), ("1 + * 2", 5), ("n in", 5)])
def test_parse_errors_have_columns(text, col):
    with pytest.raises(ParseError) as err:
        dsl.parse_predicate(text)
    assert err.value.col == col


def test_precedence():
    f = lambda t: dsl.compile_expr(dsl.parse_expr(t))({})
    assert f("2 + 3 * 4") == 14
    assert f("2^3^2") == 512
    assert f("-2^2") == -4
    assert f("(1 + 2) * 3 - 4 / 8") == Fraction(17, 2)
    assert f("abs(3 - 10)") == 7


def test_chained_comparison_and_conjunction():
    pred = dsl.compile_predicate(dsl.parse_predicate("0 <= k <= n AND n in D"),
                                 {"D": dsl.parse_set_expr(D_TEXT)}, {})
    assert pred({"k": 3, "n": 9}) and not pred({"k": 10, "n": 9}) and not pred({"k": 0, "n": 11})


def test_unknown_variable():
    with pytest.raises(ValidationError):
        dsl.compile_expr(dsl.parse_expr("q + 1"))({})


RULES = [
    dsl.WeightRule(dsl.parse_predicate("n in C AND k <= n"), dsl.parse_expr("1/2")),
    dsl.WeightRule(dsl.parse_predicate("n in D AND k <= n"), dsl.parse_expr("2")),
    dsl.WeightRule(dsl.parse_predicate("-n in P AND k <= -n"), dsl.parse_expr("2")),
    dsl.WeightRule(None, dsl.parse_expr("1")),
]


def test_rule_set_reproduces_example_weights():
    sets = {}
    for name, text in (("C", C_TEXT), ("D", D_TEXT), ("P", P_TEXT)):
        sets[name] = dsl.parse_set_expr(text, sets)
    rules = dsl.WeightRuleSet(RULES, ("k", "n"), sets)
    for k in range(6):
        for n in range(-140, 140):
            assert rules(k, n).to_fraction() == Fraction(example_4_3_entry(k, n)), (k, n)
    assert block_of(7) == ("C", 1)


def test_default_rule_is_mandatory_and_last():
    with pytest.raises(ValidationError):
        dsl.WeightRuleSet(RULES[:-1], ("k", "n"))
    with pytest.raises(ValidationError):
        dsl.WeightRuleSet([RULES[-1]] + RULES, ("k", "n"))


def test_first_match_wins():
    rules = dsl.WeightRuleSet([
        dsl.WeightRule(dsl.parse_predicate("i >= 0"), dsl.parse_expr("3")),
        dsl.WeightRule(dsl.parse_predicate("i >= 5"), dsl.parse_expr("7")),
        dsl.WeightRule(None, dsl.parse_expr("1")),
    ], ("i",))
    assert rules(6).to_fraction() == 3 and rules(-1).to_fraction() == 1


def test_symbolic_powers_stay_exact():
    v = dsl.compile_value(dsl.parse_expr("2^(-v)"))({"v": 5000})
    assert v.to_fraction(max_bits=10_000) == Fraction(1, 2 ** 5000)


names = st.sampled_from(["k", "n", "s"])
leaves = st.one_of(st.integers(0, 40).map(str), names)


def exprs():
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.tuples(inner, st.sampled_from(["+", "-", "*"]), inner).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
            inner.map(lambda e: f"-{e}"),
            inner.map(lambda e: f"abs({e})"),
            st.tuples(inner, st.integers(0, 3)).map(lambda t: f"{t[0]} ^ {t[1]}"),
        ),
        max_leaves=8,
    )


@given(exprs(), st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5))
def test_print_round_trip(text, k, n, s):
    node = dsl.parse_expr(text)
    printed = dsl.to_text(node)
    again = dsl.parse_expr(printed)
    assert dsl.to_text(again) == printed
    env = {"k": k, "n": n, "s": s}
    assert dsl.compile_expr(again)(env) == dsl.compile_expr(node)(env)


def test_predicate_printing():
    text = "n in C and k <= n and -n not in D | list(1, 2)"
    printed = dsl.to_text(dsl.parse_predicate(text))
    assert printed == "n in C AND k <= n AND -n not in D | list(1, 2)"
