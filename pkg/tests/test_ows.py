import json
import math
import pathlib
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudoshift.gallery import (
    build_example_4_3,
    example_4_3_basis_windows,
    example_4_3_entry,
    example_4_3_grid_windows,
    example_4_3_schedule,
)
from pseudoshift.criteria import Schedule
from pseudoshift.index_core import Grid
from pseudoshift.ows import (
    DiagonalWeightFamily,
    OwsOperator,
    OwsProblem,
    check_ows_dsc,
    check_ows_powers_dsc,
    ows_apply,
    ows_to_pseudoshift,
)
from pseudoshift.report import FAIL, PASS
from pseudoshift.shift_ops import power_apply
from pseudoshift.spaces import FinVector

FIXTURE = json.loads((pathlib.Path(__file__).parent / "fixtures" / "example_4_3.json").read_text())
G = Grid()


def const(c):
    return OwsOperator(DiagonalWeightFamily(lambda k, n: c))


def random_family(seed):
    rng = random.Random(seed)
    table = {}

    def a(k, n):
        if (k, n) not in table:
            table[(k, n)] = Fraction(rng.choice([1, 2, 3, 5]), rng.choice([1, 2, 3, 4]))
        return table[(k, n)]

    return DiagonalWeightFamily(a)


finite_vectors = st.lists(
    st.tuples(st.tuples(st.integers(0, 5), st.integers(-20, 20)), st.integers(-9, 9)), max_size=6)


def test_forward_one_step():
    a = random_family(1)
    y = ows_apply(OwsOperator(a), FinVector.basis(G, (2, 0)))
    assert y.support == ((2, 1),) and y.coefficient((2, 1)) == a(2, 0)


def test_backward_one_step():
    a = random_family(2)
    y = ows_apply(OwsOperator(a, "backward"), FinVector.basis(G, (2, 0)))
    assert y.support == ((2, -1),) and y.coefficient((2, -1)) == a(2, 0)


@given(finite_vectors, st.integers(1, 10))
def test_identity_weights_translate(terms, n):
    x = FinVector(G, terms)
    y = ows_apply(const(1), x, n)
    assert y == FinVector(G, [((k, j + n), c) for (k, j), c in x])


@settings(max_examples=50)
@given(st.integers(0, 10_000), finite_vectors, st.integers(1, 10), st.sampled_from(["forward", "backward"]))
def test_n_steps_equal_iterated_single_steps(seed, terms, n, direction):
    T = OwsOperator(random_family(seed), direction)
    x = FinVector(G, terms)
    y = x
    for _ in range(n):
        y = ows_apply(T, y, 1)
    assert ows_apply(T, x, n) == y


@settings(max_examples=50)
@given(st.integers(0, 10_000), finite_vectors, st.integers(1, 10))
def test_conjugacy_with_pseudoshift(seed, terms, n):
    T = OwsOperator(random_family(seed))
    x = FinVector(G, terms)
    assert power_apply(ows_to_pseudoshift(T), x, n) == ows_apply(T, x, n)


def test_identity_weights_identification():
    S = ows_to_pseudoshift(const(1))
    assert S.map((3, 4)) == (3, 3)
    assert all(S.weight(ij).is_one for ij in G.window(20))


def test_example_weight_at_origin():
    S = ows_to_pseudoshift(build_example_4_3().operators[0])
    assert S.weight((0, 0)).to_fraction() == 1


def test_spot_values():
    spot = FIXTURE["spot"]
    assert str(Fraction(example_4_3_entry(0, 7))) == spot["a(0,7)"] == "1/2"
    assert str(Fraction(example_4_3_entry(0, 8))) == spot["a(0,8)"]
    assert str(Fraction(example_4_3_entry(3, -8))) == spot["a(3,-8)"]
    assert str(Fraction(example_4_3_entry(9, -8))) == spot["a(9,-8)"]


def test_entries_are_bounded():
    a = build_example_4_3().operators[0].weights
    for k in range(8):
        for n in range(-600, 600):
            assert Fraction(1, 2) <= a(k, n).to_fraction() <= 2


def test_norm_identities():
    a = build_example_4_3().operators[0].weights
    ks = range(10)
    for n in (5, 8, -8, 100):
        assert a.norm(n, ks) == max((a(k, n) for k in ks), key=lambda v: v.log)
        assert a.inverse_norm(n, ks) == max((a(k, n).inverse() for k in ks), key=lambda v: v.log)


@pytest.mark.parametrize("row", FIXTURE["basis_products"], ids=lambda r: f"k={r['k']}")
def test_basis_products_match_oracle(row):
    a = build_example_4_3().operators[0].weights
    n = row["n"]
    assert a.range_product(0, -n, -1).inverse().to_fraction() == Fraction(row["neg_inverse"])
    assert a.range_product(0, 1, n).to_fraction() == Fraction(row["pos"])
    assert a.range_product(0, 1, 2 * n).to_fraction() == Fraction(row["pos_double"])


def test_example_4_3_dsc_passes_and_matches_generic():
    report = check_ows_dsc(build_example_4_3(), example_4_3_schedule(), example_4_3_grid_windows())
    assert report.verdict == PASS
    assert report.extra["cross_check"]["max_log_discrepancy"] <= 1e-10


@pytest.mark.parametrize("row", FIXTURE["dsc_maxima"], ids=lambda r: f"k={r['k']}")
def test_dsc_maxima_match_oracle(row):
    report = check_ows_dsc(build_example_4_3(), example_4_3_schedule(), example_4_3_grid_windows(),
                           cross_check=False)
    k = row["k"]
    for cond, expected in row.items():
        if cond == "k" or not cond.startswith("(H1), ") and not cond.startswith("(H2)"):
            continue
        values = [e.value for e in report.grid(cond) if e.k == k]
        best = max(values, key=lambda v: v.log)
        assert best.to_fraction() == Fraction(expected), cond


def test_example_4_3_powers_pass():
    report = check_ows_powers_dsc(build_example_4_3().operators[0], 2, example_4_3_schedule(),
                                  example_4_3_basis_windows())
    assert report.verdict == PASS
    assert report.preconditions["sup_inverse_norm_negative"] == 1.0


def test_identity_weights_fail():
    report = check_ows_dsc(OwsProblem([const(1), const(1)], (1, 2)), Schedule((1, 2, 3, 4)))
    assert report.verdict == FAIL
    assert all(e.value.is_one for e in report.grid())


def test_doubling_weights_diverge():
    report = check_ows_dsc(OwsProblem([const(2), const(2)], (1, 2)), Schedule((1, 2, 3, 4)))
    assert report.verdict == FAIL
    fam = report.family("(H2)(i), s=1, l=2")
    assert fam.status == FAIL and fam.trend == "divergent"
    for e in fam.entries:
        assert e.value.log == pytest.approx((2 - 1) * report.schedule.n(e.k) * math.log(2), abs=1e-12)


def test_powers_need_two_operators():
    with pytest.raises(Exception):
        check_ows_powers_dsc(const(2), 1, Schedule((1, 2)))
