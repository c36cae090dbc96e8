import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudoshift.gallery import build_unilateral_example
from pseudoshift.index_core import UNDEFINED, Integers, Naturals, ShiftMap
from pseudoshift.logmag import LogProduct
from pseudoshift.shift_ops import (
    PseudoShift,
    apply,
    backward_product,
    forward_product,
    power_apply,
    s_map,
)
from pseudoshift.spaces import FinVector, weighted_lp

Z = Integers()


def shift_on_z(w=2, step=1, space=None):
    space = space or weighted_lp(Z)
    rule = w if callable(w) else (lambda i: w)
    return PseudoShift(space, ShiftMap.translation(Z, step), rule)


def random_weight(seed):
    rng = random.Random(seed)
    table = {}

    def w(i):
        if i not in table:
            table[i] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3, 5]), rng.choice([1, 2, 3, 7]))
        return table[i]

    return w


def e(space, i, c=1):
    return FinVector.basis(space, i, c)


def test_apply_to_zero():
    assert apply(shift_on_z(), FinVector.zero(Z)).is_zero()


def test_apply_formula_on_integers():
    out = apply(shift_on_z(5), e(Z, 0))
    assert out.support == (-1,) and out.coefficient(-1).to_fraction() == 5


def test_unilateral_shift_kills_e0():
    T = build_unilateral_example().shifts[0]
    assert apply(T, e(Naturals(), 0)).is_zero()
    assert apply(T, e(Naturals(), 3)).support == (2,)


def test_empty_forward_product():
    p = forward_product(shift_on_z(), 4, 0)
    assert p.log == 0 and p.phase == 1


def test_constant_forward_product():
    assert forward_product(shift_on_z(2), 0, 3).to_fraction() == 8


def test_unilateral_forward_product():
    a = lambda j: Fraction(j + 1, j)
    T = build_unilateral_example(weights=(a, a), powers=(1, 2)).shifts[0]
    for i in range(4):
        expected = math.prod(a(v) for v in range(i + 1, i + 2 * 3 + 1))
        assert forward_product(T, i, 2 * 3).to_fraction() == expected


def test_backward_falls_off_naturals():
    T = PseudoShift(weighted_lp(Naturals()), ShiftMap.translation(Naturals(), 1), lambda i: 2)
    prod, landing = backward_product(T, 1, 3)
    assert prod.is_zero and landing is UNDEFINED


def test_backward_on_integers():
    prod, landing = backward_product(shift_on_z(2), 0, 4)
    assert landing == -4 and prod.to_fraction() == 16


@given(st.integers(0, 30), st.integers(1, 40))
def test_backward_annihilation_persists(i, n):
    T = PseudoShift(weighted_lp(Naturals()), ShiftMap.translation(Naturals(), 1), lambda i: 3)
    prod, landing = backward_product(T, i, n)
    if n > i:
        assert landing is UNDEFINED and prod.log == -math.inf
    else:
        assert landing == i - n and prod.to_fraction() == 3 ** n


@settings(max_examples=60)
@given(st.integers(0, 10_000), st.integers(0, 10), st.integers(0, 10),
       st.lists(st.tuples(st.integers(-25, 25), st.integers(-9, 9)), max_size=6))
def test_power_apply_composes(seed, m, n, terms):
    T = shift_on_z(random_weight(seed))
    x = FinVector(Z, terms)
    assert power_apply(T, x, m + n) == power_apply(T, power_apply(T, x, m), n)


@given(st.integers(0, 10_000), st.lists(st.tuples(st.integers(-25, 25), st.integers(-9, 9)), max_size=6))
def test_power_apply_is_iterated_apply(seed, terms):
    T = shift_on_z(random_weight(seed))
    x = FinVector(Z, terms)
    y = x
    for _ in range(5):
        y = apply(T, y)
    assert power_apply(T, x, 5) == y
    assert power_apply(T, x, 1) == apply(T, x)
    assert power_apply(T, x, 0) == x


@given(st.integers(0, 10_000), st.integers(-25, 25), st.integers(0, 20), st.integers(0, 20))
def test_forward_product_splits(seed, i, m, n):
    T = shift_on_z(random_weight(seed), step=-2)
    _, mid = T.forward(i, m)
    assert forward_product(T, i, m + n) == forward_product(T, i, m) * forward_product(T, mid, n)


@given(st.integers(0, 10_000), st.integers(-25, 25), st.integers(1, 4), st.integers(1, 6))
def test_s_map_is_right_inverse(seed, i, r, n):
    T = shift_on_z(random_weight(seed))
    assert power_apply(T, s_map(T, r, n, i), r * n) == e(Z, i)


def test_s_map_constant_weight():
    x = s_map(shift_on_z(2), 1, 3, 0)
    assert x.support == (3,) and x.coefficient(3).to_fraction() == Fraction(1, 8)


def test_s_map_overflowing_magnitude():
    x = s_map(shift_on_z(2), 1, 10_000, 0)
    assert x.coefficient(10_000).log == pytest.approx(-10_000 * math.log(2), rel=1e-15)


@given(st.integers(0, 10_000), st.lists(st.tuples(st.integers(-25, 25), st.integers(-9, 9)), max_size=6))
def test_apply_matches_coordinate_formula(seed, terms):
    w = random_weight(seed)
    T = shift_on_z(w, step=3)
    x = FinVector(Z, terms)
    y = apply(T, x)
    for i in range(-35, 35):
        expected = LogProduct.of(w(i)) * x.coefficient(i + 3)
        got = y.coefficient(i)
        assert got.is_zero == expected.is_zero
        if not got.is_zero:
            assert got == expected


def test_zero_weight_is_rejected():
    T = shift_on_z(0)
    with pytest.raises(Exception):
        apply(T, e(Z, 0))


def test_boundedness_sample():
    T = shift_on_z(lambda i: 1 + abs(i) % 3)
    assert T.boundedness(30) == 3.0
