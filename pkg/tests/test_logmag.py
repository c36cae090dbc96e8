import math
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from pseudoshift.logmag import LogAccumulator, LogProduct, product

rationals = st.fractions(min_value=Fraction(-50), max_value=Fraction(50), max_denominator=30).filter(bool)


def test_empty_product_is_one():
    assert product([]).is_one
    assert product([]).log == 0 and product([]).phase == 1


@given(rationals, rationals)
def test_multiplication_is_exact(a, b):
    assert (LogProduct.of(a) * LogProduct.of(b)).to_fraction() == abs(a * b)
    assert (LogProduct.of(a) / LogProduct.of(b)).to_fraction() == abs(a / b)


@given(rationals, st.integers(-30, 30))
def test_integer_powers_are_exact(a, e):
    assert (LogProduct.of(a) ** e).to_fraction() == abs(a) ** e


@given(st.lists(rationals, max_size=20))
def test_inverse_cancels(values):
    p = product(LogProduct.of(v) for v in values)
    assert (p * p.inverse()).magnitude().is_one


def test_sign_is_tracked_as_phase():
    p = LogProduct.of(-2) * LogProduct.of(-3) * LogProduct.of(-1)
    assert p.to_complex() == -6


def test_overflow_free_magnitudes():
    big = LogProduct.of(2) ** 100_000
    assert big.log == 100_000 * math.log(2)
    assert (big * big.inverse()).is_one


def test_zero_annihilates():
    z = LogProduct.zero_value()
    assert (z * LogProduct.of(7)).is_zero
    assert z.log == -math.inf


def test_exact_threshold_ties():
    # 2^{-k/2} against 1/k: equal at k = 2, both sides of 1/3
    half = LogProduct.of(2) ** Fraction(-1, 2)
    assert not (half ** 2).less_than(Fraction(1, 4)) and not (half ** 2).less_than(Fraction(1, 2))
    assert (half ** 3).less_than(Fraction(1, 2))
    assert not (half ** 3).less_than(Fraction(1, 3))


def test_accumulator_matches_product():
    acc = LogAccumulator()
    for v in (2, Fraction(1, 3), 5):
        acc.mul(LogProduct.of(v))
    assert acc.freeze().to_fraction() == Fraction(10, 3)
