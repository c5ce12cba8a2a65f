from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from novistoke.novikov import I, ONE, ZERO, FieldScalar, NovikovScalar, reduce_at_T_equals_1, valuation

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=12)
scalars = st.builds(FieldScalar, rationals, rationals)
exponents = st.fractions(min_value=0, max_value=10, max_denominator=6)
novikov = st.lists(st.tuples(exponents, scalars), max_size=4).map(NovikovScalar)


def test_gaussian_arithmetic():
    z = FieldScalar(1, 2)
    assert z * z.conjugate() == FieldScalar(5, 0)
    assert z * z.inverse() == ONE
    assert I * I == FieldScalar(-1, 0)
    assert z - z == ZERO
    assert z / 2 == FieldScalar(Fraction(1, 2), 1)
    assert z ** -2 * z ** 2 == ONE


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        FieldScalar(0.5, 0)


def test_scalar_equality_with_rationals():
    assert FieldScalar(3, 0) == 3
    assert FieldScalar(3, 1) != 3
    assert hash(FieldScalar(Fraction(1, 2), 0)) == hash(FieldScalar(Fraction(2, 4), 0))


def test_str_forms():
    assert str(FieldScalar(1, 0)) == "1"
    assert str(FieldScalar(0, -2)) == "-2i"
    assert str(FieldScalar(1, -2)) == "1-2i"


def test_novikov_normal_form():
    a = NovikovScalar(((1, 2), (0, 1), (1, -2)))
    assert a.terms == ((Fraction(0), ONE),)
    with pytest.raises(ValueError):
        NovikovScalar(((-1, 1),))


def test_valuation_and_reduction():
    a = NovikovScalar(((Fraction(1, 2), 3), (2, FieldScalar(0, 1))))
    assert valuation(a) == Fraction(1, 2)
    assert reduce_at_T_equals_1(a) == FieldScalar(3, 1)
    assert valuation(NovikovScalar()) == float("inf")


@given(novikov, novikov, novikov)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == NovikovScalar()


@given(novikov, novikov)
def test_valuation_is_additive(a, b):
    if a.is_zero() or b.is_zero():
        assert (a * b).is_zero()
    else:
        assert valuation(a * b) == valuation(a) + valuation(b)


@given(scalars, scalars)
def test_field_axioms(x, y):
    assert x * y == y * x
    if not x.is_zero():
        assert x * x.inverse() == ONE
        assert (y / x) * x == y
