from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from novistoke.certified import (
    ENV_VAR,
    START_PRECISION,
    Angle,
    compare,
    compare_rational,
    exact_arg_turn,
    floor_angle,
    max_precision,
    reduce_mod1,
    reset_max_precision,
    set_max_precision,
)
from novistoke.errors import UndecidableSign
from novistoke.novikov import FieldScalar

small = st.integers(-9, 9)
gaussian = st.builds(FieldScalar, small, small).filter(lambda w: not w.is_zero())


def _turns(a: Angle) -> mpmath.mpf:
    with mpmath.workdps(60):
        w = mpmath.mpc(mpmath.mpf(a.w.re.numerator) / a.w.re.denominator, mpmath.mpf(a.w.im.numerator) / a.w.im.denominator)
        return mpmath.mpf(a.rho.numerator) / a.rho.denominator + mpmath.mpf(a.kappa.numerator) / a.kappa.denominator * mpmath.arg(w) / (2 * mpmath.pi)


def test_exact_fast_path():
    assert exact_arg_turn(FieldScalar(2, 0)) == 0
    assert exact_arg_turn(FieldScalar(-1, 0)) == Fraction(1, 2)
    assert exact_arg_turn(FieldScalar(0, -3)) == Fraction(-1, 4)
    assert exact_arg_turn(FieldScalar(-2, 2)) == Fraction(3, 8)
    assert exact_arg_turn(FieldScalar(1, 2)) is None
    assert Angle.arg(FieldScalar(1, 1)).exact == Fraction(1, 8)
    assert Angle.arg(FieldScalar(1, 2)).exact is None


def test_irrational_angle_never_equals_rational():
    a = Angle.arg(FieldScalar(3, 4))
    assert compare_rational(a, Fraction(1, 7)) == 1
    assert compare_rational(a, Fraction(3, 20)) == -1


def test_exact_equality_of_irrational_angles():
    a = Angle.arg(FieldScalar(1, 2))
    # arg((1+2i)^2) = 2 arg(1+2i), both irrational
    b = Angle.arg(FieldScalar(-3, 4)).scaled(Fraction(1, 2))
    assert compare(a, b) == 0
    assert compare(a, a + Fraction(1, 1000)) == -1


def test_precision_cap_raises_undecidable():
    a = Angle.arg(FieldScalar(1, 3))
    lo, _ = a.enclosure(START_PRECISION)
    token = set_max_precision(16)
    try:
        with pytest.raises(UndecidableSign) as info:
            compare_rational(a, lo)
        assert info.value.code == "UNDECIDABLE_SIGN"
    finally:
        reset_max_precision(token)
    assert compare_rational(a, lo) == 1


def test_env_var_sets_cap(monkeypatch):
    monkeypatch.setenv(ENV_VAR, "96")
    assert max_precision() == 96
    token = set_max_precision(200)
    try:
        assert max_precision() == 200
    finally:
        reset_max_precision(token)


@given(gaussian, st.fractions(min_value=-2, max_value=2, max_denominator=12), st.fractions(min_value=-1, max_value=1, max_denominator=12))
def test_compare_rational_matches_high_precision(w, kappa, x):
    a = Angle(Fraction(0), kappa, w)
    ref = _turns(a)
    with mpmath.workdps(60):
        diff = ref - mpmath.mpf(x.numerator) / x.denominator
    if abs(diff) < mpmath.mpf(10) ** -40:
        assert compare_rational(a, x) == 0
    else:
        assert compare_rational(a, x) == (1 if diff > 0 else -1)


@given(gaussian, gaussian)
def test_compare_matches_high_precision(w1, w2):
    a, b = Angle.arg(w1), Angle.arg(w2).scaled(Fraction(1, 2))
    d = _turns(a) - _turns(b)
    expected = 0 if abs(d) < mpmath.mpf(10) ** -40 else (1 if d > 0 else -1)
    assert compare(a, b) == expected
    assert compare(b, a) == -expected


@given(gaussian, st.fractions(min_value=-3, max_value=3, max_denominator=8))
def test_reduce_mod1_lands_in_unit_interval(w, rho):
    a = reduce_mod1(Angle(rho, Fraction(1), w))
    assert compare_rational(a, 0) >= 0
    assert compare_rational(a, 1) < 0
    fl, is_int = floor_angle(Angle(rho, Fraction(1), w))
    assert isinstance(fl, int)
    if Angle(rho, Fraction(1), w).exact is None:
        assert not is_int
