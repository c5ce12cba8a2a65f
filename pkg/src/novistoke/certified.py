"""Certified angle arithmetic.

An ``Angle`` is the exact real number rho + kappa * arg(w) / 2pi with rho,
kappa rational and w a nonzero Gaussian rational. arg(w)/2pi is rational
exactly when w lies on an axis or a diagonal; then the angle is stored as
a plain rational. Otherwise it is irrational, so it never equals a rational
and sign questions terminate under interval refinement. Interval bounds
come from mpmath's interval context at escalating precision; a hard cap
turns non-termination into UndecidableSign.
"""

from __future__ import annotations

import contextvars
import math
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import iv, libmp

from .errors import UndecidableSign
from .novikov import ONE, FieldScalar, Rational, as_fraction

DEFAULT_MAX_PRECISION = 2048
START_PRECISION = 64
ENV_VAR = "NOVISTOKE_MAX_PRECISION"

_cap_override: contextvars.ContextVar[int | None] = contextvars.ContextVar("novistoke_max_precision", default=None)
_iv_lock = threading.Lock()


def max_precision() -> int:
    override = _cap_override.get()
    if override is not None:
        return override
    env = os.environ.get(ENV_VAR)
    if env:
        try:
            return max(8, int(env))
        except ValueError:
            pass
    return DEFAULT_MAX_PRECISION


def set_max_precision(bits: int | None) -> contextvars.Token:
    """Override the precision cap for the current context (None clears it)."""
    return _cap_override.set(bits)


def reset_max_precision(token: contextvars.Token) -> None:
    _cap_override.reset(token)


def _precisions():
    cap = max_precision()
    p = min(START_PRECISION, cap)
    while True:
        yield p
        if p >= cap:
            return
        p = min(2 * p, cap)


def exact_arg_turn(w: FieldScalar) -> Fraction | None:
    """arg(w)/2pi in (-1/2, 1/2] when it is rational, else None."""
    re, im = w.re, w.im
    if re == 0 and im == 0:
        raise ValueError("argument of zero")
    if im == 0:
        return Fraction(0) if re > 0 else Fraction(1, 2)
    if re == 0:
        return Fraction(1, 4) if im > 0 else Fraction(-1, 4)
    if abs(re) == abs(im):
        if re > 0:
            return Fraction(1, 8) if im > 0 else Fraction(-1, 8)
        return Fraction(3, 8) if im > 0 else Fraction(-3, 8)
    return None


def _iv_rational(x: Fraction):
    return iv.mpf(x.numerator) / iv.mpf(x.denominator)


def _to_fraction(mpf_tuple) -> Fraction:
    p, q = libmp.to_rational(mpf_tuple)
    return Fraction(int(p), int(q))


@lru_cache(maxsize=65536)
def _arg_enclosure(w: FieldScalar, prec: int) -> tuple[Fraction, Fraction]:
    with _iv_lock:
        old = iv.prec
        iv.prec = prec
        try:
            x = iv.atan2(_iv_rational(w.im), _iv_rational(w.re)) / (2 * iv.pi)
            a, b = x._mpi_
        finally:
            iv.prec = old
    return _to_fraction(a), _to_fraction(b)


@dataclass(frozen=True, slots=True)
class Angle:
    """rho + kappa * arg(w)/2pi, in turns."""

    rho: Fraction
    kappa: Fraction = Fraction(0)
    w: FieldScalar = ONE

    def __post_init__(self) -> None:
        rho = as_fraction(self.rho)
        kappa = as_fraction(self.kappa)
        w = self.w
        if kappa != 0:
            ex = exact_arg_turn(w)
            if ex is not None:
                rho, kappa, w = rho + kappa * ex, Fraction(0), ONE
        if kappa == 0:
            w = ONE
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "w", w)

    @staticmethod
    def rational(x: Rational) -> "Angle":
        return Angle(as_fraction(x))

    @staticmethod
    def arg(w: FieldScalar) -> "Angle":
        return Angle(Fraction(0), Fraction(1), w)

    @property
    def exact(self) -> Fraction | None:
        return self.rho if self.kappa == 0 else None

    def __add__(self, x: Rational) -> "Angle":
        return Angle(self.rho + as_fraction(x), self.kappa, self.w)

    def __sub__(self, x: Rational) -> "Angle":
        return Angle(self.rho - as_fraction(x), self.kappa, self.w)

    def scaled(self, c: Rational) -> "Angle":
        c = as_fraction(c)
        return Angle(self.rho * c, self.kappa * c, self.w)

    def enclosure(self, prec: int) -> tuple[Fraction, Fraction]:
        if self.kappa == 0:
            return self.rho, self.rho
        lo, hi = _arg_enclosure(self.w, prec)
        a, b = self.rho + self.kappa * lo, self.rho + self.kappa * hi
        return (a, b) if a <= b else (b, a)

    def approx(self) -> float:
        lo, hi = self.enclosure(START_PRECISION)
        return float((lo + hi) / 2)

    def __str__(self) -> str:
        if self.kappa == 0:
            return str(self.rho)
        return f"{self.rho} + {self.kappa}*arg({self.w})/2pi"


def compare_rational(a: Angle, x: Rational) -> int:
    """Sign of a - x, certified."""
    x = as_fraction(x)
    if a.kappa == 0:
        return (a.rho > x) - (a.rho < x)
    for prec in _precisions():
        lo, hi = a.enclosure(prec)
        if lo > x:
            return 1
        if hi < x:
            return -1
    raise UndecidableSign(f"cannot separate {a} from {x} within {max_precision()} bits")


def floor_angle(a: Angle, scale: Rational = 1) -> tuple[int, bool]:
    """(floor(scale*a), is_integer) certified."""
    s = as_fraction(scale)
    v = a.scaled(s)
    if v.kappa == 0:
        f = math.floor(v.rho)
        return f, v.rho == f
    for prec in _precisions():
        lo, hi = v.enclosure(prec)
        fl, fh = math.floor(lo), math.floor(hi)
        if fl == fh and lo != fl:
            return fl, False
    raise UndecidableSign(f"cannot locate {v} between integers within {max_precision()} bits")


def _exactly_equal(a: Angle, b: Angle) -> bool:
    """Exact equality test for two angles with irrational parts.

    With v the common denominator of the kappas and u = kappa*v, equality
    forces u_a arg(w_a) - u_b arg(w_b) = -v (rho_a - rho_b), so
    W = w_a^u_a * w_b^-u_b must have a rational argument matching that value
    mod 1; then a - b lies in (1/v)Z and a coarse enclosure decides it.
    """
    if a == b:
        return True
    v = math.lcm(a.kappa.denominator, b.kappa.denominator)
    ua = int(a.kappa * v)
    ub = int(b.kappa * v)
    big = a.w ** ua * b.w ** (-ub)
    ex = exact_arg_turn(big)
    if ex is None:
        return False
    target = ex + v * (a.rho - b.rho)
    if target.denominator != 1:
        return False
    for prec in _precisions():
        la, ha = a.enclosure(prec)
        lb, hb = b.enclosure(prec)
        lo, hi = la - hb, ha - lb
        if hi - lo < Fraction(1, 2 * v):
            return lo <= 0 <= hi
    raise UndecidableSign("cannot decide angle equality within precision cap")


def compare(a: Angle, b: Angle) -> int:
    """Certified three-way comparison of two angles."""
    if a.kappa == 0 and b.kappa == 0:
        return (a.rho > b.rho) - (a.rho < b.rho)
    if a.kappa == 0:
        return -compare_rational(b, a.rho)
    if b.kappa == 0:
        return compare_rational(a, b.rho)
    if _exactly_equal(a, b):
        return 0
    for prec in _precisions():
        la, ha = a.enclosure(prec)
        lb, hb = b.enclosure(prec)
        if la > hb:
            return 1
        if ha < lb:
            return -1
    raise UndecidableSign(f"cannot order {a} and {b} within {max_precision()} bits")


def reduce_mod1(a: Angle) -> Angle:
    fl, _ = floor_angle(a)
    return a - fl


def rational_between(a: Angle, b: Angle, t: Fraction) -> Fraction:
    """A rational point strictly between a < b at roughly relative position t.

    Uses enclosures narrow enough to be disjoint, then interpolates
    between the inner enclosure endpoints.
    """
    for prec in _precisions():
        la, ha = a.enclosure(prec)
        lb, hb = b.enclosure(prec)
        if ha < lb:
            x = ha + (lb - ha) * t
            return _simplify_between(x, ha, lb)
    raise UndecidableSign("cannot separate angles within precision cap")


def _simplify_between(x: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    """Pick a short rational near x strictly inside (lo, hi)."""
    width = hi - lo
    for den in (8, 10, 12, 16, 20, 24, 40, 48, 60, 80, 120, 240, 480, 960):
        cand = Fraction(round(x * den), den)
        if lo < cand < hi and abs(cand - x) <= width / 4:
            return cand
    cand = x.limit_denominator(max(10, int(8 / width) + 1))
    if lo < cand < hi:
        return cand
    return x
