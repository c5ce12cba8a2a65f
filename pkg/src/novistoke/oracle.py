"""Brute-force numeric dominance oracle.

Samples Re(phi) at r * e^(2 pi i theta) on a grid of angles across the closed
arc and radii 10^-1 ... 10^-8, then classifies the growth of the maximum
over the arc. Independent of the exact sign logic in ``sectors``; used to
cross-check it.

Classification of m(r) = max_theta Re phi:

* ZERO if phi is identically zero;
* BOUNDED if |m(r)| <= BOUNDED_LIMIT at every radius;
* POS/NEG_DIVERGENT if |m(r_min)| >= DIVERGENT_LIMIT, the sign is constant
  over the three smallest radii and |d log|m| / d log(1/r)| >= SLOPE_MIN
  between the two smallest radii;
* otherwise ambiguous (returned as None).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .novikov import FieldScalar
from .sectors import PuiseuxFactor, SectorArc, Verdict

RADII = tuple(mpmath.mpf(10) ** (-k) for k in range(1, 9))
BOUNDED_LIMIT = 100
DIVERGENT_LIMIT = 10 ** 6
SLOPE_MIN = 0.5
DEFAULT_THETA_POINTS = 65


@dataclass(frozen=True)
class OracleResult:
    verdict: Verdict | None
    maxima: tuple[float, ...]
    slope: float | None

    @property
    def ambiguous(self) -> bool:
        return self.verdict is None


def _angular_parts(phi: PuiseuxFactor, theta) -> list:
    """Per term: (q, Re(c e^(-2 pi i q theta))), so Re phi = sum r^-q * part."""
    out = []
    for q, c in phi.terms:
        qq = mpmath.mpf(q.numerator) / q.denominator
        ang = -2 * mpmath.pi * qq * theta
        cr = mpmath.mpf(c.re.numerator) / c.re.denominator
        ci = mpmath.mpf(c.im.numerator) / c.im.denominator
        out.append((qq, cr * mpmath.cos(ang) - ci * mpmath.sin(ang)))
    return out


def _thetas(arc: SectorArc, points: int):
    s = mpmath.mpf(arc.start.numerator) / arc.start.denominator
    e = mpmath.mpf(arc.end.numerator) / arc.end.denominator
    if arc.is_ray:
        return [s]
    return [s + (e - s) * k / (points - 1) for k in range(points)]


def oracle_dominance(phi: PuiseuxFactor, arc: SectorArc, theta_points: int = DEFAULT_THETA_POINTS) -> OracleResult:
    if theta_points < 2:
        raise ValueError("theta grid needs at least two points")
    if phi.is_zero():
        return OracleResult(Verdict.ZERO, (), None)
    with mpmath.workdps(40):
        thetas = _thetas(arc, theta_points)
        parts = [_angular_parts(phi, t) for t in thetas]
        maxima = [max(sum(r ** (-q) * a for q, a in ps) for ps in parts) for r in RADII]
        as_float = tuple(float(m) for m in maxima)
        if all(abs(m) <= BOUNDED_LIMIT for m in maxima):
            return OracleResult(Verdict.BOUNDED, as_float, None)
        last = maxima[-3:]
        if abs(maxima[-1]) < DIVERGENT_LIMIT or any(m == 0 for m in last):
            return OracleResult(None, as_float, None)
        signs = {1 if m > 0 else -1 for m in last}
        if len(signs) != 1:
            return OracleResult(None, as_float, None)
        slope = float((mpmath.log(abs(maxima[-1])) - mpmath.log(abs(maxima[-2]))) / mpmath.log(10))
        if slope < SLOPE_MIN:
            return OracleResult(None, as_float, slope)
        verdict = Verdict.POS_DIVERGENT if signs == {1} else Verdict.NEG_DIVERGENT
        return OracleResult(verdict, as_float, slope)


_ORDERS = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3))


def random_factor(rng: random.Random, max_terms: int = 3) -> PuiseuxFactor:
    k = rng.randint(0, max_terms)
    orders = rng.sample(_ORDERS, k)
    terms = []
    for q in orders:
        re = rng.randint(-3, 3)
        im = rng.choice((0, 0, rng.randint(-3, 3)))
        terms.append((q, FieldScalar(re, im)))
    r = 1
    for q, _ in terms:
        if q.denominator == 2:
            r = 2
    return PuiseuxFactor(tuple(terms), r)


def random_arc(rng: random.Random) -> SectorArc:
    den = rng.choice((4, 8, 12, 16, 24))
    start = Fraction(rng.randint(0, den - 1), den)
    if rng.random() < 0.15:
        return SectorArc.ray(start)
    length = Fraction(rng.randint(1, den), den)
    return SectorArc(start, start + length)


def random_triple(rng: random.Random) -> tuple[PuiseuxFactor, PuiseuxFactor, SectorArc]:
    return random_factor(rng), random_factor(rng), random_arc(rng)


def hom_from_verdict(v: Verdict) -> int:
    return 0 if v is Verdict.POS_DIVERGENT else 1


__all__ = [
    "BOUNDED_LIMIT",
    "DIVERGENT_LIMIT",
    "OracleResult",
    "SLOPE_MIN",
    "hom_from_verdict",
    "oracle_dominance",
    "random_arc",
    "random_factor",
    "random_triple",
]
