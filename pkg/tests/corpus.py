"""Seeded random generators shared by the property and acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction

from novistoke import linalg as la
from novistoke.barcodes import Barcode, GradedMorphism, Interval, pair_hom_dimension
from novistoke.complexes import CurveComplex, Kind, Summand
from novistoke.irregular import (
    IrregularMorphism,
    StokesLocalSystem,
    hom_global,
    refine_together,
)
from novistoke.novikov import FieldScalar
from novistoke.sectors import ZERO_FACTOR, factor, hom_permitted, standard_cover

POOL = (
    ZERO_FACTOR,
    factor({1: 1}),
    factor({1: -1}),
    factor({1: FieldScalar(0, 1)}),
    factor({2: 1}),
    factor({2: 1, 1: -1}),
)


def random_scalar(rng: random.Random, lo: int = -2, hi: int = 2) -> FieldScalar:
    return FieldScalar(rng.randint(lo, hi), rng.choice((0, 0, 0, rng.randint(lo, hi))))


def random_system(rng: random.Random, max_rank: int = 3, pool=POOL, shared_cover: bool = True) -> StokesLocalSystem:
    """Random Stokes local system: unipotent gluings with permitted entries.

    With ``shared_cover`` every system lives on the standard cover of the
    whole pool, so homs and kernels need no refinement.
    """
    r = rng.randint(1, max_rank)
    factors = [rng.choice(pool) for _ in range(r)]
    cover = standard_cover(pool) if shared_cover else standard_cover(factors + [ZERO_FACTOR])
    gluings = []
    for k in range(len(cover)):
        g = [list(row) for row in la.identity(r)]
        ov = cover.overlap(k)
        for _ in range(rng.randint(0, 2)):
            i, j = rng.randrange(r), rng.randrange(r)
            if i == j or not hom_permitted(factors[j], factors[i], ov):
                continue
            trial = [row[:] for row in g]
            trial[i][j] = trial[i][j] + random_scalar(rng)
            if la.is_invertible(la.matrix(trial)):
                g = trial
        gluings.append(la.matrix(g))
    return StokesLocalSystem(tuple(factors), cover, tuple(gluings))


def random_morphism(rng: random.Random, max_rank: int = 3, shared_cover: bool = True) -> IrregularMorphism:
    """Random combination of a basis of global morphisms between random systems."""
    while True:
        src = random_system(rng, max_rank, shared_cover=shared_cover)
        tgt = random_system(rng, max_rank, shared_cover=shared_cover)
        src, tgt = refine_together(src, tgt)
        h = hom_global(src, tgt)
        if h.dimension == 0 and rng.random() < 0.8:
            continue
        mats = []
        coeffs = [random_scalar(rng) for _ in h.basis]
        for k in range(len(src.cover)):
            acc = la.zeros(tgt.rank, src.rank)
            for c, b in zip(coeffs, h.basis):
                acc = la.add(acc, tuple(tuple(c * x for x in row) for row in b[k]))
            mats.append(acc)
        return IrregularMorphism(src, tgt, tuple(mats))


def random_barcode(rng: random.Random, max_len: int = 3) -> Barcode:
    out = []
    for _ in range(rng.randint(0, max_len)):
        birth = Fraction(rng.randint(-4, 4), rng.choice((1, 2)))
        if rng.random() < 0.4:
            out.append(Interval(birth, None))
        else:
            out.append(Interval(birth, Fraction(rng.randint(1, 4), rng.choice((1, 2)))))
    return Barcode(tuple(out))


def random_graded_morphism(rng: random.Random) -> GradedMorphism:
    src, tgt = random_barcode(rng), random_barcode(rng)
    degree = Fraction(rng.randint(-2, 2), rng.choice((1, 2)))
    rows = tuple(
        tuple(random_scalar(rng) if pair_hom_dimension(s, t, degree) else FieldScalar(0, 0) for s in src.intervals)
        for t in tgt.intervals
    )
    return GradedMorphism(src, tgt, degree, rows)


def random_complex(rng: random.Random, max_summands: int = 3) -> CurveComplex:
    out = []
    for _ in range(rng.randint(0, max_summands)):
        kind = rng.choice(list(Kind))
        d = rng.randint(-3, 2)
        payload = random_barcode(rng, 2) if kind is Kind.SKYSCRAPER else random_system(rng, 2)
        out.append(Summand(d, kind, payload))
    return CurveComplex(tuple(out))
