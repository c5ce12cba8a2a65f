import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from novistoke.certified import Angle
from novistoke.errors import IdenticalFactors, InvalidObject
from novistoke.novikov import FieldScalar
from novistoke.oracle import oracle_dominance, random_arc, random_factor
from novistoke.sectors import (
    ZERO_FACTOR,
    SectorArc,
    SectorCover,
    Verdict,
    chain_cover,
    common_refinement,
    cover_is_sound,
    dominance,
    factor,
    hom_permitted,
    pullback_factor,
    same_class,
    standard_cover,
    stokes_directions,
)

F = Fraction
INV_Z = factor({1: 1})
INV_Z2 = factor({2: 1})

seeds = st.integers(0, 2**32 - 1)


def exact(angles):
    return [a.exact for a in angles]


def test_dominance_examples():
    # Re(1/z) -> -inf on every closed subarc of the left half plane; on the
    # closed half plane itself the sup is attained on the boundary rays, where it is 0
    assert dominance(INV_Z, SectorArc(F(1, 4) + F(1, 1000), F(3, 4) - F(1, 1000))) is Verdict.NEG_DIVERGENT
    assert dominance(INV_Z, SectorArc(F(1, 4), F(3, 4))) is Verdict.BOUNDED
    assert dominance(INV_Z, SectorArc(F(-1, 8), F(1, 8))) is Verdict.POS_DIVERGENT
    assert dominance(ZERO_FACTOR, SectorArc(F(0), F(1, 3))) is Verdict.ZERO


def test_dominance_examples_agree_with_sampling():
    for phi, arc in [(INV_Z, SectorArc(F(1, 4), F(3, 4))), (INV_Z, SectorArc(F(3, 10), F(7, 10))), (INV_Z, SectorArc(F(-1, 8), F(1, 8)))]:
        assert oracle_dominance(phi, arc).verdict is dominance(phi, arc)


def test_boundary_ray_recurses_to_next_order():
    # on the ray theta = 1/4, Re(1/z) vanishes and the next term decides
    arc = SectorArc.ray(F(1, 4))
    assert dominance(INV_Z, arc) is Verdict.BOUNDED
    assert dominance(factor({1: 1, F(1, 2): 1}), SectorArc.ray(F(0))) is Verdict.POS_DIVERGENT
    # closed arc touching the vanishing ray is bounded, not negative
    assert dominance(INV_Z, SectorArc(F(1, 4), F(1, 2))) is Verdict.BOUNDED


def test_stokes_direction_examples():
    assert exact(stokes_directions(INV_Z, ZERO_FACTOR)) == [F(1, 4), F(3, 4)]
    assert exact(stokes_directions(INV_Z2, ZERO_FACTOR)) == [F(1, 8), F(3, 8), F(5, 8), F(7, 8)]
    with pytest.raises(IdenticalFactors):
        stokes_directions(INV_Z, factor({1: 1}))


def test_irrational_stokes_directions_are_symbolic():
    dirs = stokes_directions(factor({1: FieldScalar(1, 2)}), ZERO_FACTOR)
    assert len(dirs) == 2
    assert all(d.exact is None for d in dirs)
    assert abs(dirs[1].approx() - dirs[0].approx() - 0.5) < 1e-12


def test_standard_cover_examples():
    cov = standard_cover([INV_Z, ZERO_FACTOR])
    assert len(cov) == 4
    dirs = [F(1, 4), F(3, 4)]
    for arc in cov.arcs:
        inside = [d for d in dirs for s in (0, 1) if arc.start < d + s < arc.end]
        assert len(inside) <= 1
    assert cover_is_sound(cov, [INV_Z, ZERO_FACTOR])

    trivial = standard_cover([ZERO_FACTOR])
    assert len(trivial) == 2

    both = standard_cover([INV_Z, INV_Z2])
    assert cover_is_sound(both, [INV_Z, INV_Z2])
    pts = {F(1, 8), F(3, 8), F(5, 8), F(7, 8)} | {d.exact for d in stokes_directions(INV_Z2, INV_Z)}
    for d in pts:
        assert sum(1 for arc in both.arcs for s in (0, 1) if arc.start < d + s < arc.end) >= 1


def test_pullback_examples():
    half = factor({F(1, 2): 1})
    assert half.ramification == 2
    up = pullback_factor(half, 2)
    assert up == INV_Z and up.ramification == 1
    assert pullback_factor(INV_Z, 3) == factor({3: 1})
    assert pullback_factor(ZERO_FACTOR, 5).is_zero()


def test_bounded_terms_are_stripped():
    assert same_class(factor({1: 1, 0: 7, -2: 3}), INV_Z)
    assert factor({1: 0}).is_zero()
    with pytest.raises(InvalidObject):
        factor({F(1, 3): 1}, ramification=2)


def test_cover_rejects_triple_overlap_and_gaps():
    with pytest.raises(InvalidObject):
        SectorCover((SectorArc(F(0), F(1, 4)), SectorArc(F(1, 2), F(3, 4))))
    with pytest.raises(InvalidObject):
        SectorCover((SectorArc(F(0), F(3, 4)), SectorArc(F(1, 4), F(1)), SectorArc(F(1, 2), F(5, 4))))


@given(seeds)
def test_antisymmetry(seed):
    rng = random.Random(seed)
    phi, arc = random_factor(rng), random_arc(rng)
    if dominance(phi, arc) is Verdict.NEG_DIVERGENT:
        assert dominance(-phi, arc) is Verdict.POS_DIVERGENT


@given(seeds)
def test_directions_symmetric(seed):
    rng = random.Random(seed)
    a, b = random_factor(rng), random_factor(rng)
    if same_class(a, b):
        return
    da, db = stokes_directions(a, b), stokes_directions(b, a)
    assert da == db


@given(seeds)
def test_directions_are_sign_changes(seed):
    rng = random.Random(seed)
    a, b = random_factor(rng), random_factor(rng)
    if same_class(a, b):
        return
    lead = a - b
    q, c = lead.terms[0]
    for d in stokes_directions(a, b):
        v = complex(float(c.re), float(c.im)) * complex(__import__("cmath").exp(-2j * __import__("math").pi * float(q) * d.approx()))
        assert abs(v.real) < 1e-9 * max(1.0, abs(v))


@given(seeds)
def test_standard_cover_is_sound(seed):
    rng = random.Random(seed)
    fs = [random_factor(rng) for _ in range(rng.randint(1, 3))]
    cov = standard_cover(fs)
    assert cover_is_sound(cov, fs)
    for k in range(len(cov)):
        for i in fs:
            for j in fs:
                assert dominance(i - j, cov.overlap(k)) in tuple(Verdict)


@given(seeds)
def test_common_refinement_refines(seed):
    rng = random.Random(seed)
    a = [random_factor(rng) for _ in range(2)]
    b = [random_factor(rng) for _ in range(2)]
    ca, cb = standard_cover(a), standard_cover(b)
    ref = common_refinement([ca, cb], a + b)
    assert cover_is_sound(ref, a + b)
    for arc in ref.arcs:
        assert any(c.contains_closed(arc) for c in ca.arcs)
        assert any(c.contains_closed(arc) for c in cb.arcs)


@given(seeds)
def test_dominance_matches_numeric_oracle(seed):
    rng = random.Random(seed)
    phi, arc = random_factor(rng), random_arc(rng)
    res = oracle_dominance(phi, arc)
    if res.ambiguous:
        return
    assert dominance(phi, arc) is res.verdict


def test_hom_permitted_ray_counterexample():
    phi1, phi2 = factor({2: 1}), factor({1: 1})
    ray = SectorArc.ray(F(0))
    assert not hom_permitted(phi1, phi2, ray)
    assert hom_permitted(phi2, phi1, ray)


def test_chain_cover_has_no_point_on_boundary():
    cov = chain_cover([Angle.rational(F(1, 3)), Angle.arg(FieldScalar(1, 2))])
    for arc in cov.arcs:
        assert F(1, 3) not in (arc.start % 1, arc.end % 1)
