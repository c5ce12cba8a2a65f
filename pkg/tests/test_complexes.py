import random

import pytest
from hypothesis import given, strategies as st

from novistoke.barcodes import barcode, free, torsion
from novistoke.complexes import (
    CurveComplex,
    Kind,
    hom_complex,
    is_perverse,
    j_shriek,
    j_star,
    recollement,
    reconstruct,
    skyscraper,
    support_profile,
    truncate,
    verdier_dual,
)
from novistoke.errors import InvalidObject
from novistoke.irregular import trivial_system, unipotent_stokes_example
from novistoke.sectors import ZERO_FACTOR, factor

from corpus import random_complex
from oracles import classical_perverse

seeds = st.integers(0, 2**32 - 1)
L0 = trivial_system([ZERO_FACTOR])
L1 = trivial_system([factor({1: 1})])


def test_dual_examples():
    assert verdier_dual(j_shriek(L0, -1)) == j_star(L0, -1)
    assert verdier_dual(skyscraper(barcode(free(0)), 0)) == skyscraper(barcode(free(0)), 0)


def test_support_examples():
    assert support_profile(j_shriek(L1, -1)) == {-1: 1}
    assert support_profile(skyscraper(barcode(torsion(0, 1)), 0)) == {}
    assert support_profile(CurveComplex()) == {}
    # Rj_* of the constant sheaf has a point-supported H^1 term
    assert support_profile(j_star(L0, -1)) == {-1: 1, 0: 0}


def test_perversity_examples():
    assert is_perverse(j_shriek(L0, -1)).perverse
    assert is_perverse(skyscraper(barcode(free(0)), 0)).perverse
    v = is_perverse(j_shriek(L0, 0))
    assert not v.perverse and v.witness == 0
    assert str(v) == "NO(0)"


def test_truncate_examples():
    c = j_shriek(L0, -1) + skyscraper(barcode(free(0)))
    assert truncate(c, "<=0") == c
    shifted = j_shriek(L0, 0)
    assert truncate(shifted, "<=0").is_zero()
    assert truncate(shifted, ">=1") == shifted
    with pytest.raises(InvalidObject):
        truncate(c, "sideways")


def test_hom_complex_examples():
    assert hom_complex(j_shriek(L0), j_shriek(L0)).get(0) == 1
    assert hom_complex(j_shriek(L1), j_star(L0)).get(0, 0) == 0
    assert hom_complex(CurveComplex(), j_star(L0)) == {}
    # adjunction: Hom(j_! L, j_* L) = H^0 of the open stratum
    assert hom_complex(j_shriek(L0), j_star(L0)).get(0) == 1


@given(seeds)
def test_double_dual(seed):
    c = random_complex(random.Random(seed))
    assert verdier_dual(verdier_dual(c)) == c


@given(seeds)
def test_duality_exchanges_truncations(seed):
    c = random_complex(random.Random(seed))
    assert verdier_dual(truncate(c, "<=", 0)) == truncate(verdier_dual(c), ">=", 0)


@given(seeds)
def test_perversity_matches_forgetful_image(seed):
    c = random_complex(random.Random(seed))
    assert is_perverse(c).perverse == classical_perverse(c)


@given(seeds, seeds)
def test_truncation_orthogonality(s1, s2):
    c = truncate(random_complex(random.Random(s1)), "<=0")
    d = truncate(random_complex(random.Random(s2)), ">=1")
    assert hom_complex(c, d).get(0, 0) == 0


@given(seeds)
def test_truncation_triangle_splits(seed):
    c = random_complex(random.Random(seed))
    assert truncate(c, "<=0") + truncate(c, ">=1") == c


@given(seeds)
def test_recollement_reconstructs(seed):
    c = random_complex(random.Random(seed))
    data = recollement(c)
    sky = [(s.degree, s.payload) for s in c.summands if s.kind is Kind.SKYSCRAPER and s.payload.reduced_rank()]
    degrees = [d for d, _ in sky]
    if len(set(degrees)) == len(degrees):
        rebuilt = reconstruct(data, sky)
        assert rebuilt == CurveComplex(tuple(s for s in c.summands if not (s.kind is Kind.SKYSCRAPER and not s.payload.reduced_rank())))
    assert recollement(reconstruct(data)) == data


def test_unipotent_stokes_extension_perversity():
    v = unipotent_stokes_example()
    assert is_perverse(j_shriek(v)).perverse
    assert is_perverse(j_star(v)).perverse
    assert support_profile(j_star(v)) == {-1: 1, 0: 0}
