from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drinfeld_forms.building import (ApartmentPoint, WeylVertex, barycentric_point,
                                     building_map, fiber_sample, insep_multiset,
                                     is_fundamental, spectrum_of_truncation,
                                     truncation_spectrum, wk_member, wk_vertices)
from drinfeld_forms.errors import NotInFundamentalDomain, UnsupportedParams
from drinfeld_forms.lattice import ALatticeFrame
from drinfeld_forms.series import PuiseuxNumber, series_ground
from drinfeld_forms.verify import load_wk_golden


@st.composite
def chamber_points(draw, r=None, den=2, top=4):
    r = r or draw(st.integers(2, 3))
    steps = [Fraction(draw(st.integers(0, top * den)), den) for _ in range(r - 1)]
    coords = [sum(steps[i:], Fraction(0)) for i in range(r - 1)] + [Fraction(0)]
    return ApartmentPoint(tuple(coords))


def test_apartment_point_basics():
    x = ApartmentPoint.parse("3/2, 1/2, 0")
    assert x.r == 3 and x.in_chamber() and x.denominator() == 2
    assert ApartmentPoint.parse(",".join(x.to_list())) == x
    assert ApartmentPoint((1, 1, 0)).walls() == {1}
    assert not ApartmentPoint((0, 1, 0)).in_chamber()
    with pytest.raises(ValueError):
        ApartmentPoint((1, 2))


def test_weyl_vertices():
    v = WeylVertex((2, 1))
    assert v.point() == ApartmentPoint((3, 1, 0))
    assert v.label() == "k2+2k1"
    assert WeylVertex((0, 0)).label() == "0"
    mid = barycentric_point([WeylVertex((0,)), WeylVertex((1,))], (Fraction(1, 2),) * 2)
    assert mid == ApartmentPoint((Fraction(1, 2), 0))


def test_insep_multiset_examples():
    assert insep_multiset(ApartmentPoint((Fraction(1, 2), 0)), 4) == (0, Fraction(1, 2), 1, Fraction(3, 2))
    assert insep_multiset(ApartmentPoint((0, 0)), 3) == (0, 0, 1)
    assert truncation_spectrum(ApartmentPoint((2, 0)), 1) == (0, 2)


def test_truncation_spectrum_is_not_a_multiset_prefix():
    """A degree-d truncation has spectrum {x_i + j : j < d}, which differs from the
    first r*d entries of the full multiset once the x_i are more than d apart."""
    x = ApartmentPoint((2, 0))
    assert truncation_spectrum(x, 1) == (0, 2)
    assert insep_multiset(x, 2) == (0, 1)
    g = series_ground(2, 1, 2, 1, 60)
    frame = fiber_sample(g, x, 1, np.random.default_rng(0))[0]
    assert spectrum_of_truncation(frame, 1).values == (0, 2)


@settings(max_examples=25)
@given(chamber_points(), st.sampled_from([2, 3]), st.integers(1, 3), st.integers(0, 10**6))
def test_truncation_spectrum_matches_computation(x, q, d, seed):
    g = series_ground(q, 1, x.r, 2, 60)
    frame = fiber_sample(g, x, 1, np.random.default_rng(seed))[0]
    assert spectrum_of_truncation(frame, d).values == truncation_spectrum(x, d)
    # the first min over x_i + d of the multiset is always reproduced
    bound = min(x.x) + d
    full = insep_multiset(x, x.r * d)
    assert [v for v in truncation_spectrum(x, d) if v < bound] == [v for v in full if v < bound]


@settings(max_examples=100)
@given(chamber_points(den=3))
def test_first_locus_is_the_last_wall(x):
    assert wk_member(x, 1) == (x.x[-2] == 0)


def test_wk_small_cases():
    assert wk_vertices(2, 1, 5) == [WeylVertex((0,))]
    with pytest.raises(UnsupportedParams):
        wk_vertices(1, 1, 3)
    golden = load_wk_golden()
    for k, verts in golden["vertices"].items():
        got = [list(v.n) for v in wk_vertices(3, int(k), golden["box"])]
        assert sorted(got) == sorted(verts)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_wk_against_sampled_truncations(k):
    """Membership in W(k) agrees with a coincidence in the computed spectrum."""
    g = series_ground(2, 1, 3, 1, 60)
    rng = np.random.default_rng(k)
    for v in [WeylVertex((a, b)) for a in range(3) for b in range(3)]:
        frame = fiber_sample(g, v.point(), 1, rng)[0]
        spec = spectrum_of_truncation(frame, k + 1)
        assert spec.inseparable_at(k) == wk_member(v.point(), k)


# -- frames and the building map --

@settings(max_examples=10)
@given(chamber_points(den=2), st.sampled_from([2, 3]), st.integers(0, 10**6))
def test_fiber_sample_maps_back(x, q, seed):
    g = series_ground(q, 1, x.r, 2, 60)
    for frame in fiber_sample(g, x, 2, np.random.default_rng(seed)):
        assert building_map(frame) == x


def test_gamma_stability():
    g = series_ground(3, 1, 2, 2, 60)
    x = ApartmentPoint((Fraction(5, 2), 0))
    frame = fiber_sample(g, x, 1, np.random.default_rng(1))[0]
    T = PuiseuxNumber.T(g)
    w1, w2 = frame.omega
    for c in (T, T + 1, PuiseuxNumber.const(g, 2)):
        assert building_map(ALatticeFrame((w1 + c * w2, w2))) == x
    # adding a multiple of omega_1 to omega_2 leaves the fundamental domain
    bad = ALatticeFrame((w1, w2 + w1))
    assert not is_fundamental(bad)[0]


def test_non_fundamental_frames():
    g = series_ground(3, 1, 2, 1, 60)
    one, T = PuiseuxNumber.one(g), PuiseuxNumber.T(g)
    ok, cert = is_fundamental(ALatticeFrame((T.inverse(), one)))
    assert not ok and not cert["weakly_ordered"]
    # omega_1 = 1 + T^-1 collapses with omega_2 = 1 in the residue
    ok, cert = is_fundamental(ALatticeFrame((one + T.inverse(), one)))
    assert not ok
    with pytest.raises(NotInFundamentalDomain):
        building_map(ALatticeFrame((one + T.inverse(), one)))
    with pytest.raises(NotInFundamentalDomain):
        fiber_sample(g, ApartmentPoint((-1, 0)), 1, np.random.default_rng(0))


def test_fiber_sample_preconditions():
    g = series_ground(3, 1, 2, 1, 60)
    with pytest.raises(UnsupportedParams):
        fiber_sample(g, ApartmentPoint((Fraction(1, 2), 0)), 1, np.random.default_rng(0))
    with pytest.raises(UnsupportedParams):
        fiber_sample(g, ApartmentPoint((1, 1, 0)), 1, np.random.default_rng(0))
