from fractions import Fraction

import numpy as np
import pytest
import sympy

from drinfeld_forms.building import ApartmentPoint, fiber_sample
from drinfeld_forms.errors import (IllDefinedExponent, NotInFk, UnsupportedParams,
                                   ZeroCarlitzCoefficient)
from drinfeld_forms.forms import (alpha_series, carlitz_ratio_valuation, coefficient_forms,
                                  convergence_report, eisenstein_direct, jacobian_det,
                                  normalize_forms, pibar_power, poly_to_series)
from drinfeld_forms.lattice import ALatticeFrame
from drinfeld_forms.scalars import PolyA, bracket, carlitz_coeffs, d_factor
from drinfeld_forms.series import PuiseuxNumber, series_ground
from drinfeld_forms.tau import TauPoly, tau_mul


def _frame(q, x, seed=0, e=2, N=240, m=None):
    g = series_ground(q, 1, m or len(x), e, N)
    return fiber_sample(g, ApartmentPoint(tuple(x)), 1, np.random.default_rng(seed))[0]


def _a_frame(q, N=240):
    return ALatticeFrame((PuiseuxNumber.one(series_ground(q, 1, 1, 1, N)),))


def _close(a, b, digits=40):
    """a and b agree through ``digits`` u-adic places past the leading term of b."""
    diff = a - b
    if diff.is_exact():
        return diff.is_zero()
    return not diff.has_visible() and diff.prec - b.start >= digits


@pytest.mark.parametrize("q", [2, 3])
def test_rank_one_a_lattice(q):
    prof = alpha_series(_a_frame(q))
    g = prof.ground
    assert prof.g[1].logq_abs() == q
    assert _close(prof.g[1], pibar_power(g, q - 1))
    for k in range(1, prof.kmax + 1):
        want = Fraction(q * (q**k - 1), q - 1) - k * q**k
        assert prof.alpha[k].logq_abs() == want


def test_carlitz_lattice_q2():
    g = series_ground(2, 1, 1, 1, 240)
    pibar = pibar_power(g, 1)
    prof = alpha_series(ALatticeFrame((pibar,)), kmax=3)
    assert _close(prof.g[1], PuiseuxNumber.one(g))
    for k in range(1, 4):
        assert _close(prof.alpha[k], poly_to_series(g, d_factor(k, 2)).inverse())
    a = PolyA.parse("T^2+T+1", 2)
    ell = coefficient_forms(prof, a)
    for mine, c in zip(ell, carlitz_coeffs(a)):
        assert _close(mine, poly_to_series(g, c))


def test_pibar_powers():
    g = series_ground(3, 1, 1, 1, 240)
    assert pibar_power(g, 2).logq_abs() == 3
    assert pibar_power(g, 0) == PuiseuxNumber.one(g)
    assert pibar_power(g, 1 - 9).logq_abs() == -12
    with pytest.raises(IllDefinedExponent):
        pibar_power(g, 1)


@pytest.mark.parametrize("q", [2, 3])
def test_normalization_at_a(q):
    prof = alpha_series(_a_frame(q), kmax=3)
    g = prof.ground
    one = PuiseuxNumber.one(g)
    a = PolyA.parse("T^3+T", q)
    for k in range(0, 4):
        ell_t, alpha_t = normalize_forms(prof, a, k)
        assert _close(ell_t, one) and _close(alpha_t, one)
    with pytest.raises(ZeroCarlitzCoefficient):
        normalize_forms(prof, PolyA.T(q), 2)


def test_normalized_log_shift():
    q, k = 2, 2
    prof = alpha_series(_frame(q, (3, 0)), kmax=k)
    _, alpha_t = normalize_forms(prof, PolyA.T(q) ** 3, k)
    shift = Fraction(q * (q**k - 1), q - 1) - k * q**k
    assert alpha_t.logq_abs() == prof.alpha[k].logq_abs() - shift


def test_coefficient_forms_for_t_and_t_squared():
    prof = alpha_series(_frame(3, (Fraction(3, 2), 0)), kmax=4)
    T = PolyA.T(3)
    ell = coefficient_forms(prof, T)
    assert list(ell) == list(prof.g)
    ell2 = coefficient_forms(prof, T * T)
    sq = tau_mul(TauPoly(prof.g), TauPoly(prof.g))
    assert len(ell2) == len(sq)
    assert all(a.agrees(b) for a, b in zip(ell2, sq))


def test_convergence_at_a_and_precondition():
    prof = alpha_series(_a_frame(2), kmax=2)
    rows = convergence_report(prof, 2, [2, 3])
    assert all(r.v_diff is None for r in rows)
    with pytest.raises(NotInFk):
        convergence_report(alpha_series(_frame(2, (1, 0))), 2, [2, 3])


def _carlitz_coefficient_sympy(q, d, k):
    """Coefficient of X^(q^k) in rho_(T^d)(X), composing rho_T(X) = T X + X^q."""
    T, X = sympy.symbols("T X")
    f = X
    for _ in range(d):
        f = sympy.expand(T * f + f**q)
    return sympy.Poly(sympy.Poly(f, X).as_expr().coeff(X, q**k), T, modulus=q)


@pytest.mark.parametrize("q, k", [(2, 1), (2, 2), (3, 1), (3, 2), (2, 3)])
def test_carlitz_ratio_valuation_against_sympy(q, k):
    T = sympy.symbols("T")
    for d in range(k, k + 3):
        if q**k * d > 200:
            break
        a = sympy.Poly(T**d, T, modulus=q)
        bk = a ** (q**k) - a
        Dk = sympy.Poly(1, T, modulus=q)
        for i in range(k):
            Dk = Dk * (sympy.Poly(T ** (q**k), T, modulus=q) - sympy.Poly(T ** (q**i), T, modulus=q))
        num = bk - Dk * _carlitz_coefficient_sympy(q, d, k)
        got = carlitz_ratio_valuation(q, k, d)
        if num.is_zero:
            assert got == float("inf")
        else:
            assert got == bk.degree() - num.degree()


def test_carlitz_ratio_is_exactly_one_at_k1():
    """D_1 c_1 = [a, 1] for every a, so the first normalized difference vanishes identically."""
    for q in (2, 3):
        for a in (PolyA.T(q) ** 3, PolyA.parse("T^2+T+1", q)):
            assert d_factor(1, q) * carlitz_coeffs(a)[1] == bracket(a, 1)


# -- direct sums --

def test_direct_sum_grouping_and_oracle():
    frame = _frame(3, (1, 0), N=60)
    prof = alpha_series(frame, kmax=2)
    full = eisenstein_direct(frame, 2, 3, grouped=False)
    grouped = eisenstein_direct(frame, 2, 3)
    assert full == grouped
    assert _close(grouped, -prof.beta[1], 50)
    assert eisenstein_direct(frame, 1, 3, grouped=False).is_negligible()
    with pytest.raises(UnsupportedParams):
        eisenstein_direct(frame, 0, 2)


def test_alpha_from_direct_eisenstein_sums():
    q = 2
    frame = _frame(q, (Fraction(3, 2), 0), N=80)
    prof = alpha_series(frame, kmax=3)
    E = {j: eisenstein_direct(frame, q**j - 1, 5, prec=70) for j in (1, 2, 3)}
    for k in (1, 2, 3):
        acc = None
        for i in range(k):
            term = prof.alpha[i] * E[k - i].q_power(i)
            acc = term if acc is None else acc + term
        assert _close(acc, prof.alpha[k], 30)


# -- invariance --

def test_basis_independence():
    frame = _frame(3, (Fraction(5, 2), 0))
    T = PuiseuxNumber.T(frame.ground)
    moved = ALatticeFrame((frame.omega[0] + T * frame.omega[1], frame.omega[1]))
    a, b = alpha_series(frame), alpha_series(moved)
    for x, y in zip(a.g[1:], b.g[1:]):
        assert _close(x, y)


def test_weight_homogeneity():
    q = 2
    frame = _frame(q, (Fraction(3, 2), 0))
    c = PuiseuxNumber.T(frame.ground).inverse()
    scaled = ALatticeFrame(tuple(c * w for w in frame.omega))
    a, b = alpha_series(frame, kmax=3), alpha_series(scaled, kmax=3)
    for k in range(1, 4):
        assert _close(b.alpha[k], a.alpha[k] * c ** (1 - q**k))
        assert _close(b.eisenstein(k), a.eisenstein(k) * c ** (1 - q**k))
    for k in (1, 2):
        assert _close(b.g[k], a.g[k] * c ** (1 - q**k))


def test_forms_off_walls():
    """Off the relevant walls, g_i and E_k have fiber-constant nonzero size."""
    for q, x in [(2, (Fraction(3, 2), 0)), (3, (2, Fraction(1, 2), 0))]:
        r = len(x)
        g = series_ground(q, 1, r, 2, 240)
        frames = fiber_sample(g, ApartmentPoint(x), 3, np.random.default_rng(4))
        profs = [alpha_series(fr) for fr in frames]
        for i in range(1, r + 1):
            logs = {p.g[i].logq_abs() for p in profs}
            assert len(logs) == 1
        assert {p.eisenstein(1).logq_abs() for p in profs} == {0}
        for p in profs:
            t = (p.delta.logq_abs() - 1) / (q - 1)
            assert g.e % t.denominator == 0


def test_jacobian_first_order():
    frame = _frame(2, (Fraction(3, 2), 0))
    a = PolyA.T(2)
    dl = jacobian_det(frame, "coeff", 1, a)
    da = jacobian_det(frame, "alpha", 1)
    br = poly_to_series(frame.ground, bracket(a, 1))
    assert _close(dl, br * da, 30)
    with pytest.raises(UnsupportedParams):
        jacobian_det(frame, "alpha", 2)
