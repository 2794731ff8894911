from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from drinfeld_forms.errors import DivisionByZero, IndeterminateValuation, UsageError
from drinfeld_forms.series import DualNumber, PuiseuxNumber, dual_lift, series_ground

G3 = series_ground(3, 1, 2, 2, 60)
G2 = series_ground(2, 1, 2, 2, 60)


def series(g, max_terms=6, exact=True):
    @st.composite
    def build(draw):
        start = draw(st.integers(-6, 6))
        codes = draw(st.lists(st.integers(0, g.F.order - 1), min_size=1, max_size=max_terms))
        codes[0] = codes[0] or 1
        x = PuiseuxNumber.from_terms(g, [(start + i, c) for i, c in enumerate(codes)])
        if not exact:
            x = x.truncate(start + draw(st.integers(len(codes), 40)))
        return x
    return build()


def test_trivial_examples():
    g = G3
    T = PuiseuxNumber.T(g)
    assert (T * T.inverse()).is_exact()
    assert T * T.inverse() == PuiseuxNumber.one(g)
    assert PuiseuxNumber.T(g).logq_abs() == 1
    assert PuiseuxNumber.one(g).logq_abs() == 0
    assert PuiseuxNumber.u(g).logq_abs() == Fraction(-1, 2)
    x = PuiseuxNumber.one(g)
    y = PuiseuxNumber.u(g) ** 2
    assert (x + y).valuation() == 0


def test_one_plus_u_times_one_minus_u():
    g = G3
    u = PuiseuxNumber.u(g)
    a = (1 + u).truncate(3)
    b = (1 - u).truncate(3)
    prod = a * b
    assert prod.prec == 3
    assert prod == (1 - u * u).truncate(3)


def test_freshman_dream_q2():
    g = G2
    u = PuiseuxNumber.u(g)
    assert (1 + u).q_power(1) == 1 + u * u


def test_fq_constants_fixed_by_q_power():
    g = series_ground(3, 1, 3, 1, 30)
    for code in range(3):
        c = PuiseuxNumber.fq(g, code)
        assert c.q_power(2) == c


def test_indeterminate_and_division_errors():
    g = G3
    z = PuiseuxNumber.zero(g, prec=5)
    with pytest.raises(IndeterminateValuation):
        z.valuation()
    with pytest.raises(DivisionByZero):
        PuiseuxNumber.one(g) / PuiseuxNumber.zero(g)


@settings(max_examples=1000)
@given(series(G3), series(G3))
def test_ultrametric_equality_case(x, y):
    assume(x.valuation() != y.valuation())
    assert (x + y).valuation() == min(x.valuation(), y.valuation())


@given(series(G3, exact=False), series(G3, exact=False), series(G3, exact=False))
def test_ring_axioms(x, y, z):
    assert ((x * y) * z).agrees(x * (y * z))
    assert (x * (y + z)).agrees(x * y + x * z)
    assert (x + y).agrees(y + x)
    assert ((x * y) / y).agrees(x)


@given(series(G2, max_terms=8), st.integers(1, 3))
def test_q_power_matches_repeated_multiplication(x, j):
    acc = PuiseuxNumber.one(G2)
    for _ in range(2**j):
        acc = acc * x
    assert x.q_power(j) == acc
    assert x.q_power(j).valuation() == 2**j * x.valuation()


@given(series(G3, max_terms=8), st.integers(1, 2))
def test_q_power_matches_repeated_multiplication_q3(x, j):
    acc = PuiseuxNumber.one(G3)
    for _ in range(3**j):
        acc = acc * x
    assert x.q_power(j) == acc


@given(series(G3, exact=False))
def test_json_round_trip(x):
    assert PuiseuxNumber.from_json(G3, x.to_json()) == x


def test_json_rejects_bad_input():
    with pytest.raises(UsageError):
        PuiseuxNumber.from_dict(G3, {"e": 2, "m": 2, "prec": None, "terms": [[2, "1"], [1, "1"]]})
    with pytest.raises(UsageError):
        PuiseuxNumber.from_dict(G3, {"e": 3, "m": 2, "prec": None, "terms": []})


def test_parse_literal():
    g = G3
    x = PuiseuxNumber.parse(g, "T^2 + w*T - 1")
    T = PuiseuxNumber.T(g)
    w = PuiseuxNumber.w(g)
    assert x == T * T + w * T - 1
    assert PuiseuxNumber.parse(g, "u^-2") == T


# -- dual numbers --

def test_dual_examples():
    g = G3
    z = PuiseuxNumber.T(g) + 1
    x = dual_lift(z, True)
    assert (x * x).der == 2 * z
    assert (x.inverse()).der.agrees(-(z * z).inverse())
    assert x.q_power(1).der.is_zero()
    g2 = G2
    y = dual_lift(PuiseuxNumber.T(g2), True)
    assert (y * y).der.is_zero()


leaves = st.one_of(st.just("z"), st.integers(1, 5))
trees = st.recursive(
    leaves,
    lambda ch: st.one_of(st.tuples(st.sampled_from("+-*/"), ch, ch),
                         st.tuples(st.just("^"), ch, st.integers(0, 4))),
    max_leaves=8)


def _depth(t):
    if not isinstance(t, tuple):
        return 0
    if t[0] == "^":
        return 1 + _depth(t[1])
    return 1 + max(_depth(t[1]), _depth(t[2]))


def _to_sympy(t, z):
    if t == "z":
        return z
    if isinstance(t, int):
        return sympy.Integer(t)
    op = t[0]
    if op == "^":
        return _to_sympy(t[1], z) ** t[2]
    a, b = _to_sympy(t[1], z), _to_sympy(t[2], z)
    return {"+": a + b, "-": a - b, "*": a * b, "/": a / b}[op]


def _eval_tree(t, zval, const):
    if t == "z":
        return zval
    if isinstance(t, int):
        return const(t)
    op = t[0]
    if op == "^":
        return _eval_tree(t[1], zval, const) ** t[2]
    a, b = _eval_tree(t[1], zval, const), _eval_tree(t[2], zval, const)
    if op == "/":
        return a / b
    return {"+": a + b, "-": a - b, "*": a * b}[op]


def _eval_sympy(expr, z, zval, g):
    """Evaluate a rational expression with integer data at a series value."""
    if expr == z:
        return zval
    if expr.is_Integer:
        return PuiseuxNumber.const(g, int(expr) % g.p)
    if expr.is_Rational:
        if expr.q % g.p == 0:
            raise DivisionByZero("denominator divisible by p")
        return PuiseuxNumber.const(g, int(expr.p) % g.p) / PuiseuxNumber.const(g, int(expr.q) % g.p)
    if expr.is_Add:
        out = PuiseuxNumber.zero(g)
        for a in expr.args:
            out = out + _eval_sympy(a, z, zval, g)
        return out
    if expr.is_Mul:
        out = PuiseuxNumber.one(g)
        for a in expr.args:
            out = out * _eval_sympy(a, z, zval, g)
        return out
    if expr.is_Pow:
        base = _eval_sympy(expr.args[0], z, zval, g)
        k = int(expr.args[1])
        return base ** k if k >= 0 else base.inverse() ** (-k)
    raise AssertionError(f"unexpected node {expr}")


@settings(max_examples=100)
@given(trees, st.sampled_from([2, 3]))
def test_dual_derivative_matches_symbolic(tree, p):
    assume(_depth(tree) <= 4)
    g = G2 if p == 2 else G3
    z0 = PuiseuxNumber.T(g) ** 2 + PuiseuxNumber.w(g) * PuiseuxNumber.T(g) + 1
    zs = sympy.Symbol("z")
    expr = _to_sympy(tree, zs)
    assume(expr.is_finite is not False and expr != sympy.zoo and not expr.has(sympy.nan))
    try:
        lifted = _eval_tree(tree, dual_lift(z0, True),
                            lambda c: DualNumber(PuiseuxNumber.const(g, c % p)))
        want = _eval_sympy(sympy.together(sympy.diff(expr, zs)), zs, z0, g)
        value = _eval_sympy(sympy.together(expr), zs, z0, g)
    except (DivisionByZero, IndeterminateValuation):
        assume(False)
    assert lifted.val.agrees(value)
    assert lifted.der.agrees(want)
