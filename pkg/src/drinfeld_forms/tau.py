"""Twisted polynomials sum a_i tau^i with tau c = c^q tau, and Newton polygons.

Coefficients may be any type with ``+``, ``*`` and ``q_power`` (series,
dual numbers, or polynomials in A).  ``None`` is never stored: absent
coefficients are exact zeros.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import IndeterminateValuation, MalformedPolygon, NotNormalized, ZeroInput
from .scalars import PolyA
from .series import DualNumber, PuiseuxNumber


def is_exact_zero(c) -> bool:
    if isinstance(c, DualNumber):
        return c.val.is_zero() and c.der.is_zero()
    return c.is_zero()


def is_exact_one(c) -> bool:
    if isinstance(c, DualNumber):
        return is_exact_one(c.val) and c.der.is_zero()
    if isinstance(c, PuiseuxNumber):
        return c.is_exact() and c.start == 0 and len(c.coeffs) == 1 and c.lead_code() == 1
    if isinstance(c, PolyA):
        return c == 1
    return c == 1


class TauPoly:
    """Finite twisted polynomial; ``coeffs[i]`` multiplies tau^i (i.e. X^(q^i))."""

    def __init__(self, coeffs):
        self.coeffs = tuple(coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    @property
    def degree(self) -> int:
        for i in range(len(self.coeffs) - 1, -1, -1):
            if not is_exact_zero(self.coeffs[i]):
                return i
        return -1

    def _zero_like(self):
        c = self.coeffs[0]
        if isinstance(c, PolyA):
            return PolyA.const(c.q, 0)
        if isinstance(c, DualNumber):
            return DualNumber(PuiseuxNumber.zero(c.ground))
        return PuiseuxNumber.zero(c.ground)

    def coeff(self, i: int):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self._zero_like()

    def __add__(self, other: "TauPoly"):
        n = max(len(self), len(other))
        out = [self.coeff(i) + other.coeff(i) for i in range(n)]
        kmax = _common_kmax(self, other)
        return TauSeries(out[: kmax + 1], kmax) if kmax is not None else TauPoly(out)

    def __mul__(self, other: "TauPoly"):
        return tau_mul(self, other)

    def __call__(self, z):
        return tau_eval(self, z)

    def with_coeff(self, i: int, value) -> "TauPoly":
        out = list(self.coeffs)
        out[i] = value
        return type(self)(out) if not isinstance(self, TauSeries) else TauSeries(out, self.kmax)

    def to_json(self) -> str:
        return json.dumps([c.to_dict() for c in self.coeffs])

    def __repr__(self):
        return f"TauPoly({list(self.coeffs)!r})"


class TauSeries(TauPoly):
    """Twisted power series known through tau^kmax."""

    def __init__(self, coeffs, kmax: int):
        coeffs = list(coeffs)[: kmax + 1]
        super().__init__(coeffs)
        self.kmax = kmax
        if len(self.coeffs) < kmax + 1:
            pad = self._zero_like()
            self.coeffs = self.coeffs + (pad,) * (kmax + 1 - len(self.coeffs))

    def __repr__(self):
        return f"TauSeries({list(self.coeffs)!r}, kmax={self.kmax})"


def _common_kmax(f, g):
    ks = [h.kmax for h in (f, g) if isinstance(h, TauSeries)]
    return min(ks) if ks else None


def tau_mul(f: TauPoly, g: TauPoly) -> TauPoly:
    """Product with coefficient k equal to sum_{i+j=k} f_i g_j^(q^i)."""
    kmax = _common_kmax(f, g)
    top = len(f) + len(g) - 2
    if kmax is not None:
        top = min(top, kmax)
    out = []
    for k in range(top + 1):
        acc = None
        for i in range(max(0, k - len(g) + 1), min(k, len(f) - 1) + 1):
            a, b = f[i], g[k - i]
            if is_exact_zero(a) or is_exact_zero(b):
                continue
            term = a * b.q_power(i)
            acc = term if acc is None else acc + term
        out.append(f._zero_like() if acc is None else acc)
    return TauSeries(out, kmax) if kmax is not None else TauPoly(out)


def tau_inverse(f: TauPoly, kmax: int) -> TauSeries:
    """Compositional inverse through tau^kmax of f with f_0 = 1."""
    if not is_exact_one(f[0]):
        raise NotNormalized("constant coefficient must be exactly 1")
    beta = [f[0]]
    for k in range(1, kmax + 1):
        acc = None
        for i in range(1, min(k, len(f) - 1) + 1):
            a = f[i]
            if is_exact_zero(a):
                continue
            term = a * beta[k - i].q_power(i)
            acc = term if acc is None else acc + term
        beta.append(f._zero_like() if acc is None else -acc)
    return TauSeries(beta, kmax)


def tau_eval(f: TauPoly, z):
    """sum f_i z^(q^i)."""
    acc = None
    for i, a in enumerate(f.coeffs):
        if is_exact_zero(a):
            continue
        term = a * z.q_power(i)
        acc = term if acc is None else acc + term
    return f._zero_like() if acc is None else acc


# -- Newton polygons --

@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of the points (q^i, v(a_i)) of an additive polynomial."""

    vertices: tuple

    @property
    def segments(self) -> list[tuple[int, Fraction]]:
        """(horizontal length, slope) pairs; slope = log of the roots on that segment."""
        out = []
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            out.append((x1 - x0, Fraction(y1 - y0, x1 - x0)))
        return out

    def to_dict(self) -> dict:
        return {"vertices": [[x, str(y)] for x, y in self.vertices],
                "segments": [[n, str(s)] for n, s in self.segments]}


def _lower_hull(points):
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def _hull_height(hull, x):
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * Fraction(x - x0, x1 - x0)
    return None


def newton_polygon(f: TauPoly, q: int | None = None) -> NewtonPolygon:
    """Newton polygon of sum f_i X^(q^i) over coefficients of type PuiseuxNumber.

    A coefficient with nothing visible is accepted only when its precision
    bound certifies that it lies on or above the hull.
    """
    coeffs = [c.val if isinstance(c, DualNumber) else c for c in f.coeffs]
    if not coeffs:
        raise ZeroInput("empty twisted polynomial")
    g = coeffs[0].ground
    q = q or g.q
    points, hidden = [], []
    for i, c in enumerate(coeffs):
        if c.is_zero():
            continue
        if c.has_visible():
            points.append((q**i, c.valuation()))
        else:
            hidden.append((q**i, Fraction(c.prec, g.e)))
    if not points:
        raise ZeroInput("no nonzero coefficient")
    hull = _lower_hull(points)
    for x, bound in hidden:
        height = _hull_height(hull, x)
        if height is None or bound < height:
            raise IndeterminateValuation(f"coefficient of X^{x} is not resolved by precision")
    return NewtonPolygon(tuple(hull))


# -- spectra --

@dataclass(frozen=True)
class Spectrum:
    """Non-decreasing sequence of logs of a successive minimum basis."""

    values: tuple

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("spectrum must be non-decreasing")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def inseparable_at(self, k: int) -> bool:
        """Entries k and k+1 (1-based) coincide."""
        return self.values[k - 1] == self.values[k]

    def to_list(self) -> list[str]:
        return [str(v) for v in self.values]

    @classmethod
    def from_list(cls, items) -> "Spectrum":
        return cls(tuple(Fraction(s) for s in items))


def spectrum_to_np(spec: Spectrum, q: int, y0: Fraction = Fraction(0)) -> NewtonPolygon:
    """Newton polygon of e_V for a lattice with the given spectrum."""
    vertices = [(1, Fraction(y0))]
    count = 0
    vals = list(spec.values)
    i = 0
    while i < len(vals):
        t = vals[i]
        while i < len(vals) and vals[i] == t:
            i += 1
        x0, y = vertices[-1]
        x1 = q**i
        vertices.append((x1, y + (x1 - x0) * t))
        count = i
    assert count == len(vals)
    return NewtonPolygon(tuple(vertices))


def np_to_spectrum(poly: NewtonPolygon, q: int) -> Spectrum:
    """Spectrum read off from segment lengths q^b - q^a."""
    def exponent(x):
        k = 0
        while q**k < x:
            k += 1
        if q**k != x:
            raise MalformedPolygon(f"vertex abscissa {x} is not a power of {q}")
        return k

    if not poly.vertices:
        raise MalformedPolygon("empty polygon")
    if poly.vertices[0][0] != 1:
        raise MalformedPolygon("polygon must start at abscissa 1")
    vals = []
    for (x0, _), (x1, _), (_, slope) in zip(poly.vertices, poly.vertices[1:], poly.segments):
        vals.extend([slope] * (exponent(x1) - exponent(x0)))
    return Spectrum(tuple(vals))
