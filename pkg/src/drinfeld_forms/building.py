"""Apartment points, the Weyl chamber, inseparability loci W(k) and fiber sampling."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import (DependentGenerators, FiberNotConstant, IndeterminateValuation,
                     NotInFundamentalDomain, PrecisionExhausted, UnsupportedParams)
from .lattice import ALatticeFrame, smb_finite, truncation_basis
from .series import PuiseuxNumber, value_part
from .tau import Spectrum


@dataclass(frozen=True)
class ApartmentPoint:
    """x = (x_1, ..., x_r) with x_r = 0."""

    x: tuple

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.x)
        if not vals or vals[-1] != 0:
            raise ValueError("the last coordinate of an apartment point must be 0")
        object.__setattr__(self, "x", vals)

    @property
    def r(self) -> int:
        return len(self.x)

    def in_chamber(self) -> bool:
        return all(a >= b for a, b in zip(self.x, self.x[1:]))

    def walls(self) -> set[int]:
        """Indices i (1-based) with x_i = x_{i+1}."""
        return {i + 1 for i in range(self.r - 1) if self.x[i] == self.x[i + 1]}

    def denominator(self) -> int:
        return lcm(*(v.denominator for v in self.x))

    def to_list(self) -> list[str]:
        return [str(v) for v in self.x]

    @classmethod
    def parse(cls, text: str) -> "ApartmentPoint":
        return cls(tuple(Fraction(t.strip()) for t in text.split(",")))


@dataclass(frozen=True, order=True)
class WeylVertex:
    """sum n_i k_i with k_i = (1, ..., 1, 0, ..., 0) (i ones)."""

    n: tuple

    def point(self) -> ApartmentPoint:
        r = len(self.n) + 1
        return ApartmentPoint(tuple(sum(self.n[j:]) for j in range(r - 1)) + (0,))

    def label(self) -> str:
        parts = []
        for i in reversed(range(len(self.n))):
            c = self.n[i]
            if c:
                parts.append(f"k{i + 1}" if c == 1 else f"{c}k{i + 1}")
        return "+".join(parts) or "0"


def barycentric_point(vertices, weights) -> ApartmentPoint:
    r = len(vertices[0].n) + 1
    coords = [Fraction(0)] * r
    for v, t in zip(vertices, weights):
        for i, x in enumerate(v.point().x):
            coords[i] += Fraction(t) * x
    return ApartmentPoint(tuple(coords))


def insep_multiset(x: ApartmentPoint, length: int) -> tuple:
    """Sorted first ``length`` values of {x_i + j : j >= 0}."""
    vals = sorted(xi + j for xi in x.x for j in range(length))
    return tuple(vals[:length])


def truncation_spectrum(x: ApartmentPoint, d: int) -> tuple:
    """Sorted {x_i + j : j < d}: the spectrum of a degree-d truncation over x."""
    return tuple(sorted(xi + j for xi in x.x for j in range(d)))


def wk_member(x: ApartmentPoint, k: int) -> bool:
    """Entries k and k+1 of the inseparability multiset coincide."""
    m = insep_multiset(x, k + 1)
    return m[k - 1] == m[k]


def wk_vertices(r: int, k: int, box: int) -> list[WeylVertex]:
    if r < 2 or k < 1:
        raise UnsupportedParams("need r >= 2 and k >= 1")
    out = []
    for n in itertools.product(range(box + 1), repeat=r - 1):
        v = WeylVertex(tuple(n))
        if wk_member(v.point(), k):
            out.append(v)
    return sorted(out)


def wk_csv(vertices) -> str:
    if not vertices:
        return ""
    header = ",".join(f"n{i + 1}" for i in range(len(vertices[0].n)))
    return "\n".join([header] + [",".join(str(c) for c in v.n) for v in vertices]) + "\n"


# -- frames and the building map --

def is_fundamental(frame: ALatticeFrame, d_check: int = 3):
    """Decide whether (omega_r, ..., omega_1) is a successive minimum basis.

    Returns (flag, certificate).  The class sublattices (indices whose logs
    agree modulo Z) are truncated to degree ``d_check`` and orthogonalized;
    their spectra must equal sorted {x_i + j : j < d_check}.  The leading
    residue rank test is recorded alongside as a cross-check.
    """
    g = frame.ground
    cert = {"weakly_ordered": False, "classes": []}
    try:
        x = frame.logs()
    except IndeterminateValuation as exc:
        raise PrecisionExhausted("frame entry has no visible term") from exc
    last = value_part(frame.omega[-1])
    if not last.agrees(PuiseuxNumber.one(g)):
        cert["reason"] = "last entry is not 1"
        return False, cert
    cert["x"] = [str(v) for v in x]
    cert["weakly_ordered"] = all(a >= b for a, b in zip(x, x[1:]))
    if not cert["weakly_ordered"]:
        return False, cert
    classes = {}
    for i, xi in enumerate(x):
        classes.setdefault(xi - (xi.numerator // xi.denominator), []).append(i)
    ok = True
    for members in classes.values():
        predicted = tuple(sorted(x[i] + j for i in members for j in range(d_check)))
        leads = np.array([value_part(frame.omega[i]).lead() for i in members])
        residue_ok = g.fq_independent(leads)
        sub = ALatticeFrame(tuple(frame.omega[i] for i in members))
        try:
            lat = smb_finite([value_part(b) for b in truncation_basis(sub, d_check)])
            computed = tuple(sorted(lat.logs()))
        except DependentGenerators:
            computed = None
        spectral_ok = computed == predicted
        cert["classes"].append({
            "indices": [i + 1 for i in members],
            "predicted": [str(v) for v in predicted],
            "computed": None if computed is None else [str(v) for v in computed],
            "spectrum_ok": spectral_ok,
            "residue_ok": residue_ok,
        })
        ok = ok and spectral_ok
    return ok, cert


def building_map(frame: ALatticeFrame) -> ApartmentPoint:
    ok, cert = is_fundamental(frame)
    if not ok:
        raise NotInFundamentalDomain(json.dumps(cert))
    return ApartmentPoint(tuple(frame.logs()))


def _random_unit_tail(g, rng, length: int):
    arr = rng.integers(0, g.p, size=(length, g.n))
    return PuiseuxNumber(g, 1, arr)


def fiber_sample(g, x: ApartmentPoint, count: int, rng: np.random.Generator,
                 tail_length: int = 4, max_tries: int = 50) -> list[ALatticeFrame]:
    """Frames omega_i = theta_i T^(x_i) (1 + rho_i) over x, each certified fundamental."""
    r = x.r
    if g.m < r:
        raise UnsupportedParams(f"residue degree m = {g.m} is smaller than r = {r}")
    if not x.in_chamber():
        raise NotInFundamentalDomain("point is outside the Weyl chamber")
    if g.e % x.denominator():
        raise UnsupportedParams(f"denominators of x do not divide e = {g.e}")
    F = g.F
    classes = {}
    for i, xi in enumerate(x.x):
        classes.setdefault(xi - (xi.numerator // xi.denominator), []).append(i)
    out = []
    for _ in range(count):
        for _ in range(max_tries):
            theta = [None] * r
            theta[r - 1] = F.one()
            for members in classes.values():
                while True:
                    for i in members:
                        if i != r - 1:
                            theta[i] = F.from_code(int(rng.integers(1, F.order)))
                    if g.fq_independent(np.array([theta[i] for i in members])):
                        break
            omega = []
            for i in range(r):
                if i == r - 1:
                    omega.append(PuiseuxNumber.one(g))
                    continue
                expo = -int(x.x[i] * g.e)
                base = PuiseuxNumber.monomial(g, expo, theta[i])
                omega.append(base * (1 + _random_unit_tail(g, rng, tail_length)))
            frame = ALatticeFrame(tuple(omega))
            if is_fundamental(frame)[0]:
                out.append(frame)
                break
        else:
            raise NotInFundamentalDomain("could not sample a fundamental frame")
    return out


def affine_check(g, evaluator, vertices, samples, rng: np.random.Generator,
                 fiber_points: int = 2) -> list[dict]:
    """Compare log|f| at barycentric points with the interpolation of its vertex values.

    ``evaluator`` maps a frame to a series value.  Each apartment point is
    evaluated at ``fiber_points`` sampled frames, which must agree exactly.
    """
    def log_at(x: ApartmentPoint) -> Fraction:
        logs = {evaluator(fr).logq_abs() for fr in fiber_sample(g, x, fiber_points, rng)}
        if len(logs) != 1:
            raise FiberNotConstant(f"log|f| takes values {sorted(logs)} over {x.to_list()}")
        return logs.pop()

    vertex_logs = [log_at(v.point()) for v in vertices]
    report = []
    for t in samples:
        t = tuple(Fraction(c) for c in t)
        x = barycentric_point(vertices, t)
        lhs = log_at(x)
        rhs = sum((ti * li for ti, li in zip(t, vertex_logs)), Fraction(0))
        report.append({"t": [str(c) for c in t], "x": x.to_list(),
                       "log_f": str(lhs), "interpolated": str(rhs), "equal": lhs == rhs})
    return report


def spectrum_of_truncation(frame: ALatticeFrame, d: int) -> Spectrum:
    lat = smb_finite([value_part(b) for b in truncation_basis(frame, d)])
    return Spectrum(tuple(sorted(lat.logs())))
