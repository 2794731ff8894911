"""Finite F_q-lattices and rank-r A-lattices in the series model."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (DependentGenerators, DivisionByZero, IndeterminateValuation,
                     PrecisionExhausted, UnsupportedParams)
from .series import DualNumber, PuiseuxNumber, value_part
from .tau import Spectrum, TauPoly, tau_eval

# largest q^n for which lattices are enumerated element by element
ENUMERATION_LIMIT = 3**8
PRODUCT_LIMIT = 81


def _ground(x):
    return value_part(x).ground


def fq_scale(x, code: int):
    """c * x for the F_q element with the given code."""
    g = _ground(x)
    digits = g.fq_in_F[code]
    if isinstance(x, DualNumber):
        return DualNumber(x.val.scale(digits), x.der.scale(digits))
    return x.scale(digits)


@dataclass(frozen=True)
class FiniteLattice:
    """An ordered F_q-basis of a finite lattice; ``is_smb`` marks an orthogonal order."""

    basis: tuple
    is_smb: bool = False

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ground(self):
        return _ground(self.basis[0])

    def logs(self) -> list[Fraction]:
        return [value_part(b).logq_abs() for b in self.basis]

    def spectrum(self) -> Spectrum:
        lat = self if self.is_smb else smb_finite(self.basis)
        return Spectrum(tuple(sorted(lat.logs())))

    def to_json(self) -> str:
        return json.dumps([b.to_dict() for b in self.basis])


@dataclass(frozen=True)
class ALatticeFrame:
    """Frame (omega_1, ..., omega_r) with omega_r = 1 presenting the A-lattice sum A omega_i."""

    omega: tuple

    @property
    def r(self) -> int:
        return len(self.omega)

    @property
    def ground(self):
        return _ground(self.omega[0])

    def logs(self) -> list[Fraction]:
        return [value_part(w).logq_abs() for w in self.omega]

    def rebase(self, g) -> "ALatticeFrame":
        return ALatticeFrame(tuple(w.rebase(g) for w in self.omega))

    def lift(self, active: int | None) -> "ALatticeFrame":
        """Dual-number frame with d/d omega_active as the derivative direction."""
        g = self.ground
        out = []
        for i, w in enumerate(self.omega):
            der = PuiseuxNumber.one(g) if i == active else PuiseuxNumber.zero(g)
            out.append(DualNumber(w, der))
        return ALatticeFrame(tuple(out))

    def to_dict(self) -> dict:
        return {"omega": [value_part(w).to_dict() for w in self.omega]}

    @classmethod
    def from_dict(cls, g, obj: dict) -> "ALatticeFrame":
        return cls(tuple(PuiseuxNumber.from_dict(g, w) for w in obj["omega"]))


# -- enumeration --

def span(basis, with_coords: bool = False):
    """All q^n elements of the F_q-span, zero first.

    With ``with_coords`` the result is a list of (coordinate codes, element).
    """
    if not basis:
        return []
    g = _ground(basis[0])
    q = g.q
    if q ** len(basis) > ENUMERATION_LIMIT:
        raise UnsupportedParams(f"q^n = {q}^{len(basis)} is too large to enumerate")
    zero = PuiseuxNumber.zero(g)
    if isinstance(basis[0], DualNumber):
        zero = DualNumber(zero)
    elems = [((), zero)]
    for b in basis:
        multiples = [fq_scale(b, c) for c in range(q)]
        elems = [(co + (c,), x if c == 0 else x + multiples[c])
                 for co, x in elems for c in range(q)]
    elems.sort(key=lambda t: tuple(reversed(t[0])))
    return elems if with_coords else [x for _, x in elems]


# -- successive minimum bases --

def _fq_ratio(g, a: int, b: int) -> int:
    """a / b in F_q, by codes."""
    Fq = g.Fq
    return Fq.to_code(Fq.mul(Fq.from_code(a), Fq.inv(Fq.from_code(b))))


def smb_finite(gens) -> FiniteLattice:
    """Orthogonalize generators into an ordered successive minimum basis.

    Equal-valuation blocks whose leading residues are F_q-dependent are
    reduced: the member of the relation with the largest original index is
    replaced by the combination, which has strictly larger valuation.
    """
    gens = list(gens)
    if not gens:
        return FiniteLattice((), True)
    g = gens[0].ground
    items = []
    for i, x in enumerate(gens):
        if x.is_zero():
            raise DependentGenerators("zero generator")
        if not x.has_visible():
            raise PrecisionExhausted("generator has no visible term")
        items.append((x, i))
    while True:
        items.sort(key=lambda t: (-t[0].start, t[1]))
        replaced = False
        for _, block in itertools.groupby(items, key=lambda t: t[0].start):
            block = list(block)
            if len(block) < 2:
                continue
            rel = g.fq_relation(np.array([x.lead() for x, _ in block]))
            if rel is None:
                continue
            pos = max((idx, k) for k, ((_, idx), c) in enumerate(zip(block, rel)) if c)[1]
            pivot = rel[pos]
            combo = None
            for (x, _), c in zip(block, rel):
                if c:
                    term = fq_scale(x, _fq_ratio(g, c, pivot))
                    combo = term if combo is None else combo + term
            if combo.is_zero():
                raise DependentGenerators("generators are F_q-linearly dependent")
            if not combo.has_visible():
                raise PrecisionExhausted("reduction exhausted the working precision")
            target = block[pos][1]
            items = [(combo, idx) if idx == target else (x, idx) for x, idx in items]
            replaced = True
            break
        if not replaced:
            return FiniteLattice(tuple(x for x, _ in items), True)


def is_orthogonal(basis) -> bool:
    """Leading residues F_q-independent within every valuation level."""
    g = _ground(basis[0])
    vals = [value_part(b) for b in basis]
    levels = {}
    for v in vals:
        levels.setdefault(v.start, []).append(v.lead())
    return all(g.fq_independent(np.array(leads)) for leads in levels.values() if len(leads) > 1)


# -- exponentials of finite lattices --

def _one_like(x):
    g = _ground(x)
    one = PuiseuxNumber.one(g)
    return DualNumber(one) if isinstance(x, DualNumber) else one


def exp_extend(alpha: list, lam) -> list:
    """Coefficients of e_{V + F lam} from those of e_V.

    Uses e_{V + F lam} = (1 - c tau) e_V with c = e_V(lam)^(1 - q).
    """
    g = _ground(lam)
    image = tau_eval(TauPoly(alpha), lam)
    val = value_part(image)
    if val.is_zero():
        raise DependentGenerators("new generator lies in the lattice")
    if not val.has_visible():
        raise PrecisionExhausted("image of the new generator is not visible")
    c = image ** (1 - g.q)
    out = [alpha[0]]
    for k in range(1, len(alpha)):
        out.append(alpha[k] - c * alpha[k - 1].q_power(1))
    out.append(-(c * alpha[-1].q_power(1)))
    return out


def exp_recursive(basis) -> list:
    alpha = [_one_like(basis[0])] if basis else []
    for lam in basis:
        alpha = exp_extend(alpha, lam)
    return alpha


def product_polynomial(basis) -> list:
    """Coefficients (by X-degree) of prod over lattice elements of (X - lambda)."""
    elems = span(basis)
    g = _ground(basis[0])
    zero = PuiseuxNumber.zero(g)
    poly = [zero, PuiseuxNumber.one(g)]
    for lam in elems[1:]:
        nxt = [-(lam * poly[0])]
        for i in range(1, len(poly)):
            nxt.append(poly[i - 1] - lam * poly[i])
        nxt.append(poly[-1])
        poly = nxt
    return poly


def exp_finite(V: FiniteLattice, method: str = "auto") -> TauPoly:
    """e_V = sum_{i <= n} alpha_i tau^i with alpha_0 = 1."""
    if V.dim == 0:
        raise UnsupportedParams("the zero lattice needs a ground; use TauPoly([1])")
    g = V.ground
    if method == "auto":
        method = "product" if g.q**V.dim <= PRODUCT_LIMIT else "recursive"
    if method == "recursive":
        return TauPoly(exp_recursive(list(V.basis)))
    gamma = gamma_from_product(V)
    return TauPoly([PuiseuxNumber.one(g)] + [c / gamma[0] for c in gamma[1:]])


def gamma_from_product(V: FiniteLattice) -> list:
    poly = product_polynomial(list(V.basis))
    return [poly[V.ground.q**k] for k in range(V.dim + 1)]


def gamma_coeffs(V: FiniteLattice) -> list:
    """Coefficients gamma_k of the monic product prod (X - lambda) = sum gamma_k X^(q^k)."""
    g = V.ground
    if g.q**V.dim <= PRODUCT_LIMIT:
        return gamma_from_product(V)
    alpha = exp_recursive(list(V.basis))
    top = alpha[-1]
    return [a / top for a in alpha[:-1]] + [PuiseuxNumber.one(g)]


def eisenstein_finite(V: FiniteLattice, k: int):
    """sum over nonzero lambda in V of lambda^(-k); -1 when k = 0."""
    g = V.ground
    if k == 0:
        return PuiseuxNumber.const(g, -1)
    acc = PuiseuxNumber.zero(g)
    for lam in span(list(V.basis))[1:]:
        acc = acc + lam.inverse() ** k
    return acc


# -- A-lattices --

def truncation_basis(frame: ALatticeFrame, d: int, first: int = 0) -> list:
    """Elements T^j omega_i for first <= j < d, in increasing log order.

    Ties are broken by larger index i first, as in the ordering (j, i) < (j', i')
    when x_i + j < x_i' + j' or equal with i > i'.
    """
    g = frame.ground
    T = PuiseuxNumber.T(g)
    logs = frame.logs()
    keyed = []
    for j in range(first, d):
        Tj = T**j
        for i, w in enumerate(frame.omega):
            keyed.append(((logs[i] + j, -i), Tj * w))
    keyed.sort(key=lambda t: t[0])
    return [x for _, x in keyed]


def truncate_a_lattice(frame: ALatticeFrame, d: int) -> FiniteLattice:
    if d < 1:
        raise UnsupportedParams("truncation degree must be positive")
    return FiniteLattice(tuple(truncation_basis(frame, d)), True)


def torsion_basis(frame: ALatticeFrame, dmax: int = 12) -> list:
    """(mu_1, ..., mu_r) with mu_i = e_omega(omega_i / T), stabilized in the truncation degree."""
    g = frame.ground
    T = PuiseuxNumber.T(g)
    targets = [w / T for w in frame.omega]
    alpha = [PuiseuxNumber.one(g)]
    prev = None
    for d in range(1, dmax + 1):
        for lam in truncation_basis(frame, d, d - 1):
            alpha = exp_extend(alpha, lam)
        values = [tau_eval(TauPoly(alpha), z) for z in targets]
        if prev is not None and all(a.agrees(b) for a, b in zip(values, prev)):
            for v in values:
                if not v.has_visible():
                    raise PrecisionExhausted("torsion point lost all precision")
            return values
        prev = values
    raise PrecisionExhausted("torsion points did not stabilize")


def moore_sums(V: FiniteLattice, count: int) -> list:
    """M(phi_j) = sum over nonzero lambda = sum a_i lambda_i of a_j / lambda, j = 1..count."""
    g = V.ground
    sums = [PuiseuxNumber.zero(g) for _ in range(count)]
    for coords, lam in span(list(V.basis), with_coords=True)[1:]:
        inv = lam.inverse()
        for j in range(count):
            if coords[j]:
                sums[j] = sums[j] + fq_scale(inv, coords[j])
    return sums


def determinant(matrix):
    """Leibniz expansion; entries support + and *."""
    n = len(matrix)
    total = None
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = matrix[0][perm[0]]
        for i in range(1, n):
            term = term * matrix[i][perm[i]]
        if inversions % 2:
            term = -term
        total = term if total is None else total + term
    return total


def moore_det(V: FiniteLattice, rprime: int):
    """det over 1 <= i, j <= r' of M(phi_j)^(q^i)."""
    if not 1 <= rprime <= V.dim:
        raise UnsupportedParams("need 1 <= r' <= dim V")
    sums = moore_sums(V, rprime)
    return determinant([[s.q_power(i) for s in sums] for i in range(1, rprime + 1)])


def elementary_symmetric(values, kmax: int) -> list:
    """e_0, ..., e_kmax of the given values, by expanding prod (1 + v X)."""
    g = _ground(values[0])
    coeffs = [PuiseuxNumber.one(g)]
    for v in values:
        nxt = list(coeffs) + ([PuiseuxNumber.zero(g)] if len(coeffs) <= kmax else [])
        for k in range(1, len(nxt)):
            nxt[k] = nxt[k] + v * coeffs[k - 1]
        coeffs = nxt
    return coeffs + [PuiseuxNumber.zero(g)] * (kmax + 1 - len(coeffs))


def reduce_frame_check(frame: ALatticeFrame) -> None:
    for w in frame.omega:
        v = value_part(w)
        if v.is_zero():
            raise DivisionByZero("zero frame entry")
        if not v.has_visible():
            raise IndeterminateValuation("frame entry has no visible term")
