"""Values of modular forms at a frame: alpha_k, beta_k, E_k, g_k, coefficient forms."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (IllDefinedExponent, NotInFk, PrecisionExhausted, TruncationNotStabilized,
                     UnsupportedParams, ZeroCarlitzCoefficient)
from .lattice import ALatticeFrame, _one_like, determinant, exp_extend, truncation_basis
from .scalars import Ground, PolyA, RatK, bracket, carlitz_coeffs, d_factor
from .series import DualNumber, PuiseuxNumber, value_part
from .tau import TauPoly, tau_inverse, tau_mul

DEFAULT_DCAP = 12


@dataclass
class FormsProfile:
    frame: ALatticeFrame
    kmax: int
    d_used: int
    alpha: tuple
    beta: tuple
    g: tuple
    closure_ok: bool = True
    history: list = field(default_factory=list, repr=False)

    @property
    def ground(self) -> Ground:
        return self.frame.ground

    def eisenstein(self, j: int):
        """E_{q^j - 1} = -beta_j."""
        return -self.beta[j]

    @property
    def delta(self):
        return self.g[-1]

    def to_dict(self) -> dict:
        def enc(x):
            v = value_part(x)
            out = v.to_dict()
            out["log"] = str(v.logq_abs()) if v.has_visible() else None
            return out
        return {
            "frame": self.frame.to_dict(),
            "kmax": self.kmax,
            "d_used": self.d_used,
            "alpha": [enc(a) for a in self.alpha],
            "beta": [enc(b) for b in self.beta],
            "g": [enc(x) for x in self.g],
        }


def alpha_series(frame: ALatticeFrame, kmax: int | None = None,
                 dcap: int = DEFAULT_DCAP) -> FormsProfile:
    """alpha_0..alpha_kmax of e_omega by stabilizing exponentials of truncations.

    Truncation levels grow one T-degree at a time (reusing the previous
    exponential) until alpha_0..alpha_kmax agree at two consecutive degrees.
    """
    r = frame.r
    kmax = max(kmax or r, r)
    g = frame.ground
    alpha = [_one_like(frame.omega[0])]
    prev = None
    history = []
    d = 0
    while True:
        d += 1
        if d > dcap:
            raise TruncationNotStabilized(f"no stabilization up to truncation degree {dcap}")
        for lam in truncation_basis(frame, d, d - 1):
            alpha = exp_extend(alpha, lam)
        if r * d <= kmax:
            continue
        cur = alpha[: kmax + 1]
        history.append(d)
        if prev is not None and all(a.agrees(b) for a, b in zip(cur, prev)):
            break
        prev = cur
    alpha = cur
    beta = tau_inverse(TauPoly(alpha), kmax).coeffs
    T = PuiseuxNumber.T(g)
    gs = [T]
    for k in range(1, r + 1):
        acc = _bracket_T(g, k) * alpha[k]
        for i in range(1, k):
            acc = acc - gs[i] * alpha[k - i].q_power(i)
        gs.append(acc)
    closure = True
    for k in range(r + 1, kmax + 1):
        rhs = None
        for i in range(1, r + 1):
            term = gs[i] * alpha[k - i].q_power(i)
            rhs = term if rhs is None else rhs + term
        if (rhs - _bracket_T(g, k) * alpha[k]).has_visible():
            closure = False
    for x in gs[1:]:
        if not value_part(x).has_visible() and not value_part(x).is_negligible():
            raise PrecisionExhausted("a coefficient form lost all precision")
    return FormsProfile(frame, kmax, d, tuple(alpha), tuple(beta), tuple(gs), closure, history)


def _bracket_T(g: Ground, k: int) -> PuiseuxNumber:
    return PuiseuxNumber.from_poly(g, bracket(PolyA.T(g.q), k))


def poly_to_series(g: Ground, a: PolyA) -> PuiseuxNumber:
    return PuiseuxNumber.from_poly(g, a)


def coefficient_forms(profile: FormsProfile, a: PolyA) -> list:
    """Coefficients of phi_a = sum_i a_i phi_T^i, by Horner's rule in the tau-ring."""
    if a.deg() < 1:
        raise UnsupportedParams("a must be nonconstant")
    g = profile.ground
    phi_T = TauPoly(profile.g)
    consts = [_embed_fq_digits(g, row) for row in a.coeffs]
    acc = TauPoly([_like(profile.g[1], consts[-1])])
    for c in reversed(consts[:-1]):
        acc = tau_mul(acc, phi_T)
        acc = TauPoly([acc[0] + c] + list(acc.coeffs[1:]))
    return list(acc.coeffs)


def _embed_fq_digits(g: Ground, digits) -> PuiseuxNumber:
    return PuiseuxNumber.monomial(g, 0, (np.asarray(digits) @ g.embedding) % g.p)


def _like(template, x):
    return DualNumber(x) if isinstance(template, DualNumber) else x


@functools.lru_cache(maxsize=None)
def _pibar_base(g: Ground) -> PuiseuxNumber:
    one = PuiseuxNumber.one(g)
    prof = alpha_series(ALatticeFrame((one,)), kmax=1)
    return _bracket_T(g, 1) * prof.alpha[1]


def pibar_power(g: Ground, j: int) -> PuiseuxNumber:
    """pibar^j for j divisible by q - 1, with pibar^(q-1) = [T,1] alpha_1(A)."""
    if j % (g.q - 1):
        raise IllDefinedExponent(f"exponent {j} is not divisible by q - 1 = {g.q - 1}")
    if j == 0:
        return PuiseuxNumber.one(g)
    return _pibar_base(g) ** (j // (g.q - 1))


def normalize_forms(profile: FormsProfile, a: PolyA, k: int):
    """(l~_k, alpha~_k) = pibar^(1-q^k) (c_k^-1 l_k, D_k alpha_k)."""
    g = profile.ground
    ck = carlitz_coeffs(a)
    if k > a.deg():
        raise ZeroCarlitzCoefficient(f"Carlitz coefficient {k} of a degree {a.deg()} polynomial")
    if k > profile.kmax:
        raise UnsupportedParams("profile does not reach order k")
    ell = coefficient_forms(profile, a)
    scale = pibar_power(g, 1 - g.q**k)
    ell_t = scale * ell[k] / poly_to_series(g, ck[k])
    alpha_t = scale * poly_to_series(g, d_factor(k, g.q)) * profile.alpha[k]
    return ell_t, alpha_t


def carlitz_ratio_valuation(q: int, k: int, d: int):
    """v(1 - D_k c_k / [a, k]) for a = T^d, exactly in K (infinity when zero)."""
    a = PolyA.T(q) ** d
    ratio = RatK(d_factor(k, q) * carlitz_coeffs(a)[k], bracket(a, k))
    return (1 - ratio).valuation()


@dataclass
class ConvergenceRow:
    d: int
    v_diff: Fraction | None
    v_carlitz: object
    prec: int | None


def convergence_report(profile: FormsProfile, k: int, degrees) -> list[ConvergenceRow]:
    """Valuations of l~_k - alpha~_k for a = T^d, with the exact companion column."""
    frame = profile.frame
    g = profile.ground
    if frame.r >= 2 and frame.logs()[frame.r - 2] < k:
        raise NotInFk(f"log omega_(r-1) = {frame.logs()[frame.r - 2]} < {k}")
    rows = []
    for d in degrees:
        a = PolyA.T(g.q) ** d
        ell_t, alpha_t = normalize_forms(profile, a, k)
        diff = ell_t - alpha_t
        v = None if diff.is_negligible() else diff.valuation()
        rows.append(ConvergenceRow(d, v, carlitz_ratio_valuation(g.q, k, d), diff.prec))
    return rows


# -- direct Eisenstein sums --

def _spread(F, frob, arr: np.ndarray, step: int, length: int) -> np.ndarray:
    """Rows of arr (B, L, n) Frobenius-twisted and spread to exponents i*step, cut at length."""
    count = min(arr.shape[1], -(-length // step))
    out = np.zeros((arr.shape[0], length, arr.shape[2]), dtype=np.int64)
    out[:, : count * step: step] = (arr[:, :count] @ frob) % F.p
    return out


def _batch_unit_inverse(F, unit: np.ndarray, rel: int) -> np.ndarray:
    batch = unit.shape[0]
    inv = np.zeros((batch, 1, F.n), dtype=np.int64)
    inv[:, 0, 0] = 1
    have = 1
    while have < rel:
        nxt = min(2 * have, rel)
        w = F.polymul_rows(unit[:, :nxt], inv)[:, :nxt]
        w = (-w) % F.p
        w[:, 0, 0] = (w[:, 0, 0] + 2) % F.p
        inv = F.polymul_rows(inv, w)[:, :nxt]
        have = nxt
    return inv[:, :rel]


def _coefficient_vectors(q: int, below: int, top: int, projective: bool, chunk: int):
    """Yield arrays of F_q-coordinate rows: ``below`` free coordinates then ``top`` coordinates
    not all zero (first nonzero top coordinate equal to 1 when projective)."""
    heads = []
    for t in range(top):
        lead = [1] if projective else list(range(1, q))
        for c in lead:
            rest = np.array(np.meshgrid(*[np.arange(q)] * (top - t - 1), indexing="ij"))
            rest = rest.reshape(top - t - 1, -1).T if top - t - 1 else np.zeros((1, 0), dtype=np.int64)
            h = np.zeros((len(rest), top), dtype=np.int64)
            h[:, t] = c
            h[:, t + 1:] = rest
            heads.append(h)
    heads = np.concatenate(heads)
    total_below = q**below
    for start in range(0, len(heads) * total_below, chunk):
        idx = np.arange(start, min(start + chunk, len(heads) * total_below))
        head = heads[idx // total_below]
        low = idx % total_below
        digits = (low[:, None] // q ** np.arange(below)) % q if below else np.zeros((len(idx), 0), dtype=np.int64)
        yield np.concatenate([digits, head], axis=1)


def eisenstein_direct(frame: ALatticeFrame, k: int, d: int, prec: int | None = None,
                      grouped: bool = True, chunk: int = 4096) -> PuiseuxNumber:
    """sum of (a_1 omega_1 + ... + a_r omega_r)^(-k) over nonzero a with deg a_i < d.

    ``prec`` is the absolute u-adic precision of the result (default N).  With
    ``grouped`` the sum runs over one representative of each F_q*-orbit,
    weighted by sum_c c^(-k); otherwise every element is enumerated.
    """
    if k <= 0:
        raise UnsupportedParams("k must be positive")
    g = frame.ground
    F, q = g.F, g.q
    if q ** (frame.r * d) > 3**12 * 2:
        raise UnsupportedParams("truncated lattice too large to enumerate")
    prec = g.N if prec is None else prec
    basis = truncation_basis(frame, d)
    starts = [b.start for b in basis]
    acc = np.zeros((prec, g.n), dtype=np.int64)
    weight = F.one()
    if grouped:
        wsum = g.F.zero()
        for c in range(1, q):
            wsum = (wsum + F.pow(F.inv(g.fq_in_F[c]), k)) % g.p
        weight = wsum
    digits_k = []
    kk = k
    while kk:
        kk, dig = divmod(kk, q)
        digits_k.append(dig)
    shortcut = (k + 1) == q ** (len(digits_k)) and all(x == q - 1 for x in digits_k)
    # basis sorted by increasing log, i.e. decreasing start; group equal starts
    levels = sorted(set(starts), reverse=True)
    for level in levels:
        top_idx = [t for t, s in enumerate(starts) if s == level]
        below_idx = [t for t, s in enumerate(starts) if s > level]
        offset = -k * level
        rel = prec - offset
        if rel <= 0:
            continue
        for b in (basis[t] for t in top_idx + below_idx):
            if b.prec is not None and b.prec < level + rel:
                raise PrecisionExhausted("frame precision too low for the requested sum")
        mults = []
        for t in below_idx + top_idx:
            dense = np.zeros((rel, g.n), dtype=np.int64)
            b = basis[t]
            lo = b.start - level
            hi = min(lo + len(b.coeffs), rel)
            if hi > lo:
                dense[lo:hi] = b.coeffs[: hi - lo]
            mults.append(np.array([(dense @ F.mul_matrix(g.fq_in_F[c])) % g.p for c in range(q)]))
        level_sum = np.zeros((rel, g.n), dtype=np.int64)
        for coords in _coefficient_vectors(q, len(below_idx), len(top_idx), grouped, chunk):
            lam = np.zeros((len(coords), rel, g.n), dtype=np.int64)
            for col, table in enumerate(mults):
                lam += table[coords[:, col]]
            lam %= g.p
            theta = lam[:, 0]
            theta_inv = F.inv(theta)
            unit = F.mul(lam, theta_inv[:, None, :])
            if shortcut:
                J = len(digits_k)
                need = -(-rel // q**J)
                inv = _batch_unit_inverse(F, unit, need)
                spread = _spread(F, F.frobenius_matrix(g.s * J), inv, q**J, rel)
                body = F.polymul_rows(spread, unit)[:, :rel]
            else:
                inv = _batch_unit_inverse(F, unit, rel)
                body = None
                for j, dig in enumerate(digits_k):
                    if not dig:
                        continue
                    spread = _spread(F, F.frobenius_matrix(g.s * j), inv, q**j, rel)
                    for _ in range(dig):
                        body = spread if body is None else F.polymul_rows(body, spread)[:, :rel]
            coef = F.pow(theta_inv, k)
            contrib = F.mul(body, coef[:, None, :])
            level_sum = (level_sum + contrib.sum(axis=0)) % g.p
        acc[offset: offset + rel] = (acc[offset: offset + rel] + level_sum) % g.p
    acc = F.mul(acc, weight[None, :]) if grouped else acc
    return PuiseuxNumber(g, 0, acc, prec)


# -- functional determinants --

def jacobian_det(frame: ALatticeFrame, family: str, rprime: int, a: PolyA | None = None):
    """det(d f_i / d omega_j) for 1 <= i, j <= r' by dual-number lifts.

    ``family`` is "alpha", "eisenstein" (E_{q^i - 1}) or "coeff" (l_i of ``a``).
    """
    r = frame.r
    if not 1 <= rprime <= r - 1:
        raise UnsupportedParams("need 1 <= r' <= r - 1")
    columns = []
    for j in range(rprime):
        prof = alpha_series(frame.lift(j), kmax=max(rprime, r))
        if family == "alpha":
            vals = [prof.alpha[i] for i in range(1, rprime + 1)]
        elif family == "eisenstein":
            vals = [-prof.beta[i] for i in range(1, rprime + 1)]
        elif family == "coeff":
            ell = coefficient_forms(prof, a)
            vals = [ell[i] for i in range(1, rprime + 1)]
        else:
            raise UnsupportedParams(f"unknown family {family!r}")
        columns.append([v.der for v in vals])
    matrix = [[columns[j][i] for j in range(rprime)] for i in range(rprime)]
    return determinant(matrix)
