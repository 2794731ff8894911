"""Truncated Puiseux series in u = T^(-1/e) over F_{q^m}, and dual numbers.

A ``PuiseuxNumber`` is sum_k c_k u^k for start <= k < start + len(coeffs),
known modulo u^prec (``prec`` is None for exact values).  Inexact results are
kept to at most N terms past their leading exponent, so N acts as a relative
precision cap.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .errors import DivisionByZero, IndeterminateValuation, UsageError
from .scalars import Ground, GroundParams, PolyA, RatK, eval_literal, ground as make_ground

EXACT_LENGTH_LIMIT = 16


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class PuiseuxNumber:
    __slots__ = ("ground", "start", "coeffs", "prec")

    def __init__(self, ground: Ground, start: int, coeffs, prec: int | None = None):
        n = ground.n
        arr = np.asarray(coeffs, dtype=np.int64).reshape(-1, n) % ground.p
        start = int(start)
        if prec is not None:
            prec = int(prec)
            keep = prec - start
            if keep < len(arr):
                arr = arr[: max(keep, 0)]
        nz = np.nonzero(arr.any(axis=1))[0]
        if len(nz) == 0:
            self.ground, self.coeffs, self.prec = ground, arr[:0], prec
            self.start = prec if prec is not None else 0
            return
        start += int(nz[0])
        arr = arr[nz[0]: nz[-1] + 1]
        if prec is None and len(arr) > EXACT_LENGTH_LIMIT * ground.N:
            prec = start + len(arr)
        if prec is not None:
            prec = min(prec, start + ground.N)
            if prec - start < len(arr):
                arr = arr[: prec - start]
                nz = np.nonzero(arr.any(axis=1))[0]
                arr = arr[: nz[-1] + 1]
        self.ground, self.start, self.coeffs, self.prec = ground, start, arr, prec

    # -- constructors --
    @classmethod
    def zero(cls, g: Ground, prec: int | None = None) -> "PuiseuxNumber":
        return cls(g, 0 if prec is None else prec, np.zeros((0, g.n)), prec)

    @classmethod
    def monomial(cls, g: Ground, exponent: int, digits=None) -> "PuiseuxNumber":
        d = g.F.one() if digits is None else np.asarray(digits)
        return cls(g, exponent, d[None, :])

    @classmethod
    def const(cls, g: Ground, c: int) -> "PuiseuxNumber":
        return cls.monomial(g, 0, (c % g.p) * g.F.one())

    @classmethod
    def one(cls, g: Ground) -> "PuiseuxNumber":
        return cls.monomial(g, 0)

    @classmethod
    def T(cls, g: Ground) -> "PuiseuxNumber":
        return cls.monomial(g, -g.e)

    @classmethod
    def u(cls, g: Ground) -> "PuiseuxNumber":
        return cls.monomial(g, 1)

    @classmethod
    def w(cls, g: Ground) -> "PuiseuxNumber":
        return cls.monomial(g, 0, g.F.gen())

    @classmethod
    def fq(cls, g: Ground, code: int) -> "PuiseuxNumber":
        """The F_q element with the given code, as a constant."""
        return cls.monomial(g, 0, g.fq_in_F[code])

    @classmethod
    def from_code(cls, g: Ground, code: int, exponent: int = 0) -> "PuiseuxNumber":
        return cls.monomial(g, exponent, g.F.from_code(code))

    @classmethod
    def from_poly(cls, g: Ground, a: PolyA) -> "PuiseuxNumber":
        if a.is_zero():
            return cls.zero(g)
        d = a.deg()
        digits = (a.coeffs @ g.embedding) % g.p
        arr = np.zeros((g.e * d + 1, g.n), dtype=np.int64)
        arr[:: g.e] = digits[::-1]
        return cls(g, -g.e * d, arr)

    @classmethod
    def from_rat(cls, g: Ground, x: RatK) -> "PuiseuxNumber":
        return cls.from_poly(g, x.num) / cls.from_poly(g, x.den)

    @classmethod
    def from_terms(cls, g: Ground, terms, prec: int | None = None) -> "PuiseuxNumber":
        """Build from (exponent, code) pairs."""
        terms = [(int(k), int(c)) for k, c in terms]
        if not terms:
            return cls.zero(g, prec)
        lo = min(k for k, _ in terms)
        hi = max(k for k, _ in terms)
        arr = np.zeros((hi - lo + 1, g.n), dtype=np.int64)
        for k, c in terms:
            arr[k - lo] = (arr[k - lo] + g.F.from_code(c)) % g.p
        return cls(g, lo, arr, prec)

    @classmethod
    def parse(cls, g: Ground, text: str) -> "PuiseuxNumber":
        """Parse a literal in T, u, w with + - * / ^ and integers."""
        names = {"T": cls.T(g), "u": cls.u(g), "w": cls.w(g)}
        out = eval_literal(text, names, lambda c: cls.const(g, c))
        if isinstance(out, int):
            out = cls.const(g, out)
        return out

    @classmethod
    def random(cls, g: Ground, rng: np.random.Generator, start: int, length: int,
               prec: int | None = None, unit_lead: bool = True) -> "PuiseuxNumber":
        arr = rng.integers(0, g.p, size=(length, g.n))
        if unit_lead:
            while not arr[0].any():
                arr[0] = rng.integers(0, g.p, size=g.n)
        return cls(g, start, arr, prec)

    # -- inspection --
    @property
    def e(self) -> int:
        return self.ground.e

    def is_exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        """Exact zero."""
        return self.prec is None and len(self.coeffs) == 0

    def has_visible(self) -> bool:
        return len(self.coeffs) > 0

    def order(self):
        """Lower bound for the u-adic order: leading exponent, or prec if nothing is visible."""
        if len(self.coeffs):
            return self.start
        return float("inf") if self.prec is None else self.prec

    def valuation(self) -> Fraction:
        if not len(self.coeffs):
            raise IndeterminateValuation("no nonzero term within precision")
        return Fraction(self.start, self.ground.e)

    def logq_abs(self) -> Fraction:
        return -self.valuation()

    def lead(self) -> np.ndarray:
        if not len(self.coeffs):
            raise IndeterminateValuation("no nonzero term within precision")
        return self.coeffs[0]

    def lead_code(self) -> int:
        return self.ground.F.to_code(self.lead())

    def coefficient(self, k: int) -> np.ndarray:
        if self.prec is not None and k >= self.prec:
            raise IndeterminateValuation(f"u^{k} lies beyond precision {self.prec}")
        i = k - self.start
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.ground.F.zero()

    def terms(self) -> list[tuple[int, int]]:
        codes = self.ground.F.to_code(self.coeffs) if len(self.coeffs) else []
        return [(self.start + i, int(c)) for i, c in enumerate(codes) if c]

    def relative_precision(self):
        if self.prec is None:
            return float("inf")
        return self.prec - self.order()

    def floor(self) -> Fraction:
        """Exponent beyond which a value counts as vanishing (in u-units)."""
        return Fraction(self.ground.N, 2)

    def is_negligible(self) -> bool:
        """True when the value is zero up to the vanishing floor.

        Every visible term must lie strictly beyond u^(N/2), i.e. have log
        below -(N/e)/2; a value with nothing visible needs prec past the floor.
        """
        floor = self.floor()
        if len(self.coeffs):
            return self.start > floor
        return self.prec is None or self.prec > floor

    # -- arithmetic --
    def _coerce(self, other):
        if isinstance(other, PuiseuxNumber):
            return other
        if isinstance(other, (int, np.integer)):
            return PuiseuxNumber.const(self.ground, int(other))
        if isinstance(other, PolyA):
            return PuiseuxNumber.from_poly(self.ground, other)
        if isinstance(other, RatK):
            return PuiseuxNumber.from_rat(self.ground, other)
        return NotImplemented

    def __add__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        x = self
        g = x.ground
        prec = _min_prec(x.prec, y.prec)
        parts = [v for v in (x, y) if len(v.coeffs)]
        if not parts:
            return PuiseuxNumber.zero(g, prec)
        lo = min(v.start for v in parts)
        hi = max(v.start + len(v.coeffs) for v in parts)
        if prec is None and hi - lo > EXACT_LENGTH_LIMIT * g.N:
            prec = lo + g.N
        if prec is not None:
            hi = min(hi, prec)
        if hi <= lo:
            return PuiseuxNumber.zero(g, prec)
        out = np.zeros((hi - lo, g.n), dtype=np.int64)
        for v in parts:
            a = v.start - lo
            b = min(a + len(v.coeffs), hi - lo)
            if b > a:
                out[a:b] += v.coeffs[: b - a]
        return PuiseuxNumber(g, lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxNumber(self.ground, self.start, -self.coeffs, self.prec)

    def __sub__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return self + (-y)

    def __rsub__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return y + (-self)

    def __mul__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        x = self
        g = x.ground
        if x.is_zero() or y.is_zero():
            return PuiseuxNumber.zero(g)
        px = float("inf") if x.prec is None else x.prec
        py = float("inf") if y.prec is None else y.prec
        bound = min(px + y.order(), py + x.order())
        prec = None if bound == float("inf") else int(bound)
        if not len(x.coeffs) or not len(y.coeffs):
            return PuiseuxNumber.zero(g, prec)
        start = x.start + y.start
        limit = len(x.coeffs) + len(y.coeffs) - 1
        if prec is not None:
            limit = min(limit, prec - start, g.N)
            if limit <= 0:
                return PuiseuxNumber.zero(g, prec)
        prod = g.F.polymul(x.coeffs[:limit], y.coeffs[:limit])[:limit]
        return PuiseuxNumber(g, start, prod, prec)

    __rmul__ = __mul__

    def scale(self, digits) -> "PuiseuxNumber":
        """Multiply by a constant of F_{q^m} given by digits."""
        if not len(self.coeffs):
            return self
        mat = self.ground.F.mul_matrix(digits)
        return PuiseuxNumber(self.ground, self.start, (self.coeffs @ mat) % self.ground.p, self.prec)

    def shift(self, k: int) -> "PuiseuxNumber":
        """Multiply by u^k."""
        prec = None if self.prec is None else self.prec + k
        return PuiseuxNumber(self.ground, self.start + k, self.coeffs, prec)

    def inverse(self) -> "PuiseuxNumber":
        g = self.ground
        if self.is_zero():
            raise DivisionByZero("division by exact zero")
        if not len(self.coeffs):
            raise IndeterminateValuation("divisor has no visible term")
        F = g.F
        a = self.start
        lead_inv = F.inv(self.coeffs[0])
        mat = F.mul_matrix(lead_inv)
        if self.prec is None and len(self.coeffs) == 1:
            return PuiseuxNumber(g, -a, lead_inv[None, :])
        rel = g.N if self.prec is None else min(g.N, self.prec - a)
        unit = (self.coeffs[:rel] @ mat) % g.p
        inv = _unit_inverse(F, unit, rel)
        return PuiseuxNumber(g, -a, (inv @ mat) % g.p, rel - a)

    def __truediv__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return self * y.inverse()

    def __rtruediv__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return y * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        q = self.ground.q
        result = PuiseuxNumber.one(self.ground)
        j = 0
        while k:
            k, d = divmod(k, q)
            if d:
                base = self.q_power(j)
                for _ in range(d):
                    result = result * base
            j += 1
        return result

    def q_power(self, j: int) -> "PuiseuxNumber":
        """z^(q^j): Frobenius on coefficients, exponents and precision scaled by q^j."""
        if j == 0:
            return self
        g = self.ground
        step = g.q**j
        prec = None if self.prec is None else self.prec * step
        if not len(self.coeffs):
            return PuiseuxNumber.zero(g, prec)
        start = self.start * step
        count = len(self.coeffs)
        if prec is None and (count - 1) * step >= EXACT_LENGTH_LIMIT * g.N:
            prec = start + g.N
        if prec is not None:
            cap = min(prec, start + g.N)
            count = min(count, -(-(cap - start) // step))
        coeffs = (self.coeffs[:count] @ g.frob_matrix(j)) % g.p
        arr = np.zeros(((count - 1) * step + 1, g.n), dtype=np.int64)
        arr[::step] = coeffs
        return PuiseuxNumber(g, start, arr, prec)

    def truncate(self, prec: int) -> "PuiseuxNumber":
        """Forget terms from u^prec on."""
        return PuiseuxNumber(self.ground, self.start, self.coeffs, _min_prec(self.prec, prec))

    def rebase(self, g: Ground) -> "PuiseuxNumber":
        """The same value over another ground with identical p, s, m, e."""
        return PuiseuxNumber(g, self.start, self.coeffs, self.prec)

    # -- comparison --
    def agrees(self, other) -> bool:
        """True when the difference has no visible term."""
        return not (self - other).has_visible()

    def __eq__(self, other):
        if not isinstance(other, PuiseuxNumber):
            return NotImplemented
        return (self.ground is other.ground and self.start == other.start
                and self.prec == other.prec and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.start, self.prec, self.coeffs.tobytes()))

    def __repr__(self):
        shown = self.terms()[:6]
        body = " + ".join(f"[{c}]u^{k}" for k, c in shown) or "0"
        if len(self.terms()) > 6:
            body += " + ..."
        tail = "" if self.prec is None else f" + O(u^{self.prec})"
        return f"<{body}{tail}>"

    # -- serialization --
    def to_dict(self) -> dict:
        return {
            "e": self.ground.e,
            "m": self.ground.m,
            "prec": self.prec,
            "terms": [[k, str(c)] for k, c in self.terms()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, g: Ground, obj: dict) -> "PuiseuxNumber":
        if obj.get("e") != g.e or obj.get("m") != g.m:
            raise UsageError("serialized series does not match the ground parameters")
        exps = [int(k) for k, _ in obj["terms"]]
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise UsageError("series exponents must be strictly increasing")
        return cls.from_terms(g, [(k, int(c)) for k, c in obj["terms"]], obj["prec"])

    @classmethod
    def from_json(cls, g: Ground, text: str) -> "PuiseuxNumber":
        return cls.from_dict(g, json.loads(text))


def _unit_inverse(F, unit: np.ndarray, rel: int) -> np.ndarray:
    """Inverse of a power series with constant term 1, modulo u^rel (Newton iteration)."""
    inv = np.zeros((1, F.n), dtype=np.int64)
    inv[0, 0] = 1
    have = 1
    while have < rel:
        nxt = min(2 * have, rel)
        w = F.polymul(unit[:nxt], inv)[:nxt]
        w = (-w) % F.p
        w[0, 0] = (w[0, 0] + 2) % F.p
        inv = F.polymul(inv, w)[:nxt]
        have = nxt
    return inv[:rel]


def series_ground(p: int, s: int = 1, m: int = 1, e: int = 1, N: int = 240) -> Ground:
    """Convenience constructor for a cached computation context."""
    return make_ground(GroundParams(p, s, m, e, N))


class DualNumber:
    """val + der * eps with eps^2 = 0."""

    __slots__ = ("val", "der")

    def __init__(self, val: PuiseuxNumber, der: PuiseuxNumber | None = None):
        self.val = val
        self.der = PuiseuxNumber.zero(val.ground) if der is None else der

    @property
    def ground(self) -> Ground:
        return self.val.ground

    def _coerce(self, other):
        if isinstance(other, DualNumber):
            return other
        v = self.val._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return DualNumber(v)

    def __add__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return DualNumber(self.val + y.val, self.der + y.der)

    __radd__ = __add__

    def __neg__(self):
        return DualNumber(-self.val, -self.der)

    def __sub__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return DualNumber(self.val - y.val, self.der - y.der)

    def __rsub__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return y - self

    def __mul__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return DualNumber(self.val * y.val, self.val * y.der + self.der * y.val)

    __rmul__ = __mul__

    def inverse(self) -> "DualNumber":
        inv = self.val.inverse()
        return DualNumber(inv, -(self.der * inv * inv))

    def __truediv__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return self * y.inverse()

    def __rtruediv__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return y * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return DualNumber(PuiseuxNumber.one(self.ground))
        p = self.ground.p
        val = self.val**k
        if k % p == 0:
            return DualNumber(val)
        return DualNumber(val, (k % p) * (self.val ** (k - 1)) * self.der)

    def q_power(self, j: int) -> "DualNumber":
        if j == 0:
            return self
        return DualNumber(self.val.q_power(j))

    def agrees(self, other) -> bool:
        y = self._coerce(other)
        return self.val.agrees(y.val) and self.der.agrees(y.der)

    def has_visible(self) -> bool:
        return self.val.has_visible() or self.der.has_visible()

    def logq_abs(self) -> Fraction:
        return self.val.logq_abs()

    def is_negligible(self) -> bool:
        return self.val.is_negligible()

    def __repr__(self):
        return f"Dual({self.val!r}, {self.der!r})"


def dual_lift(z: PuiseuxNumber, active: bool) -> DualNumber:
    g = z.ground
    return DualNumber(z, PuiseuxNumber.one(g) if active else PuiseuxNumber.zero(g))


def value_part(x):
    return x.val if isinstance(x, DualNumber) else x
