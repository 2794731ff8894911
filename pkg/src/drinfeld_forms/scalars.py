"""Finite fields, the polynomial ring A = F_q[T] and its fraction field K.

Field elements are stored as digit vectors over F_p.  An element of
F_{p^n} = F_p[w]/(f) is the vector (d_0, ..., d_{n-1}) of coefficients of
1, w, ..., w^{n-1}; its integer code is sum d_i p^i.  The defining polynomial
f is the primitive monic polynomial of degree n with the smallest code among
its lower coefficients (see ``primitive_modulus``).
"""

from __future__ import annotations

import ast
import functools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.fft

from .errors import DivisionByZero, UnsupportedParams, UsageError, ZeroInput

MAX_P = 7
MAX_Q = 9
MAX_M = 12


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    k = 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def _prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            s, r = 0, q
            while r % p == 0:
                r //= p
                s += 1
            if r != 1:
                raise UnsupportedParams(f"{q} is not a prime power")
            return p, s
    raise UnsupportedParams(f"{q} is not a prime power")


# -- list-based polynomial arithmetic, used only for the modulus search --

def _mulmod(a, b, f, p):
    n = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] = (prod[k - n + i] - c * f[i]) % p
    out = prod[:n]
    return out + [0] * (n - len(out))


def _powmod_x(k, f, p):
    n = len(f) - 1
    result = [1] + [0] * (n - 1)
    base = ([0, 1] + [0] * (n - 2)) if n > 1 else [(-f[0]) % p]
    while k:
        if k & 1:
            result = _mulmod(result, base, f, p)
        base = _mulmod(base, base, f, p)
        k >>= 1
    return result


@functools.lru_cache(maxsize=None)
def primitive_modulus(p: int, n: int) -> tuple[int, ...]:
    """Smallest primitive monic polynomial of degree n over F_p.

    Returned as coefficients (c_0, ..., c_{n-1}, 1).  Candidates are ordered
    by the integer sum c_i p^i.
    """
    order = p**n - 1
    factors = prime_factors(order) if order > 1 else []
    one = [1] + [0] * (n - 1)
    for code in range(p**n):
        low = [(code // p**i) % p for i in range(n)]
        if low[0] == 0:
            continue
        f = low + [1]
        if _powmod_x(order, f, p) != one:
            continue
        if all(_powmod_x(order // ell, f, p) != one for ell in factors):
            return tuple(f)
    raise AssertionError("no primitive polynomial found")


# -- integer convolution kernels --

_DIRECT_LIMIT = 48


def int_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact convolution of small nonnegative integer vectors."""
    la, lb = len(a), len(b)
    if min(la, lb) <= _DIRECT_LIMIT:
        return np.convolve(a, b)
    size = scipy.fft.next_fast_len(la + lb - 1, real=True)
    fa = scipy.fft.rfft(a.astype(np.float64), size)
    fb = scipy.fft.rfft(b.astype(np.float64), size)
    out = scipy.fft.irfft(fa * fb, size)[: la + lb - 1]
    return np.rint(out).astype(np.int64)


def int_convolve_rows(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise exact convolution of two 2-d integer arrays, returned as float64."""
    la, lb = a.shape[-1], b.shape[-1]
    size = scipy.fft.next_fast_len(la + lb - 1, real=True)
    fa = scipy.fft.rfft(a, size, axis=-1)
    fb = scipy.fft.rfft(b, size, axis=-1)
    out = scipy.fft.irfft(fa * fb, size, axis=-1)[..., : la + lb - 1]
    return np.rint(out)


# -- linear algebra over F_p --

def row_reduce(mat: np.ndarray, p: int):
    """Reduced row echelon form of ``mat`` over F_p.

    Returns (rref, pivots, transform) with transform @ mat = rref (mod p).
    """
    a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    t = np.eye(rows, dtype=np.int64)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if len(nz) == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
            t[[r, k]] = t[[k, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        t[r] = (t[r] * inv) % p
        for i in range(rows):
            if i != r and a[i, c]:
                f = a[i, c]
                a[i] = (a[i] - f * a[r]) % p
                t[i] = (t[i] - f * t[r]) % p
        pivots.append(c)
        r += 1
    return a, pivots, t


def rank_mod_p(mat: np.ndarray, p: int) -> int:
    if np.size(mat) == 0:
        return 0
    return len(row_reduce(mat, p)[1])


def left_kernel_mod_p(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of {y : y @ mat = 0 mod p}."""
    rref, pivots, t = row_reduce(mat, p)
    return t[len(pivots):]


class FiniteField:
    """The field F_{p^n} with digit-vector elements."""

    def __init__(self, p: int, n: int):
        self.p = p
        self.n = n
        self.order = p**n
        self.modulus = primitive_modulus(p, n)
        width = 2 * n - 1
        red = np.zeros((width, n), dtype=np.int64)
        cur = np.zeros(n, dtype=np.int64)
        cur[0] = 1
        tail = -np.array(self.modulus[:n], dtype=np.int64) % p
        for i in range(width):
            red[i] = cur
            top = cur[-1]
            cur = np.concatenate([[0], cur[:-1]])
            cur = (cur + top * tail) % p
        self.reduction = red
        pick = np.zeros((n * n, width), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                pick[i * n + j, i + j] = 1
        self._mulflat = (pick @ red) % p
        self._mulflat_f = self._mulflat.astype(np.float64)
        self._reduction_f = red.astype(np.float64)
        self.weights = p ** np.arange(n, dtype=np.int64)
        self._frob = {}

    def __repr__(self):
        return f"FiniteField({self.p}, {self.n})"

    # conversions
    def zero(self) -> np.ndarray:
        return np.zeros(self.n, dtype=np.int64)

    def one(self) -> np.ndarray:
        out = self.zero()
        out[0] = 1
        return out

    def gen(self) -> np.ndarray:
        """The class of w (for n = 1 the primitive root -c_0)."""
        if self.n == 1:
            return np.array([(-self.modulus[0]) % self.p], dtype=np.int64)
        out = self.zero()
        out[1] = 1
        return out

    def from_code(self, code) -> np.ndarray:
        code = np.asarray(code, dtype=np.int64)
        return (code[..., None] // self.weights) % self.p

    def to_code(self, digits):
        codes = np.asarray(digits, dtype=np.int64) @ self.weights
        return int(codes) if np.ndim(codes) == 0 else codes

    # arithmetic on arrays of shape (..., n)
    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.n == 1:
            return (a * b) % self.p
        outer = a[..., :, None].astype(np.float64) * b[..., None, :]
        shape = outer.shape[:-2] + (self.n * self.n,)
        prod = outer.reshape(shape) @ self._mulflat_f
        return np.mod(prod, self.p).astype(np.int64)

    def mul_matrix(self, a) -> np.ndarray:
        """Matrix M with digits(x * a) = digits(x) @ M."""
        return self.mul(np.eye(self.n, dtype=np.int64), np.asarray(a)[None, :])

    def pow(self, a, k: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        result = np.zeros_like(a)
        result[..., 0] = 1
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def inv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(np.all(a == 0, axis=-1)):
            raise DivisionByZero("inverse of zero in a finite field")
        return self.pow(a, self.order - 2)

    def frobenius_matrix(self, k: int) -> np.ndarray:
        """Matrix F with digits(x^(p^k)) = digits(x) @ F."""
        k %= self.n
        if k not in self._frob:
            basis = np.eye(self.n, dtype=np.int64)
            self._frob[k] = self.pow(basis, self.p**k)
        return self._frob[k]

    # polynomials with coefficients in the field, arrays of shape (L, n)
    def polymul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        la, lb = len(a), len(b)
        n = self.n
        if la == 0 or lb == 0:
            return np.zeros((0, n), dtype=np.int64)
        if n == 1:
            return (int_convolve(a[:, 0], b[:, 0]) % self.p)[:, None]
        width = 2 * n - 1
        fa = np.zeros((la, width), dtype=np.int64)
        fa[:, :n] = a
        fb = np.zeros((lb, width), dtype=np.int64)
        fb[:, :n] = b
        length = la + lb - 1
        flat = int_convolve(fa.ravel(), fb.ravel())[: length * width]
        return ((flat.reshape(length, width) % self.p) @ self.reduction) % self.p

    def polymul_rows(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Batched polymul for arrays of shape (B, La, n) and (B, Lb, n).

        Each digit channel is transformed along the series axis; channel
        products and the reduction modulo the field polynomial are done in
        the frequency domain, so only n forward and n inverse transforms
        are needed per operand.
        """
        batch, la, n = a.shape
        lb = b.shape[1]
        length = la + lb - 1
        if n == 1:
            out = int_convolve_rows(a[..., 0].astype(np.float64), b[..., 0].astype(np.float64))
            return np.mod(out, self.p).astype(np.int64)[..., None]
        size = scipy.fft.next_fast_len(length, real=True)
        fa = scipy.fft.rfft(np.ascontiguousarray(a.transpose(0, 2, 1), dtype=np.float64), size, axis=-1)
        fb = scipy.fft.rfft(np.ascontiguousarray(b.transpose(0, 2, 1), dtype=np.float64), size, axis=-1)
        width = 2 * n - 1
        conv = np.empty((batch, width, fa.shape[-1]), dtype=np.complex128)
        for t in range(width):
            lo, hi = max(0, t - n + 1), min(t, n - 1)
            acc = fa[:, lo] * fb[:, t - lo]
            for i in range(lo + 1, hi + 1):
                acc += fa[:, i] * fb[:, t - i]
            conv[:, t] = acc
        red = np.matmul(self._reduction_f.T, conv)
        out = scipy.fft.irfft(red, size, axis=-1)[..., :length]
        return np.mod(np.rint(out), self.p).astype(np.int64).transpose(0, 2, 1)


@functools.lru_cache(maxsize=None)
def finite_field(p: int, n: int) -> FiniteField:
    return FiniteField(p, n)


@dataclass(frozen=True)
class GroundParams:
    """Parameters of a computation: q = p^s, residue degree m, ramification e, precision N."""

    p: int
    s: int = 1
    m: int = 1
    e: int = 1
    N: int = 240

    def __post_init__(self):
        if not is_prime(self.p):
            raise UnsupportedParams(f"p = {self.p} is not prime")
        if self.p > MAX_P:
            raise UnsupportedParams(f"p = {self.p} exceeds {MAX_P}")
        if self.s < 1 or self.p**self.s > MAX_Q:
            raise UnsupportedParams(f"q = {self.p}^{self.s} outside 2..{MAX_Q}")
        if not 1 <= self.m <= MAX_M:
            raise UnsupportedParams(f"m = {self.m} outside 1..{MAX_M}")
        if self.e < 1 or self.N < 1:
            raise UnsupportedParams("e and N must be positive")

    @property
    def q(self) -> int:
        return self.p**self.s

    @classmethod
    def for_q(cls, q: int, m: int = 1, e: int = 1, N: int = 240) -> "GroundParams":
        p, s = _prime_power(q)
        return cls(p, s, m, e, N)


class Ground:
    """Computation context: the fields F_q inside F_{q^m} plus series parameters."""

    def __init__(self, params: GroundParams):
        self.params = params
        self.p, self.s, self.m, self.e, self.N = (
            params.p, params.s, params.m, params.e, params.N)
        self.q = params.q
        self.Fq = finite_field(self.p, self.s)
        self.F = finite_field(self.p, self.s * self.m)
        self.n = self.s * self.m
        gamma = self._fq_generator_image()
        rows = [self.F.one()]
        for _ in range(1, self.s):
            rows.append(self.F.mul(rows[-1], gamma))
        self.embedding = np.array(rows, dtype=np.int64)
        self.fq_in_F = self.embed(np.arange(self.q))
        self.frob = [self.F.frobenius_matrix(self.s * j) for j in range(self.m)]

    def __repr__(self):
        return f"Ground({self.params})"

    def _fq_generator_image(self):
        if self.s == 1:
            return self.F.one()
        F = self.F
        zeta = F.pow(F.gen(), (F.order - 1) // (self.q - 1))
        f = self.Fq.modulus
        x = F.one()
        for _ in range(self.q - 1):
            x = F.mul(x, zeta)
            acc = F.zero()
            for c in reversed(f):
                acc = (F.mul(acc, x) + c * F.one()) % self.p
            if not acc.any():
                return x
        raise AssertionError("F_q does not embed")

    def embed(self, codes) -> np.ndarray:
        """Digits in F_{q^m} of F_q elements given by code."""
        return (self.Fq.from_code(codes) @ self.embedding) % self.p

    def frob_matrix(self, j: int) -> np.ndarray:
        """Matrix of x -> x^(q^j) on F_{q^m}."""
        return self.frob[j % self.m]

    def fq_relation(self, leads: np.ndarray):
        """An F_q-linear relation among the rows of ``leads`` (digits in F_{q^m}).

        Returns a list of F_q codes (not all zero) or None when the rows are
        F_q-independent.
        """
        k = len(leads)
        if k == 0:
            return None
        gpow = [self.F.one()] + [self.embedding[t] for t in range(1, self.s)]
        rows = np.array([self.F.mul(leads[i], gpow[t])
                         for i in range(k) for t in range(self.s)])
        ker = left_kernel_mod_p(rows, self.p)
        if len(ker) == 0:
            return None
        vec = ker[0].reshape(k, self.s)
        return [self.Fq.to_code(v) for v in vec]

    def fq_independent(self, leads: np.ndarray) -> bool:
        return self.fq_relation(leads) is None


@functools.lru_cache(maxsize=None)
def ground(params: GroundParams) -> Ground:
    return Ground(params)


# -- literal expressions --

def eval_literal(text: str, names: dict, const):
    """Evaluate an arithmetic literal with ``+ - * / ^``, parentheses, ints and names."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise UsageError(f"cannot parse {text!r}") from exc

    def integer(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = integer(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult)):
            x, y = integer(node.left), integer(node.right)
            return {ast.Add: x + y, ast.Sub: x - y, ast.Mult: x * y}[type(node.op)]
        raise UsageError(f"exponent must be an integer in {text!r}")

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return const(node.value)
        if isinstance(node, ast.Name) and node.id in names:
            return names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -walk(node.operand)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.UAdd):
            return walk(node.operand)
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                return walk(node.left) ** integer(node.right)
            x, y = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return x + y
            if isinstance(node.op, ast.Sub):
                return x - y
            if isinstance(node.op, ast.Mult):
                return x * y
            if isinstance(node.op, ast.Div):
                return x / y
        raise UsageError(f"unsupported syntax in {text!r}")

    return walk(tree)


# -- the polynomial ring A = F_q[T] --

def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.nonzero(c.any(axis=1))[0]
    return c[: nz[-1] + 1] if len(nz) else c[:0]


class PolyA:
    """Polynomial in T over F_q; coefficients stored as digit rows (lowest degree first)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FiniteField, coeffs):
        self.field = field
        arr = np.asarray(coeffs, dtype=np.int64).reshape(-1, field.n) % field.p
        self.coeffs = _trim(arr)

    @classmethod
    def from_codes(cls, q: int, codes) -> "PolyA":
        p, s = _prime_power(q)
        field = finite_field(p, s)
        return cls(field, field.from_code(np.asarray(list(codes), dtype=np.int64)))

    @classmethod
    def T(cls, q: int) -> "PolyA":
        return cls.from_codes(q, [0, 1])

    @classmethod
    def const(cls, q: int, c: int) -> "PolyA":
        p, s = _prime_power(q)
        return cls.from_codes(q, [c % p])

    @classmethod
    def parse(cls, text: str, q: int) -> "PolyA":
        """Parse "c0,c1,..." (F_q codes) or an expression in T such as "T^2+T"."""
        text = text.strip()
        if "T" not in text:
            try:
                codes = [int(c) for c in text.split(",")]
            except ValueError as exc:
                raise UsageError(f"cannot parse {text!r}") from exc
            if any(not 0 <= c < q for c in codes):
                raise UsageError(f"codes must lie in 0..{q - 1}")
            return cls.from_codes(q, codes)
        p, _ = _prime_power(q)
        return eval_literal(text, {"T": cls.T(q)}, lambda c: cls.const(q, c))

    @property
    def q(self) -> int:
        return self.field.order

    @property
    def p(self) -> int:
        return self.field.p

    def codes(self) -> list[int]:
        return [int(c) for c in self.field.to_code(self.coeffs)] if len(self.coeffs) else []

    def to_string(self) -> str:
        return ",".join(str(c) for c in self.codes()) or "0"

    def to_expr(self) -> str:
        """Expression in T with F_q codes as coefficients, highest degree first."""
        parts = []
        for k, c in reversed(list(enumerate(self.codes()))):
            if not c:
                continue
            mono = "" if k == 0 else ("T" if k == 1 else f"T^{k}")
            if not mono:
                parts.append(str(c))
            else:
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(parts) or "0"

    def deg(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def lc(self) -> np.ndarray:
        if self.is_zero():
            raise ZeroInput("leading coefficient of zero")
        return self.coeffs[-1]

    def _coerce(self, other):
        if isinstance(other, PolyA):
            return other
        if isinstance(other, int):
            return PolyA.const(self.q, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        out = np.zeros((n, self.field.n), dtype=np.int64)
        out[: len(self.coeffs)] += self.coeffs
        out[: len(other.coeffs)] += other.coeffs
        return PolyA(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return PolyA(self.field, -self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return PolyA(self.field, self.field.polymul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = PolyA.const(self.q, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = PolyA.const(self.q, other)
        if not isinstance(other, PolyA):
            return NotImplemented
        return self.q == other.q and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.q, self.coeffs.tobytes()))

    def __divmod__(self, other: "PolyA"):
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        F = self.field
        inv = F.inv(other.lc())
        rem = self.coeffs.copy()
        db = other.deg()
        quot = np.zeros((max(len(rem) - db, 0), F.n), dtype=np.int64)
        for k in range(len(rem) - 1, db - 1, -1):
            if rem[k].any():
                c = F.mul(rem[k], inv)
                quot[k - db] = c
                rem[k - db: k + 1] = (rem[k - db: k + 1] - F.mul(other.coeffs, c)) % F.p
        return PolyA(F, quot), PolyA(F, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "PolyA":
        inv = self.field.inv(self.lc())
        return PolyA(self.field, self.field.mul(self.coeffs, inv))

    def q_power(self, k: int) -> "PolyA":
        """a^(q^k): coefficients are fixed, T is raised to T^(q^k)."""
        step = self.q**k
        if self.is_zero():
            return self
        out = np.zeros(((len(self.coeffs) - 1) * step + 1, self.field.n), dtype=np.int64)
        out[::step] = self.coeffs
        return PolyA(self.field, out)

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k, code in reversed(list(enumerate(self.codes()))):
            if code == 0:
                continue
            mono = "" if k == 0 else ("T" if k == 1 else f"T^{k}")
            if not mono:
                parts.append(str(code))
            elif code == 1:
                parts.append(mono)
            else:
                parts.append(f"{code}*{mono}")
        return " + ".join(parts)


def poly_gcd(a: PolyA, b: PolyA) -> PolyA:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


class RatK:
    """Reduced fraction num/den in K = F_q(T) with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: PolyA, den: PolyA | None = None):
        if den is None:
            den = PolyA.const(num.q, 1)
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        g = poly_gcd(num, den)
        if g.deg() > 0:
            num, den = num // g, den // g
        inv = den.field.inv(den.lc())
        self.num = PolyA(num.field, num.field.mul(num.coeffs, inv))
        self.den = den.monic()

    @property
    def q(self) -> int:
        return self.num.q

    def _coerce(self, other):
        if isinstance(other, RatK):
            return other
        if isinstance(other, PolyA):
            return RatK(other)
        if isinstance(other, int):
            return RatK(PolyA.const(self.q, other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RatK(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatK(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RatK(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.num.is_zero():
            raise DivisionByZero("division by zero in K")
        return RatK(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def valuation(self):
        """v_infinity = deg den - deg num; infinity for zero."""
        if self.is_zero():
            return float("inf")
        return self.den.deg() - self.num.deg()

    def logq_abs(self) -> Fraction:
        if self.is_zero():
            raise ZeroInput("log of zero")
        return Fraction(-self.valuation())

    def __repr__(self):
        if self.den.deg() == 0:
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


# -- Carlitz quantities in A --

def bracket(a: PolyA, k: int) -> PolyA:
    """[a, k] = a^(q^k) - a."""
    return a.q_power(k) - a


@functools.lru_cache(maxsize=None)
def d_factor(k: int, q: int) -> PolyA:
    """D_k = [k][k-1]^q ... [1]^(q^(k-1)) with [i] = T^(q^i) - T."""
    T = PolyA.T(q)
    out = PolyA.const(q, 1)
    for i in range(k):
        out = out * bracket(T, k - i).q_power(i)
    return out


def carlitz_coeffs(a: PolyA) -> list[PolyA]:
    """Coefficients (c_0, ..., c_d) of the Carlitz operator rho_a = sum c_k tau^k.

    Built by Horner's rule in A{tau} from rho_T = T + tau.
    """
    if a.is_zero():
        raise ZeroInput("Carlitz operator of the zero polynomial")
    q = a.q
    T = PolyA.T(q)
    F = a.field
    consts = [PolyA(F, row) for row in a.coeffs]
    out = [consts[-1]]
    for c in reversed(consts[:-1]):
        nxt = [p * T.q_power(i) for i, p in enumerate(out)] + [PolyA.const(q, 0)]
        for i in range(1, len(nxt)):
            nxt[i] = nxt[i] + out[i - 1]
        nxt[0] = nxt[0] + c
        out = nxt
    return out
