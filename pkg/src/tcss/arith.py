"""Finite fields F_{p^f} and truncated Witt rings W(k)/p^N.

Elements of k = F_p[x]/(modulus) are length-f coefficient tuples, lowest
degree first.  W(k)/p^N is modelled as (Z/p^N)[x]/(m~) where m~ has the same
integer coefficients as the residue modulus; its Frobenius lift is evaluation
at the Hensel root r of m~ with r = x^p mod p.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from . import linalg
from .errors import NonPrime, PrecisionTooLow, ReducibleModulus, NotDivisible, ZeroCoefficient


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# polynomials over F_p (lists, lowest degree first, no trailing zeros)

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def poly_divmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = _trim([x % p for x in a])
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(r) - len(b) + 1, 0)
    while len(r) >= len(b):
        shift = len(r) - len(b)
        t = r[-1] * inv_lead % p
        q[shift] = t
        for i, y in enumerate(b):
            r[shift + i] = (r[shift + i] - t * y) % p
        _trim(r)
    return _trim(q), r


def poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, poly_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def poly_powmod(base: Sequence[int], exp: int, mod: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = poly_divmod(base, mod, p)[1]
    while exp:
        if exp & 1:
            result = poly_divmod(poly_mul(result, base, p), mod, p)[1]
        base = poly_divmod(poly_mul(base, base, p), mod, p)[1]
        exp >>= 1
    return result


def _prime_factors(n: int) -> list[int]:
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(m: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    m = _trim([x % p for x in m])
    f = len(m) - 1
    if f < 1:
        return False
    if f == 1:
        return True
    x = [0, 1]
    if poly_divmod(_sub(poly_powmod(x, p ** f, m, p), x, p), m, p)[1]:
        return False
    for q in _prime_factors(f):
        g = _sub(poly_powmod(x, p ** (f // q), m, p), x, p)
        if len(poly_gcd(g, m, p)) > 1:
            return False
    return True


def _sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


# ---------------------------------------------------------------------------
# the residue field

@dataclass(frozen=True)
class FieldCtx:
    p: int
    f: int
    modulus: tuple[int, ...]  # length f+1, monic, lowest degree first

    @property
    def q(self) -> int:
        return self.p ** self.f

    # raw tuple arithmetic -------------------------------------------------
    def _reduce(self, c: list[int]) -> tuple[int, ...]:
        p, f, m = self.p, self.f, self.modulus
        c = [x % p for x in c]
        for d in range(len(c) - 1, f - 1, -1):
            t = c[d]
            if t:
                for i in range(f + 1):
                    c[d - f + i] = (c[d - f + i] - t * m[i]) % p
        c = c[:f] + [0] * (f - len(c))
        return tuple(c)

    def t_add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def t_sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def t_neg(self, a):
        p = self.p
        return tuple(-x % p for x in a)

    def t_mul(self, a, b):
        f = self.f
        if f == 1:
            return ((a[0] * b[0]) % self.p,)
        out = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._reduce(out)

    def t_pow(self, a, n: int):
        if n < 0:
            a, n = self.t_inv(a), -n
        result = self.t_one
        while n:
            if n & 1:
                result = self.t_mul(result, a)
            a = self.t_mul(a, a)
            n >>= 1
        return result

    def t_inv(self, a):
        if not any(a):
            raise ZeroDivisionError("inverse of zero in F_q")
        return self.t_pow(a, self.q - 2) if self.q > 2 else a

    @property
    def t_one(self):
        return (1,) + (0,) * (self.f - 1)

    @property
    def t_zero(self):
        return (0,) * self.f

    # wrapped elements -----------------------------------------------------
    def elem(self, coeffs: Sequence[int]) -> "Fq":
        c = [int(x) for x in coeffs]
        if len(c) > self.f:
            return Fq(self, self._reduce(c))
        c = [x % self.p for x in c] + [0] * (self.f - len(c))
        return Fq(self, tuple(c))

    def from_int(self, n: int) -> "Fq":
        return self.elem([n])

    def zero(self) -> "Fq":
        return Fq(self, self.t_zero)

    def one(self) -> "Fq":
        return Fq(self, self.t_one)

    def gen(self) -> "Fq":
        """The class of x."""
        return self.elem([0, 1])

    def index(self, a: "Fq | tuple") -> int:
        c = a.c if isinstance(a, Fq) else a
        return sum(x * self.p ** i for i, x in enumerate(c))

    def from_index(self, n: int) -> "Fq":
        c = []
        for _ in range(self.f):
            n, r = divmod(n, self.p)
            c.append(r)
        return Fq(self, tuple(c))

    def elements(self) -> Iterator["Fq"]:
        for n in range(self.q):
            yield self.from_index(n)

    def basis(self) -> list["Fq"]:
        """The F_p-basis 1, x, ..., x^{f-1}."""
        return [self.elem([0] * i + [1]) for i in range(self.f)]

    @cached_property
    def ops(self) -> "linalg.FieldOps":
        """Vectorised arithmetic on integer-encoded elements for linear algebra."""
        if self.f == 1:
            return linalg.PrimeFieldOps(self.p)
        q = self.q
        els = [self.from_index(i).c for i in range(q)]
        add = np.array([[self.index(self.t_add(a, b)) for b in els] for a in els], dtype=np.int64)
        mul = np.array([[self.index(self.t_mul(a, b)) for b in els] for a in els], dtype=np.int64)
        neg = np.array([self.index(self.t_neg(a)) for a in els], dtype=np.int64)
        inv = np.array([0] + [self.index(self.t_inv(a)) for a in els[1:]], dtype=np.int64)
        return linalg.TableFieldOps(q, add, mul, neg, inv)


class Fq:
    """Immutable element of F_{p^f}."""

    __slots__ = ("ctx", "c")

    def __init__(self, ctx: FieldCtx, c: tuple[int, ...]):
        self.ctx = ctx
        self.c = c

    def _coerce(self, other) -> tuple[int, ...]:
        if isinstance(other, Fq):
            return other.c
        if isinstance(other, int):
            return self.ctx.from_int(other).c
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return Fq(self.ctx, self.ctx.t_add(self.c, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Fq(self.ctx, self.ctx.t_sub(self.c, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return Fq(self.ctx, self.ctx.t_sub(o, self.c))

    def __neg__(self):
        return Fq(self.ctx, self.ctx.t_neg(self.c))

    def __mul__(self, other):
        o = self._coerce(other)
        return Fq(self.ctx, self.ctx.t_mul(self.c, o))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return Fq(self.ctx, self.ctx.t_pow(self.c, n))

    def inverse(self) -> "Fq":
        return Fq(self.ctx, self.ctx.t_inv(self.c))

    def __truediv__(self, other):
        o = self._coerce(other)
        return Fq(self.ctx, self.ctx.t_mul(self.c, self.ctx.t_inv(o)))

    def is_zero(self) -> bool:
        return not any(self.c)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.from_int(other)
        return isinstance(other, Fq) and other.c == self.c and other.ctx == self.ctx

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"Fq({list(self.c)})"

    def __str__(self):
        if self.ctx.f == 1:
            return str(self.c[0])
        terms = []
        for i, x in enumerate(self.c):
            if x:
                mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                terms.append(f"{x}{'*' + mono if mono else ''}" if x != 1 or not mono else mono)
        return " + ".join(terms) if terms else "0"


def make_field(p: int, f: int, modulus: Sequence[int] | None = None) -> FieldCtx:
    """Build F_{p^f}; without a modulus pick the smallest monic irreducible.

    Candidates x^f + c_{f-1}x^{f-1} + ... + c_0 are scanned in increasing
    order of the integer sum c_i p^i, i.e. lexicographically with the
    highest coefficient most significant.
    """
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if f < 1:
        raise ValueError("extension degree must be at least 1")
    if modulus is not None:
        m = [int(x) for x in modulus]
        if len(m) != f + 1 or m[-1] % p != 1:
            raise ReducibleModulus("modulus must be monic of degree f")
        m = [x % p for x in m]
        if not is_irreducible(m, p):
            raise ReducibleModulus(f"{m} is reducible over F_{p}")
        return FieldCtx(p, f, tuple(m))
    for n in range(p ** f):
        low = [(n // p ** i) % p for i in range(f)]
        m = low + [1]
        if is_irreducible(m, p):
            return FieldCtx(p, f, tuple(m))
    raise AssertionError("no irreducible polynomial found")  # unreachable


def fq_frobenius(ctx: FieldCtx, a: Fq) -> Fq:
    return a ** ctx.p


def fq_norm(ctx: FieldCtx, a: Fq) -> Fq:
    out, b = ctx.one(), a
    for _ in range(ctx.f):
        out = out * b
        b = fq_frobenius(ctx, b)
    return out


def fq_to_prime(ctx: FieldCtx, a: Fq) -> int:
    """Integer representative of an element known to lie in F_p."""
    if any(a.c[1:]):
        raise ValueError("element is not in the prime field")
    return a.c[0]


# ---------------------------------------------------------------------------
# Hilbert 90

@dataclass(frozen=True)
class SolveResult:
    """Solution data for b*phi(x) - x = c over k."""

    norm_b: Fq
    unique: bool
    solvable: bool
    solution: Fq | None
    kernel: tuple[Fq, ...]
    kernel_dim: int
    coker_dim: int


def _semilinear_matrix(ctx: FieldCtx, b: Fq) -> np.ndarray:
    cols = []
    for e in ctx.basis():
        cols.append(list((b * fq_frobenius(ctx, e) - e).c))
    return np.array(cols, dtype=np.int64).T % ctx.p


def h90_solve(ctx: FieldCtx, b: Fq, c: Fq) -> SolveResult:
    """Solve b*phi(x) - x = c as an F_p-linear system on k."""
    if b.is_zero():
        raise ZeroCoefficient("b must be a unit")
    M = _semilinear_matrix(ctx, b)
    ops = linalg.PrimeFieldOps(ctx.p)
    kernel = [ctx.elem(list(v)) for v in linalg.nullspace(M, ops)]
    rank = ctx.f - len(kernel)
    sol = linalg.solve(M, np.array(c.c, dtype=np.int64), ops)
    solution = ctx.elem(list(sol)) if sol is not None else None
    return SolveResult(
        norm_b=fq_norm(ctx, b),
        unique=not kernel,
        solvable=solution is not None,
        solution=solution,
        kernel=tuple(kernel),
        kernel_dim=len(kernel),
        coker_dim=ctx.f - rank,
    )


# ---------------------------------------------------------------------------
# truncated Witt ring

@dataclass(frozen=True)
class WittCtx:
    field: FieldCtx
    N: int
    lift: tuple[int, ...] = field(repr=False)  # lifted modulus over Z/p^N, monic
    frobenius_root: tuple[int, ...] = field(repr=False)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def f(self) -> int:
        return self.field.f

    @cached_property
    def modulus_pN(self) -> int:
        return self.field.p ** self.N

    # raw tuple arithmetic mod p^N ------------------------------------------
    def _reduce(self, c: list[int]) -> tuple[int, ...]:
        f, m, P = self.f, self.lift, self.modulus_pN
        for d in range(len(c) - 1, f - 1, -1):
            t = c[d] % P
            if t:
                for i in range(f + 1):
                    c[d - f + i] -= t * m[i]
        c = c[:f] + [0] * (f - len(c))
        return tuple(x % P for x in c)

    def t_add(self, a, b):
        P = self.modulus_pN
        return tuple((x + y) % P for x, y in zip(a, b))

    def t_sub(self, a, b):
        P = self.modulus_pN
        return tuple((x - y) % P for x, y in zip(a, b))

    def t_neg(self, a):
        P = self.modulus_pN
        return tuple(-x % P for x in a)

    def t_scale(self, a, n: int):
        P = self.modulus_pN
        return tuple(x * n % P for x in a)

    def t_mul(self, a, b):
        f = self.f
        if f == 1:
            return ((a[0] * b[0]) % self.modulus_pN,)
        out = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._reduce(out)

    def t_pow(self, a, n: int):
        result = self.t_one
        while n:
            if n & 1:
                result = self.t_mul(result, a)
            a = self.t_mul(a, a)
            n >>= 1
        return result

    @property
    def t_one(self):
        return (1,) + (0,) * (self.f - 1)

    @property
    def t_zero(self):
        return (0,) * self.f

    def t_from_int(self, n: int):
        return (n % self.modulus_pN,) + (0,) * (self.f - 1)

    def t_val(self, a) -> int:
        """p-adic valuation (N for zero)."""
        v = self.N
        for x in a:
            if x:
                v = min(v, vp(x, self.p))
        return v

    def t_div_p(self, a):
        p = self.p
        if any(x % p for x in a):
            raise NotDivisible("coefficient not divisible by p")
        return tuple(x // p for x in a)

    def t_inv(self, a):
        """Inverse of a unit of W(k)/p^N (Newton lift of the residue inverse)."""
        fctx = self.field
        abar = tuple(x % self.p for x in a)
        if not any(abar):
            raise ZeroDivisionError("not a unit")
        v = fctx.t_inv(abar)
        prec = 1
        while prec < self.N:
            # v <- v (2 - a v)
            av = self.t_mul(a, v)
            v = self.t_mul(v, self.t_sub(self.t_from_int(2), av))
            prec *= 2
        return v

    def t_eval_poly(self, coeffs, y):
        """Evaluate sum coeffs[i] y^i in (Z/p^N)[x]/(m~)."""
        out = self.t_zero
        for c in reversed(coeffs):
            out = self.t_add(self.t_mul(out, y), c)
        return out

    def t_frobenius(self, a):
        out = self.t_zero
        for b in reversed(a):
            out = self.t_add(self.t_mul(out, self.frobenius_root), self.t_from_int(b))
        return out

    def t_reduce_mod_p(self, a) -> tuple[int, ...]:
        return tuple(x % self.p for x in a)

    # wrapped ---------------------------------------------------------------
    def elem(self, coeffs: Sequence[int], prec: int | None = None) -> "WittElement":
        c = [int(x) for x in coeffs]
        if len(c) > self.f:
            t = self._reduce(c)
        else:
            t = tuple(x % self.modulus_pN for x in c) + (0,) * (self.f - len(c))
        return WittElement(self, t, self.N if prec is None else prec)

    def from_int(self, n: int) -> "WittElement":
        return self.elem([n])

    def teichmuller_free_lift(self, a: Fq) -> "WittElement":
        """Digit lift of a residue element (coefficients in [0, p))."""
        return self.elem(list(a.c))


class WittElement:
    """Element of W(k)/p^N carrying its own absolute precision prec <= N."""

    __slots__ = ("ctx", "c", "prec")

    def __init__(self, ctx: WittCtx, c: tuple[int, ...], prec: int):
        P = ctx.p ** prec
        self.ctx = ctx
        self.c = tuple(x % P for x in c)
        self.prec = prec

    def _other(self, o):
        if isinstance(o, WittElement):
            return o.c, o.prec
        if isinstance(o, int):
            return self.ctx.t_from_int(o), self.ctx.N
        return NotImplemented

    def __add__(self, o):
        c, pr = self._other(o)
        return WittElement(self.ctx, self.ctx.t_add(self.c, c), min(self.prec, pr))

    __radd__ = __add__

    def __sub__(self, o):
        c, pr = self._other(o)
        return WittElement(self.ctx, self.ctx.t_sub(self.c, c), min(self.prec, pr))

    def __rsub__(self, o):
        c, pr = self._other(o)
        return WittElement(self.ctx, self.ctx.t_sub(c, self.c), min(self.prec, pr))

    def __neg__(self):
        return WittElement(self.ctx, self.ctx.t_neg(self.c), self.prec)

    def __mul__(self, o):
        c, pr = self._other(o)
        return WittElement(self.ctx, self.ctx.t_mul(self.c, c), min(self.prec, pr))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return WittElement(self.ctx, self.ctx.t_pow(self.c, n), self.prec)

    def div_p(self) -> "WittElement":
        """Exact division by p; precision drops by one."""
        if self.prec < 1:
            raise PrecisionTooLow("no precision left to divide by p")
        return WittElement(self.ctx, self.ctx.t_div_p(self.c), self.prec - 1)

    def valuation(self) -> int:
        v = self.prec
        for x in self.c:
            if x:
                v = min(v, vp(x, self.ctx.p))
        return v

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def inverse(self) -> "WittElement":
        return WittElement(self.ctx, self.ctx.t_inv(self.c), self.prec)

    def reduce(self) -> Fq:
        return self.ctx.field.elem([x % self.ctx.p for x in self.c])

    def __eq__(self, o):
        if isinstance(o, int):
            o = self.ctx.from_int(o)
        if not isinstance(o, WittElement):
            return NotImplemented
        pr = min(self.prec, o.prec)
        P = self.ctx.p ** pr
        return all((x - y) % P == 0 for x, y in zip(self.c, o.c))

    def __hash__(self):
        return hash((self.c, self.prec))

    def __repr__(self):
        return f"WittElement({list(self.c)}, prec={self.prec})"


def _poly_derivative(m: Sequence[int]) -> list[int]:
    return [i * m[i] for i in range(1, len(m))]


def hensel_frobenius_root(fctx: FieldCtx, N: int) -> tuple[int, ...]:
    """Root r of the lifted modulus in (Z/p^N)[x]/(m~) with r = x^p mod p."""
    p, f = fctx.p, fctx.f
    lift = tuple(fctx.modulus)
    tmp = WittCtx(fctx, N, lift, (0,) * f)
    # x^p reduced modulo m~
    xpow = [0] * p + [1]
    y = tmp._reduce(xpow) if len(xpow) > f else tuple(xpow + [0] * (f - len(xpow)))
    m_t = [tmp.t_from_int(c) for c in lift]
    dm_t = [tmp.t_from_int(c) for c in _poly_derivative(lift)]
    for _ in range(N + 1):
        val = tmp.t_eval_poly(m_t, y)
        if not any(val):
            break
        der = tmp.t_eval_poly(dm_t, y)
        y = tmp.t_sub(y, tmp.t_mul(val, tmp.t_inv(der)))
    if any(tmp.t_eval_poly(m_t, y)):
        raise PrecisionTooLow("Newton iteration did not converge")
    return y


def make_witt(fctx: FieldCtx, N: int) -> WittCtx:
    if N < 1:
        raise PrecisionTooLow("precision must be at least 1")
    return WittCtx(fctx, N, tuple(fctx.modulus), hensel_frobenius_root(fctx, N))


def witt_frobenius(ctx: WittCtx, a: WittElement) -> WittElement:
    return WittElement(ctx, ctx.t_frobenius(a.c), a.prec)


def p_power_over_factorial(i: int, p: int) -> tuple[int, int]:
    """Return (v, u) with p^i / i! = p^v / u, u the prime-to-p part of i!."""
    u, vfact = 1, 0
    for k in range(2, i + 1):
        while k % p == 0:
            k //= p
            vfact += 1
        u *= k
    return i - vfact, u


def all_coefficient_tuples(p: int, f: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(p), repeat=f)


FqElement = Fq
