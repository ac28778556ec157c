"""Cobar complexes of the Hopf algebroids governing THH and the refined Tate page.

Two flavours are built over k:

* ``thh``: A = k[z]/(z^e)[u], Gamma = A[u_0]<t> with eta_L(u) = u_0 and
  eta_R(u) = u_0 - E'(z) t.  Internal degree of z^l u_0^m t^[J] is 2(m + |J|).
* ``gr``: A = k[z], Gamma = k[z_0]<t> with eta_R(z) = z_0 - t when e = 1 and
  z_0 otherwise.  Weight of z_0^m t^[J] is m/e + |J|.

C^n = Gamma^{(x)n} is spanned by monomials (base, J) with J = (j_1..j_n) the
divided-power exponents of t_1..t_n.  Cofaces: delta^0 moves the A-coefficient
through eta_R into a new first slot, delta^i (1 <= i <= n) applies the
coproduct t_i -> t_i + t_{i+1}, delta^{n+1} appends an empty slot.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Iterable, Iterator

import numpy as np

from . import linalg
from .arith import FieldCtx, Fq, make_field, make_witt, vp
from .errors import PrecisionTooLow
from .localfield import LocalField

Monomial = tuple  # (base..., j_1, ..., j_n); base is (l, m) for thh and (m,) for gr


# ---------------------------------------------------------------------------
# Hopf algebroid data

@dataclass(frozen=True)
class HopfSpec:
    """Structure maps of one Hopf algebroid, acting on monomials."""

    flavor: str          # "thh" or "gr"
    k: FieldCtx
    e: int
    p: int
    ebar_mu: Fq          # coefficient of z^{e-1} in E'(z) mod p (thh flavour)

    @property
    def base_len(self) -> int:
        return 2 if self.flavor == "thh" else 1

    def base_ok(self, base: tuple[int, ...]) -> bool:
        if self.flavor == "thh":
            return base[0] < self.e
        return True

    def eta_R_expand(self, base: tuple[int, ...]) -> list[tuple[tuple[int, ...], int, Fq]]:
        """eta_R applied to an A-monomial: list of (new base, k, coeff) meaning coeff*base*t^[k]."""
        k = self.k
        out = []
        if self.flavor == "thh":
            l, m = base
            c = -self.ebar_mu
            for kk in range(m + 1):
                ll = l + kk * (self.e - 1)
                if ll >= self.e:
                    break
                coef = (c ** kk) * (comb(m, kk) * factorial(kk) % self.p)
                if coef:
                    out.append(((ll, m - kk), kk, coef))
            return out
        (m,) = base
        if self.e > 1:
            return [((m,), 0, k.one())]
        for kk in range(m + 1):
            coef = k.from_int((-1) ** kk * comb(m, kk) * factorial(kk))
            if coef:
                out.append(((m - kk,), kk, coef))
        return out

    def degree(self, mono: Monomial) -> int:
        """Internal degree / 2 (thh) or weight scaled by e (gr)."""
        b = self.base_len
        if self.flavor == "thh":
            return mono[1] + sum(mono[b:])
        return mono[0] + self.e * sum(mono[b:])

    def split_weight(self, mono: Monomial) -> int:
        """Secondary grading preserved by all cofaces (thh: l + m(e-1))."""
        if self.flavor == "thh":
            return mono[0] + mono[1] * (self.e - 1)
        return 0


def thh_hopf(field: LocalField) -> HopfSpec:
    k = field.k
    return HopfSpec("thh", k, field.e, field.p, field.eprime_bar[field.e - 1])


def gr_hopf(p: int, e: int, f: int = 1, k: FieldCtx | None = None) -> HopfSpec:
    k = k or make_field(p, f)
    return HopfSpec("gr", k, e, p, k.zero())


def _add(acc: dict, key, coef: Fq) -> None:
    v = acc.get(key)
    v = coef if v is None else v + coef
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def coface(H: HopfSpec, i: int, mono: Monomial) -> dict[Monomial, Fq]:
    """delta^i : C^n -> C^{n+1} on one monomial."""
    b = H.base_len
    base, J = mono[:b], mono[b:]
    n = len(J)
    one = H.k.one()
    if i == 0:
        out: dict[Monomial, Fq] = {}
        for nb, kk, coef in H.eta_R_expand(base):
            _add(out, nb + (kk,) + J, coef)
        return out
    if i == n + 1:
        return {base + J + (0,): one}
    out = {}
    ji = J[i - 1]
    for a in range(ji + 1):
        _add(out, base + J[: i - 1] + (a, ji - a) + J[i:], one)
    return out


def cobar_d(H: HopfSpec, mono: Monomial) -> dict[Monomial, Fq]:
    """d = sum_i (-1)^i delta^i."""
    n = len(mono) - H.base_len
    out: dict[Monomial, Fq] = {}
    for i in range(n + 2):
        for key, c in coface(H, i, mono).items():
            _add(out, key, c if i % 2 == 0 else -c)
    return out


def basis(H: HopfSpec, n: int, degree: int, split: int | None = None) -> list[Monomial]:
    """Monomials of C^n in a given degree (and split weight, if given)."""
    out = []
    if H.flavor == "thh":
        for m in range(degree + 1):
            for l in range(H.e):
                base = (l, m)
                if split is not None and l + m * (H.e - 1) != split:
                    continue
                for J in _compositions(degree - m, n):
                    out.append(base + J)
    else:
        for m in range(degree + 1):
            rest = degree - m
            if rest % H.e:
                continue
            for J in _compositions(rest // H.e, n):
                out.append((m,) + J)
    return out


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def differential_matrix(H: HopfSpec, src: list[Monomial], tgt: list[Monomial]) -> np.ndarray:
    """Matrix of d : span(src) -> span(tgt) with integer-encoded entries."""
    index = {m: r for r, m in enumerate(tgt)}
    M = np.zeros((len(tgt), len(src)), dtype=np.int64)
    k = H.k
    for c, mono in enumerate(src):
        for key, coef in cobar_d(H, mono).items():
            r = index.get(key)
            if r is None:
                raise AssertionError(f"differential left the graded piece: {key}")
            M[r, c] = k.index(coef)
    return M


def _splits(H: HopfSpec, degree: int) -> list[int | None]:
    if H.flavor == "thh" and H.e > 1:
        return sorted({l + m * (H.e - 1) for m in range(degree + 1) for l in range(H.e)})
    return [None]


@dataclass(frozen=True)
class DegreeCohomology:
    degree: int                  # internal degree (thh) or e*weight (gr)
    dims: tuple[int, int, int]   # H^0, H^1, H^2
    d1d0_zero: bool
    d2d1_zero: bool


def cobar_cohomology(H: HopfSpec, degree: int) -> DegreeCohomology:
    """Dimensions of H^0, H^1, H^2 of the cobar complex in one degree."""
    ops = H.k.ops
    h = [0, 0, 0]
    ok10 = ok21 = True
    for split in _splits(H, degree):
        C = [basis(H, n, degree, split) for n in range(4)]
        if not any(C[:3]):
            continue
        D = [differential_matrix(H, C[n], C[n + 1]) for n in range(3)]
        ranks = [linalg.rank(Dn, ops) if Dn.size else 0 for Dn in D]
        h[0] += len(C[0]) - ranks[0]
        h[1] += len(C[1]) - ranks[1] - ranks[0]
        h[2] += len(C[2]) - ranks[2] - ranks[1]
        if D[0].size and D[1].size:
            ok10 &= not linalg.matmul(D[1], D[0], ops).any()
        if D[1].size and D[2].size:
            ok21 &= not linalg.matmul(D[2], D[1], ops).any()
    return DegreeCohomology(degree, (h[0], h[1], h[2]), ok10, ok21)


# ---------------------------------------------------------------------------
# THH E2: brute force and closed form

def thh_cobar_e2(field: LocalField, degree_cap: int) -> list[DegreeCohomology]:
    """Cobar cohomology in internal degrees 2n for 0 <= n <= degree_cap."""
    H = thh_hopf(field)
    return [cobar_cohomology(H, n) for n in range(degree_cap + 1)]


@dataclass(frozen=True)
class ClosedFormRow:
    n: int                       # internal degree 2n
    row0: tuple[str, ...]        # basis names of E2_{0,2n}
    row1: tuple[str, ...]        # basis names of E2_{-1,2n}
    row1_cycles: tuple[dict, ...]  # cobar C^1 vectors of the row -1 representatives

    @property
    def dims(self) -> tuple[int, int]:
        return len(self.row0), len(self.row1)


def thh_e2_closed_form(field: LocalField, degree_cap: int) -> list[ClosedFormRow]:
    """Bases of rows 0 and -1 in internal degree 2n, n <= degree_cap."""
    p, e, k = field.p, field.e, field.k
    mu = field.mu_bar
    eprime = field.eprime_bar[e - 1]   # E'(z) = eprime * z^{e-1} mod p
    rows = []
    for n in range(degree_cap + 1):
        row0: list[str] = []
        row1: list[str] = []
        cycles: list[dict] = []
        if e > 1:
            for l in range(e):
                if n == 0 or 1 <= l <= e - 1 or (e * n) % p == 0:
                    row0.append(f"z^{l} u^{n}")
            if n >= 1:
                for l in range(e):
                    if l <= e - 2 or (e * n) % p == 0:
                        row1.append(f"z^{l}(u0^{n - 1} t - {n - 1} E' u0^{n - 2} t^[2])")
                        vec: dict = {(l, n - 1, 1): k.one()}
                        if n >= 2:
                            ll = l + e - 1
                            c = -eprime * (n - 1)
                            if ll < e and c:
                                vec[(ll, n - 2, 2)] = c
                        cycles.append(vec)
        else:
            if n % p == 0:
                row0.append(f"u^{n}")
                if n >= 1:
                    row1.append(f"sum_j (n-1)!/(n-j)! (-mu)^j u0^(n-j) t^[j], n={n}")
                    vec = {}
                    for j in range(1, n + 1):
                        c = (-mu) ** j * (factorial(n - 1) // factorial(n - j))
                        if c:
                            vec[(0, n - j, j)] = c
                    cycles.append(vec)
        rows.append(ClosedFormRow(n, tuple(row0), tuple(row1), tuple(cycles)))
    return rows


def closed_form_cycles_check(field: LocalField, degree_cap: int) -> list[tuple[int, bool, bool]]:
    """For each degree: (n, representatives are cocycles, independent modulo coboundaries)."""
    H = thh_hopf(field)
    ops = field.k.ops
    out = []
    for row in thh_e2_closed_form(field, degree_cap):
        n = row.n
        C0, C1, C2 = (basis(H, i, n) for i in range(3))
        if not row.row1_cycles:
            out.append((n, True, True))
            continue
        idx1 = {m: r for r, m in enumerate(C1)}
        V = np.zeros((len(C1), len(row.row1_cycles)), dtype=np.int64)
        for c, vec in enumerate(row.row1_cycles):
            for mono, coef in vec.items():
                V[idx1[mono], c] = field.k.index(coef)
        D1 = differential_matrix(H, C1, C2)
        D0 = differential_matrix(H, C0, C1)
        cocycle = not linalg.matmul(D1, V, ops).any()
        r0 = linalg.rank(D0, ops) if D0.size else 0
        combined = np.concatenate([D0, V], axis=1) if D0.size else V
        independent = linalg.rank(combined, ops) == r0 + V.shape[1]
        out.append((n, cocycle, independent))
    return out


# ---------------------------------------------------------------------------
# Hopf algebroid axioms

def _coproduct_t(j: int) -> dict[tuple[int, int], int]:
    return {(a, j - a): 1 for a in range(j + 1)}


@dataclass(frozen=True)
class AxiomReport:
    checked: int
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def hopf_axioms_check(H: HopfSpec, degree_cap: int) -> AxiomReport:
    """Counit, coassociativity and unit compatibilities on monomials up to the cap.

    The checks use the cobar cofaces: delta^1 on C^1 is the coproduct, delta^0
    and delta^2 on C^0 are eta_R and eta_L, and the counit is the codegeneracy
    collapsing a slot (t^[j] -> 0 for j > 0).
    """
    if degree_cap < 2:
        raise ValueError("degree cap must be at least 2")
    failures = []
    checked = 0
    b = H.base_len

    def counit_slot(vec: dict, slot: int) -> dict:
        out: dict = {}
        for mono, c in vec.items():
            J = mono[b:]
            if J[slot] == 0:
                _add(out, mono[:b] + J[:slot] + J[slot + 1:], c)
        return out

    def apply(i: int, vec: dict) -> dict:
        out: dict = {}
        for mono, c in vec.items():
            for key, v in coface(H, i, mono).items():
                _add(out, key, c * v)
        return out

    for deg in range(degree_cap + 1):
        for mono in basis(H, 1, deg):
            checked += 1
            vec = {mono: H.k.one()}
            delta = apply(1, vec)
            if counit_slot(delta, 0) != vec or counit_slot(delta, 1) != vec:
                failures.append(f"counit fails on {mono}")
            if apply(1, delta) != apply(2, delta):
                failures.append(f"coassociativity fails on {mono}")
        for mono in basis(H, 0, deg):
            checked += 1
            vec = {mono: H.k.one()}
            for i, name in ((0, "eta_R"), (1, "eta_L")):
                unit = apply(i, vec)
                if counit_slot(unit, 0) != vec:
                    failures.append(f"counit o {name} fails on {mono}")
            # coproduct of eta_R(a) is 1 (x) eta_R(a); of eta_L(a) is eta_L(a) (x) 1
            if apply(1, apply(0, vec)) != apply(0, apply(0, vec)):
                failures.append(f"coproduct o eta_R fails on {mono}")
            if apply(1, apply(1, vec)) != apply(2, apply(1, vec)):
                failures.append(f"coproduct o eta_L fails on {mono}")
    return AxiomReport(checked, tuple(failures))


def coproduct_of_t(j: int) -> list[tuple[int, int]]:
    """Delta(t^[j]) as the list of (a, j - a) with t^[a] (x) t^[j-a]."""
    return sorted(_coproduct_t(j))


# ---------------------------------------------------------------------------
# refined (graded) page

@dataclass(frozen=True)
class GrPage:
    p: int
    e: int
    f: int
    weights: tuple[Fraction, ...]
    dims: tuple[tuple[int, int, int], ...]
    closed: tuple[tuple[int, int, int], ...]

    @property
    def matches(self) -> bool:
        return self.dims == self.closed


def gr_closed_form(p: int, e: int, weight_scaled: int) -> tuple[int, int, int]:
    """Closed-form column dims at weight w = weight_scaled / e."""
    if e > 1:
        col0 = 1
        col1 = 1 if weight_scaled >= e else 0
        return col0, col1, 0
    w = weight_scaled
    col0 = 1 if w % p == 0 else 0
    col1 = 1 if w > 0 and w % p == 0 else 0
    return col0, col1, 0


def gr_cobar_e2(degree_cap: int, e: int, p: int, f: int = 1) -> GrPage:
    """Cobar cohomology of the refined-graded algebroid for weights up to degree_cap."""
    H = gr_hopf(p, e, f)
    weights, dims, closed = [], [], []
    for W in range(e * degree_cap + 1):
        res = cobar_cohomology(H, W)
        weights.append(Fraction(W, e))
        dims.append(res.dims)
        closed.append(gr_closed_form(p, e, W))
    return GrPage(p, e, f, tuple(weights), tuple(dims), tuple(closed))


def gr_column0_basis(p: int, e: int, weight_cap: int) -> list[str]:
    if e > 1:
        return [f"z^{n}" for n in range(e * weight_cap + 1)]
    return [f"z^{p * n}" for n in range(weight_cap // p + 1)]


def gr_column1_basis(p: int, e: int, weight_cap: int) -> list[str]:
    if e > 1:
        return [f"z0^{m} dz" for m in range(e * (weight_cap - 1) + 1)]
    return [f"r_{n}" for n in range(p, weight_cap + 1, p)]


# ---------------------------------------------------------------------------
# integral Ext over O_K / p^N

def _ok_mul(field: LocalField, W, a: list[tuple], b: list[tuple]) -> list[tuple]:
    """Product in W_N(k)[z]/(E)."""
    e = field.e
    coeffs = field.coeff_tuples(W.modulus_pN)
    mu_inv = W.t_inv(coeffs[-1])
    raw = [W.t_zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            raw[i + j] = W.t_add(raw[i + j], W.t_mul(x, y))
    for d in range(len(raw) - 1, e - 1, -1):
        t = raw[d]
        if any(t):
            # z^d = -mu^{-1} sum_{i<e} c_i z^{d-e+i}
            for i in range(e):
                raw[d - e + i] = W.t_sub(raw[d - e + i], W.t_mul(t, W.t_mul(mu_inv, coeffs[i])))
        raw[d] = W.t_zero
    return (raw + [W.t_zero] * e)[:e]


def integral_ext_matrix(field: LocalField, n: int, precision: int | None = None) -> np.ndarray:
    """Z/p^N-matrix of u^n -> -n E'(varpi) u^{n-1} dz on the basis z^a x^b of O_K/p^N."""
    N = precision or field.N
    W = make_witt(field.k, N)
    e, f = field.e, field.f
    coeffs = field.coeff_tuples(W.modulus_pN)
    g = [W.t_scale(coeffs[i], -n * i) for i in range(1, e + 1)]  # -n E'(z)
    cols = []
    for a in range(e):
        for bb in range(f):
            unit = [0] * f
            unit[bb] = 1
            vec = [W.t_zero] * e
            vec[a] = tuple(unit)
            prod = _ok_mul(field, W, g, vec)
            cols.append([x for c in prod for x in c])
    return np.array(cols, dtype=object).T


def smith_valuations(M: np.ndarray, p: int, N: int) -> list[int]:
    """Diagonal valuations of the Smith form of a square matrix over Z/p^N."""
    A = [[int(x) % p ** N for x in row] for row in M]
    rows, cols = len(A), len(A[0]) if A else 0
    P = p ** N
    vals = []
    for step in range(min(rows, cols)):
        best = None
        for r in range(step, rows):
            for c in range(step, cols):
                if A[r][c]:
                    v = vp(A[r][c], p)
                    if best is None or v < best[0]:
                        best = (v, r, c)
        if best is None:
            raise PrecisionTooLow("a Smith diagonal entry vanishes modulo p^N")
        v, r, c = best
        A[step], A[r] = A[r], A[step]
        for row in A:
            row[step], row[c] = row[c], row[step]
        piv = A[step][step]
        unit_inv = pow(piv // p ** v, -1, P)
        for r2 in range(step + 1, rows):
            if A[r2][step]:
                q = (A[r2][step] // p ** v) * unit_inv % P
                A[r2] = [(x - q * y) % P for x, y in zip(A[r2], A[step])]
        for c2 in range(step + 1, cols):
            if A[step][c2]:
                q = (A[step][c2] // p ** v) * unit_inv % P
                for row in A:
                    row[c2] = (row[c2] - q * row[step]) % P
        vals.append(v)
    return vals


@dataclass(frozen=True)
class ExtGroup:
    n: int
    invariant_factors: tuple[int, ...]   # nontrivial elementary divisors p^v over Z_p

    @property
    def order(self) -> int:
        out = 1
        for x in self.invariant_factors:
            out *= x
        return out


def integral_ext(field: LocalField, n_range: Iterable[int], precision: int | None = None) -> list[ExtGroup]:
    """Ext^{1,2n} = O_K/(n E'(varpi)) as elementary divisors; Ext^{0,0} = O_K is implicit."""
    N = precision or field.N
    out = []
    for n in n_range:
        if n < 1:
            raise ValueError("n must be positive")
        M = integral_ext_matrix(field, n, N)
        vals = smith_valuations(M, field.p, N)
        out.append(ExtGroup(n, tuple(sorted((field.p ** v for v in vals if v > 0), reverse=True))))
    return out


def modp_differential_matrix(field: LocalField, n: int) -> np.ndarray:
    """F_p-matrix of f(u) -> -e mu z^{e-1} f'(u) dz on u^n, basis z^a x^b of k[z]/z^e."""
    e, f, k = field.e, field.f, field.k
    c = field.eprime_bar[e - 1] * (-n)
    cols = []
    for a in range(e):
        for bb in range(f):
            x = k.elem([0] * bb + [1])
            vec = [[0] * f for _ in range(e)]
            if a + e - 1 < e:
                vec[a + e - 1] = list((c * x).c)
            cols.append([y for row in vec for y in row])
    return np.array(cols, dtype=np.int64).T


# ---------------------------------------------------------------------------
# Hochschild homology of k[z]/(z^e) over k[z] through the Koszul model

@dataclass(frozen=True)
class HHTable:
    p: int
    f: int
    e: int
    kdims: tuple[int, ...]          # k-dimension per total degree

    def a_rank(self, t: int) -> Fraction:
        return Fraction(self.kdims[t], self.e)


def _hh_basis(t: int, weight: int, e: int) -> list[tuple[int, int, int]]:
    """Basis z^c b_0[x|...|x] of total degree t and z-weight (x has weight e).

    Entries are (c, b_0, n) with b_0 in {0 (unit), 1 (x)} and n bar slots.
    """
    out = []
    for b0 in (0, 1):
        if (t - b0) % 2:
            continue
        n = (t - b0) // 2
        c = weight - e * (n + b0)
        if c >= 0:
            out.append((c, b0, n))
    return out


def _hh_differential(elem: tuple[int, int, int], e: int, mu: Fq) -> dict[tuple[int, int, int], Fq]:
    """Total differential b + d on the normalized Hochschild complex of D = R[x]/(x^2), dx = mu z^e."""
    c, b0, n = elem
    k = mu.ctx
    one = k.one()
    out: dict = {}
    # slots: a_0 = z^c x^{b0}, a_1..a_n = x; shifted degrees |a_i| + 1
    degs = [b0] + [1] * n

    def mult(u: int, v: int) -> int | None:
        return None if u + v > 1 else u + v

    # Hochschild boundary b: faces d_0 .. d_{n-1} and the cyclic face d_n
    for i in range(n):
        prod = mult(degs[i], degs[i + 1])
        if prod is None:
            continue
        sign = -1 if (degs[0] + sum(d + 1 for d in degs[1: i + 1])) % 2 else 1
        new = list(degs)
        new[i: i + 2] = [prod]
        if any(d == 0 for d in new[1:]):
            continue  # unit in a bar slot vanishes in the normalized complex
        _add(out, (c, new[0], len(new) - 1), one if sign > 0 else -one)
    if n >= 1:
        prod = mult(degs[n], degs[0])
        if prod is not None:
            moved = (degs[n] + 1) * (degs[0] + sum(d + 1 for d in degs[1:n]))
            sign = -1 if (1 + moved) % 2 else 1
            new = [prod] + degs[1:n]
            if all(d == 1 for d in new[1:]):
                _add(out, (c, new[0], n - 1), one if sign > 0 else -one)
    # internal differential: Leibniz over the slots, dx = mu z^e
    if b0 == 1:
        _add(out, (c + e, 0, n), mu)
    # d on bar slots lands in R, which is zero in the normalized bar construction
    return out


def hh_bar_appendix(p: int, f: int, e: int, degree_cap: int, mu: Fq | None = None) -> HHTable:
    """k-dimensions of HH_t(k[z]/(z^e) / k[z]) for t <= 2*degree_cap."""
    k = make_field(p, f)
    mu = mu or k.one()
    ops = k.ops
    tmax = 2 * degree_cap
    kd = []
    wmax = e * (degree_cap + 3)
    for t in range(tmax + 1):
        total = 0
        for w in range(wmax + 1):
            src = _hh_basis(t, w, e)
            if not src:
                continue
            up = _hh_basis(t + 1, w, e)
            down = _hh_basis(t - 1, w, e) if t > 0 else []

            def mat(a, b):
                idx = {m: r for r, m in enumerate(b)}
                M = np.zeros((len(b), len(a)), dtype=np.int64)
                for col, el in enumerate(a):
                    for key, coef in _hh_differential(el, e, mu).items():
                        M[idx[key], col] = k.index(coef)
                return M

            r_out = linalg.rank(mat(src, down), ops) if down else 0
            r_in = linalg.rank(mat(up, src), ops) if up else 0
            total += len(src) - r_out - r_in
        kd.append(total)
    return HHTable(p, f, e, tuple(kd))
