"""E2-terms of the descent spectral sequences for TP, TC^- and TC mod p.

Row -1 classes are recorded by leading term z_0^{n-1} sigma^j dz with the
(b, l) parametrisation n = (pe(j-1) + b p^l)/(p-1).  All comparisons are
exact integer or rational arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from . import specseq
from .arith import Fq, fq_frobenius, h90_solve, vp
from .errors import DomainViolation
from .localfield import LocalField

SCHEMA = "tcss/1"


@dataclass(frozen=True)
class BLPair:
    b: int
    l: int
    j: int
    n: int

    @property
    def exponent(self) -> int:
        return self.n - 1

    def name(self) -> str:
        return f"z0^{self.n - 1} s^{self.j} dz"


def bl_n(p: int, e: int, j: int, b: int, l: int) -> Fraction:
    return Fraction(p * e * (j - 1) + b * p ** l, p - 1)


def _make_pair(p: int, e: int, j: int, b: int, l: int) -> BLPair | None:
    if b % p == 0 or (b + e * (j - 1)) % (p - 1):
        return None
    n = bl_n(p, e, j, b, l)
    if n.denominator != 1:
        return None
    pair = BLPair(b, l, j, int(n))
    # l must be recoverable from the exponent alone
    assert vp(pair.n * (p - 1) - p * e * (j - 1), p) == l
    return pair


def _window_pairs(p: int, e: int, j: int, n_cap: int, l_min: int, shift: int) -> list[BLPair]:
    """Pairs with -e(j-1)/p^{l-shift} < b < pe - ej/p^{l-shift} and 1 <= n <= n_cap."""
    out = []
    l = l_min
    while True:
        scale = Fraction(p) ** (l - shift)
        lo = Fraction(-e * (j - 1)) / scale
        hi = p * e - Fraction(e * j) / scale
        for b in range(lo.__floor__() + 1, hi.__ceil__()):
            pair = _make_pair(p, e, j, b, l)
            if pair is not None and 1 <= pair.n <= n_cap:
                out.append(pair)
        # past this l only b >= 1 is admissible and n increases with l
        if scale > e * abs(j - 1) and bl_n(p, e, j, 1, l) > n_cap:
            break
        l += 1
    return sorted(out, key=lambda x: x.n)


def _extra_class(p: int, e: int, j: int, n_cap: int) -> BLPair | None:
    if j > 1 and (e * (j - 1)) % (p - 1) == 0:
        n = p * e * (j - 1) // (p - 1)
        if n <= n_cap:
            return BLPair(0, -1, j, n)
    return None


@dataclass(frozen=True)
class RowBases:
    j: int
    row0: tuple[int, ...]       # z-exponents n of z^n sigma^j
    row1: tuple[BLPair, ...]    # leading terms z_0^{n-1} sigma^j dz

    def row1_exponents(self) -> tuple[int, ...]:
        return tuple(sorted(x.n for x in self.row1))


def _row0(field: LocalField, j: int, n_cap: int) -> tuple[int, ...]:
    p, e = field.p, field.e
    if j >= 0 and (e * j) % (p - 1) == 0:
        n = p * e * j // (p - 1)
        if n <= n_cap:
            return (n,)
    return ()


def e2_tp_bases(field: LocalField, j: int, n_cap: int) -> RowBases:
    p, e = field.p, field.e
    pairs = _window_pairs(p, e, j, n_cap, l_min=1, shift=1)
    extra = _extra_class(p, e, j, n_cap)
    if extra:
        pairs.append(extra)
    return RowBases(j, _row0(field, j, n_cap), tuple(sorted(pairs, key=lambda x: x.n)))


def e2_tcminus_bases(field: LocalField, j: int, n_cap: int) -> RowBases:
    if j <= 0:
        return e2_tp_bases(field, j, n_cap)
    p, e = field.p, field.e
    pairs = _window_pairs(p, e, j, n_cap, l_min=0, shift=0)
    extra = _extra_class(p, e, j, n_cap)
    if extra:
        pairs.append(extra)
    return RowBases(j, _row0(field, j, n_cap), tuple(sorted(pairs, key=lambda x: x.n)))


def ker_can_basis(field: LocalField, j: int) -> list[BLPair]:
    """Pairs with b in [pe(1-j), pe), p not dividing b, the congruence, and p^{l-1} <= ej/(pe-b) < p^l."""
    if j < 1:
        raise DomainViolation("ker(can) is enumerated for j >= 1")
    p, e = field.p, field.e
    out = []
    for b in range(p * e * (1 - j), p * e):
        if b % p == 0 or (b + e * (j - 1)) % (p - 1):
            continue
        ratio = Fraction(e * j, p * e - b)
        l = 0
        while Fraction(p) ** l <= ratio:
            l += 1
        # now ratio < p^l and, if l > 0, p^{l-1} <= ratio
        if Fraction(p) ** (l - 1) <= ratio:
            n = bl_n(p, e, j, b, l)
            if n.denominator == 1:
                out.append(BLPair(b, l, j, int(n)))
    if len(out) != e * j:
        raise AssertionError(f"ker(can) has {len(out)} classes, expected {e * j}")
    return sorted(out, key=lambda x: (x.b, x.l))


def ker_can_engine(field: LocalField, j: int, n_cap: int) -> list[int]:
    """ker(can) read off the engine: TC^- survivors in row -1 that TP kills."""
    tp = specseq.run(field, [j], n_cap, specseq.TP)
    tcm = specseq.run(field, [j], n_cap, specseq.TCMINUS)
    tp_s = {c.n for c in specseq.einf_extract(tp, 1, j)}
    return sorted(c.n for c in specseq.einf_extract(tcm, 1, j) if c.n not in tp_s)


def ker_can_window(field: LocalField, j: int, n_cap: int | None = None) -> list[BLPair]:
    """ker_can_basis restricted to classes on the TC^- first page (and n <= n_cap), by n."""
    p, e = field.p, field.e
    step = p if e == 1 else 1
    out = [x for x in ker_can_basis(field, j)
           if x.n >= 1 and x.n % step == 0 and specseq.in_truncation(specseq.TCMINUS, 1, x.n, j, e)
           and (n_cap is None or x.n <= n_cap)]
    return sorted(out, key=lambda x: x.n)


# ---------------------------------------------------------------------------
# Frobenius and can - phi

@dataclass(frozen=True)
class LeadingTerm:
    row: int          # 0 or -1
    j: int
    n: int            # z-exponent (row 0) or column-1 index (row -1: z_0^{n-1})
    coeff: Fq

    def name(self) -> str:
        if self.row == 0:
            return f"{self.coeff} z^{self.n} s^{self.j}"
        return f"{self.coeff} z0^{self.n - 1} s^{self.j} dz"


def frobenius_leading(field: LocalField, cls: LeadingTerm) -> LeadingTerm:
    """Leading term of phi applied to a TC^- class (coefficients pass through Frobenius)."""
    p, e, j = field.p, field.e, cls.j
    k = field.k
    c = fq_frobenius(k, cls.coeff)
    if cls.row == 0:
        if cls.n < e * j:
            raise DomainViolation("row-0 input needs n >= e*j")
        return LeadingTerm(0, j, p * (cls.n - e * j), c * field.mu_bar ** (-p * j))
    if cls.row == -1:
        # sign as measured in the divided power model: phi(s(z0-z1)) = +z0^{p-1} s (z0-z1)
        return LeadingTerm(-1, j, p * (cls.n - e * (j - 1)), c * field.mu_bar ** (-p * (j - 1)))
    raise DomainViolation("row must be 0 or -1")


def critical_filtration(field: LocalField, j: int) -> Fraction:
    p, e = field.p, field.e
    return Fraction(p * j - 1, p - 1) - Fraction(1, e)


@dataclass(frozen=True)
class CanPhi:
    j: int
    kernel: tuple[tuple[str, int, int], ...]     # (kind, b, n); kind in {"alpha", "gamma"}
    kernel_fp_dim: int
    coker: tuple[tuple[str, int], ...]           # ("gamma-line", n)
    coker_fp_dim: int
    row0_kernel_fp_dim: int
    row0_coker_fp_dim: int
    corrections: tuple[tuple[int, int], ...]     # (n of alpha, n of leading term of can^{-1} phi(alpha))


def can_phi_analysis(field: LocalField, j: int, n_cap: int | None = None) -> CanPhi:
    """Kernel and cokernel of can - phi in rows 0 and -1 at sigma-weight j."""
    p, e, f, k = field.p, field.e, field.f, field.k
    # row 0: phi(c z^{pej/(p-1)} s^j) = c^p mu^{-pj} z^{pej/(p-1)} s^j
    r0k = r0c = 0
    if j >= 0 and (e * j) % (p - 1) == 0:
        sol = h90_solve(k, field.mu_bar ** (-p * j), k.zero())
        r0k, r0c = sol.kernel_dim, sol.coker_dim
    if j <= 0:
        return CanPhi(j, (), 0, (), 0, r0k, r0c, ())
    kernel = []
    corrections = []
    crit = critical_filtration(field, j)
    for pair in ker_can_basis(field, j):
        if pair.b > 0:
            m = specseq.filtration(1, pair.n, e)
            assert m > crit
            kernel.append(("alpha", pair.b, pair.n))
            img = frobenius_leading(field, LeadingTerm(-1, j, pair.n, k.one()))
            assert specseq.filtration(1, img.n, e) > m
            corrections.append((pair.n, img.n))
    kdim = f * len(kernel)
    coker = []
    cdim = 0
    if j > 1 and (e * (j - 1)) % (p - 1) == 0:
        n = p * e * (j - 1) // (p - 1)
        assert specseq.filtration(1, n, e) == crit
        # on the critical line can - phi acts as c -> c - b phi(c)
        sol = h90_solve(k, field.mu_bar ** (-p * (j - 1)), k.zero())
        if sol.kernel_dim:
            kernel.append(("gamma", 0, n))
            kdim += sol.kernel_dim
        if sol.coker_dim:
            coker.append(("gamma-line", n))
            cdim += sol.coker_dim
    return CanPhi(j, tuple(kernel), kdim, tuple(coker), cdim, r0k, r0c, tuple(corrections))


# ---------------------------------------------------------------------------
# TC inventory and homotopy

def beta_root(field: LocalField) -> Fq:
    """Smallest-index c in k^x with c^{p-1} = mu^{pd}."""
    p, d, k = field.p, field.d, field.k
    target = field.mu_bar ** (p * d)
    for i in range(1, k.q):
        c = k.from_index(i)
        if c ** (p - 1) == target:
            return c
    raise AssertionError("no (p-1)-th root of mu^{pd}; d is inconsistent")


@dataclass(frozen=True)
class Generator:
    name: str
    column: int
    weight: int          # sigma-weight j
    leading: str

    @property
    def degree(self) -> int:
        return self.column + 2 * self.weight


@dataclass
class TCReport:
    field: LocalField
    generators: list[Generator]
    column_ranks: dict[int, int]
    column_dims: dict[int, dict[int, int]] = field(default_factory=dict)   # column -> weight -> F_p dim
    homotopy: list[dict] = field(default_factory=list)

    @property
    def d(self) -> int:
        return self.field.d

    def to_json(self) -> dict:
        F = self.field
        return {
            "schema": SCHEMA,
            "field": {"p": F.p, "e": F.e, "f": F.f, "d": F.d},
            "e2": {"columns": {str(c): {"rank": self.column_ranks.get(c, 0),
                                        "generators": [g.name for g in self.generators if g.column == c]}
                               for c in (0, -1, -2)},
                   "generators": [{"name": g.name, "column": g.column, "weight": g.weight,
                                   "degree": g.degree, "leading": g.leading} for g in self.generators]},
            "homotopy": self.homotopy,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _column_dims(field: LocalField, jmax: int) -> dict[int, dict[int, int]]:
    dims: dict[int, dict[int, int]] = {0: {}, -1: {}, -2: {}}
    for j in range(0, jmax + 1):
        cp = can_phi_analysis(field, j)
        dims[0][j] = cp.row0_kernel_fp_dim
        dims[-1][j] = cp.row0_coker_fp_dim + cp.kernel_fp_dim
        dims[-2][j] = cp.coker_fp_dim
    return dims


def tc_e2_inventory(field: LocalField, degree_cap: int | None = None) -> TCReport:
    """Generators of E2(TC) over F_p[beta], read off from can - phi weight by weight."""
    p, e, f, d = field.p, field.e, field.f, field.d
    jmax = max(3 * d + 2, (degree_cap or 0) // 2 + 1)
    dims = _column_dims(field, jmax)
    ranks = {}
    for c, by_j in dims.items():
        # a free F_p[beta]-module has dim_j - dim_{j-d} generators in weight j
        gens = [by_j[j] - by_j.get(j - d, 0) for j in range(0, jmax + 1)]
        if any(g < 0 for g in gens) or any(gens[j] for j in range(2 * d + 2, jmax + 1)):
            raise AssertionError(f"column {c} is not free over F_p[beta] in the window")
        ranks[c] = sum(gens)
    for c, by_j in dims.items():
        for j, v in by_j.items():
            if v and (c + 2 * j) % 2 and c != -1:
                raise AssertionError(f"column {c} has an odd-degree class")
    root = beta_root(field)
    n_beta = p * e * d // (p - 1)
    gens = [Generator("beta", 0, d, f"{root} z^{n_beta} s^{d}"),
            Generator("1", 0, 0, "1"),
            Generator("lambda", -1, 0, "F_p-basis of the row-0 cokernel at weight 0"),
            Generator("gamma", -1, d + 1, f"{root} z0^{n_beta - 1} s^{d + 1} dz")]
    for j in range(1, d + 1):
        cp = can_phi_analysis(field, j)
        alphas = sorted(x for x in cp.kernel if x[0] == "alpha")
        for i, (_, b, n) in enumerate(alphas, start=1):
            for l in range(1, f + 1):
                gens.append(Generator(f"alpha^({j})_{i},{l}", -1, j, f"x^{l - 1} z0^{n - 1} s^{j} dz (b={b})"))
    gens.append(Generator("lambda*gamma", -2, d + 1, "coker of can - phi on the critical line"))
    expected = {0: 1, -1: 2 + e * d * f, -2: 1}
    listed = {c: sum(1 for g in gens if g.column == c and g.name != "beta") for c in (0, -1, -2)}
    if listed != ranks or ranks != expected:
        raise AssertionError(f"inventory mismatch: computed {ranks}, listed {listed}, expected {expected}")
    return TCReport(field, gens, ranks, dims)


def _module_summands(field: LocalField) -> list[tuple[str, int, int, int]]:
    """Cyclic summands as (name, degree, step, order): generator in degree, repeated every step."""
    p, e, f, d = field.p, field.e, field.f, field.d
    inv = tc_e2_inventory(field)
    out = []
    alpha_names = [g for g in inv.generators if g.name.startswith("alpha")]
    if p == 2 and (e * f) % 2 == 1:
        out.append(("1", 0, 4, 2))
        out.append(("beta", 2, 4, 4))
        out.append(("lambda", -1, 2, 2))
        out.append(("gamma", 3, 2, 2))
        out.append(("beta*lambda*gamma", 4, 4, 2))
    else:
        for name, deg in (("1", 0), ("lambda", -1), ("gamma", 2 * d + 1), ("lambda*gamma", 2 * d)):
            out.append((name, deg, 2 * d, p))
    for g in alpha_names:
        out.append((g.name, g.degree, 2 * d, p))
    return out


def tc_homotopy_groups(field: LocalField, degree_window: tuple[int, int]) -> TCReport:
    """Cyclic orders of TC_*(O_K; F_p) per degree in the window."""
    lo, hi = degree_window
    if lo > hi:
        raise ValueError("empty degree window")
    inv = tc_e2_inventory(field, max(hi, 0))
    summands = _module_summands(field)
    rows = []
    for deg in range(lo, hi + 1):
        orders, names = [], []
        for name, g_deg, step, order in summands:
            if deg >= g_deg and (deg - g_deg) % step == 0:
                k = (deg - g_deg) // step
                power = k * step // 2 if field.p == 2 else k
                names.append(name if power == 0 else f"beta^{power}*{name}" if name != "1" else f"beta^{power}")
                orders.append(order)
        ordered = sorted(zip(orders, names), key=lambda x: (-x[0], x[1]))
        rows.append({"degree": deg, "orders": [o for o, _ in ordered], "generators": [n for _, n in ordered]})
    inv.homotopy = rows
    return inv


def homotopy_orders(report: TCReport, degree: int) -> list[int]:
    for row in report.homotopy:
        if row["degree"] == degree:
            return row["orders"]
    raise KeyError(degree)


# ---------------------------------------------------------------------------
# cross-check against the engine

@dataclass(frozen=True)
class Mismatch:
    variant: str
    column: int
    j: int
    closed: tuple[int, ...]
    engine: tuple[int, ...]


@dataclass(frozen=True)
class CrosscheckReport:
    field_label: str
    compared: int
    mismatches: tuple[Mismatch, ...]

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {"field": self.field_label, "compared": self.compared, "pass": self.passed,
                "mismatches": [m.__dict__ for m in self.mismatches]}


def crosscheck_with_specseq(field: LocalField, j_range: Iterable[int], n_cap: int) -> CrosscheckReport:
    """Closed-form leading exponents versus engine survivors, TP and TC^-."""
    js = list(j_range)
    mism = []
    compared = 0
    for variant, bases in ((specseq.TP, e2_tp_bases), (specseq.TCMINUS, e2_tcminus_bases)):
        st = specseq.run(field, js, n_cap, variant)
        for j in js:
            rb = bases(field, j, n_cap)
            eng0 = tuple(c.n for c in specseq.einf_extract(st, 0, j))
            eng1 = tuple(sorted(c.n for c in specseq.einf_extract(st, 1, j)))
            for column, closed, engine in ((0, tuple(rb.row0), eng0), (1, rb.row1_exponents(), eng1)):
                compared += 1
                if closed != engine:
                    mism.append(Mismatch(variant, column, j, closed, engine))
    return CrosscheckReport(field.label(), compared, tuple(mism))
