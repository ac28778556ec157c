"""Refined Tate and homotopy fixed point spectral sequence engine.

Each sigma-weight j is an independent two-column stratum.  Column 0 holds
z^n sigma^j (filtration n/e), column 1 holds z_0^{n-1} sigma^j dz (filtration
(n-1)/e + 1).  Every differential comes from the closed formula in
``differential_of``; the engine only seeds, fires and records.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .arith import Fq, vp
from .errors import ConsistencyViolation
from .localfield import LocalField

TP = "TP"
TCMINUS = "TCminus"

SURVIVOR = "survivor"
INDETERMINATE = "indeterminate"
HIT = "hit"
SOURCE = "source"


def fmt_frac(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class SSClass:
    column: int
    j: int
    n: int
    coeff: Fq
    filtration: Fraction

    def to_json(self) -> dict:
        return {"column": self.column, "j": self.j, "n": self.n,
                "coeff": list(self.coeff.c), "filtration": fmt_frac(self.filtration)}

    def name(self) -> str:
        if self.column == 0:
            return f"z^{self.n} s^{self.j}"
        return f"z0^{self.n - 1} s^{self.j} dz"


def filtration(column: int, n: int, e: int) -> Fraction:
    if column == 0:
        return Fraction(n, e)
    return Fraction(n - 1, e) + 1


@dataclass(frozen=True)
class Differential:
    r: Fraction
    l: int
    target_exponent: int      # exponent of z_0 in the target z_0^{...} sigma^j dz
    coefficient: Fq

    @property
    def target_n(self) -> int:
        return self.target_exponent + 1


def _mutilde_power(field: LocalField, l: int) -> Fq:
    return field.mutilde_bar ** ((field.p ** l - 1) // (field.p - 1))


def differential_of(field: LocalField, n: int, j: int) -> Differential | None:
    """The differential leaving z^n sigma^j, or None for a permanent cycle."""
    if n < 0:
        raise ValueError("n must be non-negative")
    p, e = field.p, field.e
    M = n * (p - 1) - p * e * j
    if M == 0:
        return None
    l = vp(M, p)
    r = Fraction(p ** (l + 1) - 1, p - 1) - Fraction(1, e)
    unit = (M // p ** l) % p
    nprime = unit * pow(p - 1, -1, p) % p
    target = p * e * (p ** l - 1) // (p - 1) + n - 1
    coeff = _mutilde_power(field, l) * nprime
    return Differential(r, l, target, coeff)


def source_l_from_target(field: LocalField, target_n: int, j: int) -> int | None:
    """l recovered from a column-1 index alone: v_p(n(p-1) - pe(j-1))."""
    p, e = field.p, field.e
    Mt = target_n * (p - 1) - p * e * (j - 1)
    return None if Mt == 0 else vp(Mt, p)


@dataclass(frozen=True)
class LedgerEntry:
    j: int
    source: int
    target: int
    page: Fraction
    coefficient: Fq

    def to_json(self) -> dict:
        return {"j": self.j, "source": self.source, "target": self.target,
                "page": fmt_frac(self.page), "coeff": list(self.coefficient.c)}


@dataclass
class PageState:
    field: LocalField
    variant: str
    n_cap: int
    j_range: tuple[int, ...]
    page: Fraction | None = None  # None encodes infinity
    live: dict[tuple[int, int], dict[int, str]] = field(default_factory=dict)
    ledger: list[LedgerEntry] = field(default_factory=list)

    def classes(self, column: int, j: int, status: str | None = None) -> list[SSClass]:
        e = self.field.e
        one = self.field.k.one()
        out = []
        for n, st in sorted(self.live.get((column, j), {}).items()):
            if status is None or st == status:
                out.append(SSClass(column, j, n, one, filtration(column, n, e)))
        return out

    def to_json(self) -> dict:
        cls = []
        for (column, j) in sorted(self.live):
            for c in self.classes(column, j):
                d = c.to_json()
                d["status"] = self.live[(column, j)][c.n]
                cls.append(d)
        return {"page": "inf" if self.page is None else fmt_frac(self.page),
                "variant": self.variant, "classes": cls,
                "ledger": [x.to_json() for x in self.ledger]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def in_truncation(variant: str, column: int, n: int, j: int, e: int) -> bool:
    if variant == TP:
        return True
    if column == 0:
        return n >= e * j
    return n - 1 >= e * (j - 1)


def seed_page(field: LocalField, j_range: Iterable[int], n_cap: int, variant: str = TP) -> PageState:
    """First page: column 0 with z^n sigma^j, column 1 with z_0^{n-1} sigma^j dz, n <= n_cap."""
    if n_cap <= 0:
        raise ValueError("n_cap must be positive")
    if variant not in (TP, TCMINUS):
        raise ValueError(f"unknown variant {variant!r}")
    p, e = field.p, field.e
    js = tuple(j_range)
    state = PageState(field, variant, n_cap, js, page=Fraction(1, e))
    step = p if e == 1 else 1
    for j in js:
        col0 = {n: SURVIVOR for n in range(0, n_cap + 1, step)
                if in_truncation(variant, 0, n, j, e)}
        col1 = {n: SURVIVOR for n in range(step, n_cap + 1, step)
                if in_truncation(variant, 1, n, j, e)}
        state.live[(0, j)] = col0
        state.live[(1, j)] = col1
    return state


def run_to_infinity(state: PageState) -> PageState:
    """Fire every differential in increasing page order."""
    field = state.field
    e = field.e
    pending = []
    for j in state.j_range:
        for n in list(state.live[(0, j)]):
            dif = differential_of(field, n, j)
            if dif is None:
                continue
            if e == 1 and dif.l == 0:
                continue  # absorbed in the first page
            pending.append((dif.r, j, n, dif))
    pending.sort(key=lambda x: (x[0], x[1], x[2]))
    claimed: dict[tuple[int, int], int] = {}
    for r, j, n, dif in pending:
        col0, col1 = state.live[(0, j)], state.live[(1, j)]
        tgt = dif.target_n
        if tgt > state.n_cap:
            col0[n] = INDETERMINATE
            continue
        if not in_truncation(state.variant, 1, tgt, j, e) or tgt not in col1:
            continue
        if (j, tgt) in claimed:
            raise ConsistencyViolation(
                f"z0^{tgt - 1} s^{j} dz targeted by n={claimed[(j, tgt)]} and n={n}")
        if col0[n] != SURVIVOR or col1[tgt] != SURVIVOR:
            continue
        if source_l_from_target(field, tgt, j) != dif.l:
            raise ConsistencyViolation(f"pairing l mismatch at j={j}, n={n}")
        if filtration(1, tgt, e) - filtration(0, n, e) != r:
            raise ConsistencyViolation(f"filtration bookkeeping fails at j={j}, n={n}")
        claimed[(j, tgt)] = n
        col0[n] = SOURCE
        col1[tgt] = HIT
        state.ledger.append(LedgerEntry(j, n, tgt, r, dif.coefficient))
    state.page = None
    return state


def einf_extract(state: PageState, column: int, j: int) -> list[SSClass]:
    """Certified survivors at E-infinity, sorted by filtration."""
    if state.page is not None:
        raise ValueError("state has not been run to infinity")
    out = state.classes(column, j, SURVIVOR)
    return sorted(out, key=lambda c: c.filtration)


def run(field: LocalField, j_range: Iterable[int], n_cap: int, variant: str = TP) -> PageState:
    return run_to_infinity(seed_page(field, j_range, n_cap, variant))
