"""The local field K, given by an Eisenstein polynomial over W(k) with constant term p."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

from .arith import (
    FieldCtx,
    Fq,
    WittCtx,
    WittElement,
    fq_norm,
    make_field,
    make_witt,
    witt_frobenius,
)
from .errors import (
    BadConstant,
    NonUnitLeading,
    NotEisenstein,
    PrecisionTooLow,
    SpecFormatError,
)

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

DEFAULT_PRECISION = 4


@dataclass(frozen=True)
class LocalField:
    witt: WittCtx
    e: int
    coeffs: tuple[WittElement, ...]  # c_0 .. c_e
    mu: WittElement
    mu_bar: Fq
    d: int
    deltaE_modp: tuple[Fq, ...]  # coefficients of delta(E)(z) mod p, degree <= p*e
    mutilde_bar: Fq
    eprime_bar: tuple[Fq, ...]  # E'(z) mod (p, z^e): only the z^{e-1} term survives
    int_coeffs: tuple[tuple[int, ...], ...] = ()  # integer lifts of c_0 .. c_e as given

    def coeff_tuples(self, P: int) -> list[tuple[int, ...]]:
        """Coefficients c_0 .. c_e reduced mod P, from the integer lifts when available."""
        if self.int_coeffs:
            return [tuple(x % P for x in c) for c in self.int_coeffs]
        return [tuple(int(x) % P for x in c.c) for c in self.coeffs]

    @property
    def k(self) -> FieldCtx:
        return self.witt.field

    @property
    def p(self) -> int:
        return self.witt.p

    @property
    def f(self) -> int:
        return self.witt.f

    @property
    def N(self) -> int:
        return self.witt.N

    def label(self) -> str:
        if self.mu_bar == self.k.one():
            return f"(p={self.p}, e={self.e}, f={self.f})"
        return f"(p={self.p}, e={self.e}, f={self.f}, mu={self.mu_bar})"

    def to_spec(self) -> dict[str, Any]:
        """Serialize back to the input format."""
        return {
            "p": self.p,
            "f": self.f,
            "modulus": list(self.k.modulus),
            "e": self.e,
            "precision": self.N,
            "eisenstein_mid": [list(c.c) for c in self.coeffs[1:-1]],
            "mu": list(self.mu.c),
        }

    def invariants(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "e": self.e,
            "f": self.f,
            "modulus": list(self.k.modulus),
            "precision": self.N,
            "mu_bar": list(self.mu_bar.c),
            "d": self.d,
            "mutilde_bar": list(self.mutilde_bar.c),
            "deltaE_mod_p": [list(c.c) for c in self.deltaE_modp],
        }


# polynomial helpers over W(k)/p^N: lists of coefficient tuples, lowest first

def _wpoly_mul(W: WittCtx, a: Sequence[tuple], b: Sequence[tuple]) -> list[tuple]:
    out = [W.t_zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if any(x):
            for j, y in enumerate(b):
                out[i + j] = W.t_add(out[i + j], W.t_mul(x, y))
    return out


def _wpoly_pow(W: WittCtx, a: Sequence[tuple], n: int) -> list[tuple]:
    out = [W.t_one]
    for _ in range(n):
        out = _wpoly_mul(W, out, a)
    return out


def delta_E_mod_p(W: WittCtx, coeffs: Sequence[WittElement]) -> tuple[Fq, ...]:
    """(E^phi(z^p) - E(z)^p)/p reduced mod p; the division is exact."""
    if W.N < 2:
        raise PrecisionTooLow("delta(E) needs precision at least 2")
    p = W.p
    e = len(coeffs) - 1
    raw = [c.c for c in coeffs]
    Ephi = [W.t_zero] * (p * e + 1)
    for i, c in enumerate(coeffs):
        Ephi[p * i] = witt_frobenius(W, c).c
    Ep = _wpoly_pow(W, raw, p)
    diff = [W.t_sub(x, y) for x, y in zip(Ephi, Ep)]
    q = [W.t_div_p(x) for x in diff]
    return tuple(W.field.elem([x % p for x in c]) for c in q)


def compute_d(field_or_ctx, mu_bar: Fq | None = None, e: int | None = None) -> int:
    """Smallest d >= 1 with (p-1) | e*d and N(mu_bar)^d = 1."""
    if isinstance(field_or_ctx, LocalField):
        k, mu_bar, e = field_or_ctx.k, field_or_ctx.mu_bar, field_or_ctx.e
    else:
        k = field_or_ctx
    p = k.p
    norm = fq_norm(k, mu_bar)
    d = 1
    while True:
        if (e * d) % (p - 1) == 0 and norm ** d == k.one():
            return d
        d += 1


def mutilde_bar(field: LocalField) -> Fq:
    return field.mutilde_bar


def _mutilde(k: FieldCtx, mu_bar: Fq, deltaE: Sequence[Fq]) -> Fq:
    return -(mu_bar ** k.p) * deltaE[0].inverse()


def _as_int_seq(value: Any, what: str) -> list[int]:
    if isinstance(value, int) and not isinstance(value, bool):
        return [value]
    if isinstance(value, (list, tuple)) and all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        return list(value)
    raise SpecFormatError(f"{what} must be an integer or a list of integers")


def _require_int(spec: Mapping[str, Any], key: str) -> int:
    if key not in spec:
        raise SpecFormatError(f"missing key {key!r}")
    v = spec[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise SpecFormatError(f"{key!r} must be an integer")
    return v


def parse_field(spec: Mapping[str, Any]) -> LocalField:
    """Validate a field spec mapping and compute the derived invariants."""
    if not isinstance(spec, Mapping):
        raise SpecFormatError("field spec must be a mapping")
    p = _require_int(spec, "p")
    f = _require_int(spec, "f")
    e = _require_int(spec, "e")
    if e < 1 or f < 1:
        raise SpecFormatError("e and f must be positive")
    N = spec.get("precision", DEFAULT_PRECISION)
    if not isinstance(N, int) or isinstance(N, bool):
        raise SpecFormatError("precision must be an integer")
    if N < 2:
        raise PrecisionTooLow("precision must be at least 2")
    modulus = spec.get("modulus")
    if modulus is not None:
        modulus = _as_int_seq(modulus, "modulus")
    k = make_field(p, f, modulus)
    W = make_witt(k, N)

    c0 = spec.get("c0", p)
    if _as_int_seq(c0, "c0") != [p]:
        raise BadConstant(f"constant term must be exactly p = {p}")
    mid = spec.get("eisenstein_mid", [[0]] * (e - 1) if e > 1 else [])
    if not isinstance(mid, (list, tuple)) or len(mid) != e - 1:
        raise SpecFormatError("eisenstein_mid must list e-1 coefficient sequences")
    if "mu" not in spec:
        raise SpecFormatError("missing key 'mu'")
    mid_seqs = [_as_int_seq(c, "eisenstein_mid entry") for c in mid]
    mu_seq = _as_int_seq(spec["mu"], "mu")
    for seq in mid_seqs + [mu_seq]:
        if len(seq) > f:
            raise SpecFormatError("coefficient sequences have length at most f")

    coeffs = [W.from_int(p)] + [W.elem(s) for s in mid_seqs] + [W.elem(mu_seq)]
    for i, c in enumerate(coeffs[1:-1], start=1):
        if c.valuation() == 0:
            raise NotEisenstein(f"coefficient c_{i} is not divisible by p")
    mu = coeffs[-1]
    if not mu.is_unit():
        raise NonUnitLeading("leading coefficient must be a unit")
    ints = [[p]] + mid_seqs + [mu_seq]
    ints = tuple(tuple(s + [0] * (f - len(s))) for s in ints)
    return _build(W, e, tuple(coeffs), ints)


def _build(W: WittCtx, e: int, coeffs: tuple[WittElement, ...],
           ints: tuple[tuple[int, ...], ...] = ()) -> LocalField:
    k = W.field
    mu = coeffs[-1]
    mu_bar = mu.reduce()
    deltaE = delta_E_mod_p(W, coeffs)
    d = compute_d(k, mu_bar, e)
    eprime = [k.zero()] * e
    eprime[e - 1] = mu_bar * (e % k.p)
    return LocalField(
        witt=W,
        e=e,
        coeffs=coeffs,
        mu=mu,
        mu_bar=mu_bar,
        d=d,
        deltaE_modp=deltaE,
        mutilde_bar=_mutilde(k, mu_bar, deltaE),
        eprime_bar=tuple(eprime),
        int_coeffs=ints,
    )


def load_spec_file(path: str | Path) -> dict[str, Any]:
    """Read a JSON or TOML field spec."""
    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix.lower() == ".toml":
            return tomllib.loads(text)
        return json.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise SpecFormatError(f"cannot parse {path}: {exc}") from exc


def simple_field(p: int, e: int = 1, f: int = 1, mu: int | Sequence[int] = 1,
                 mid: Sequence[Sequence[int]] | None = None, precision: int = DEFAULT_PRECISION,
                 modulus: Sequence[int] | None = None) -> LocalField:
    """Convenience constructor; defaults to E = mu*z^e + p."""
    spec: dict[str, Any] = {"p": p, "f": f, "e": e, "precision": precision,
                            "mu": mu if not isinstance(mu, int) else [mu],
                            "eisenstein_mid": [list(m) for m in mid] if mid else [[0]] * (e - 1)}
    if modulus is not None:
        spec["modulus"] = list(modulus)
    return parse_field(spec)


def cyclotomic_spec(p: int, precision: int = DEFAULT_PRECISION) -> dict[str, Any]:
    """Field spec for Q_p(zeta_p) with uniformizer zeta_p - 1: E = ((1+z)^p - 1)/z."""
    from math import comb

    mid = [[comb(p, i + 1)] for i in range(1, p - 1)]
    return {"p": p, "f": 1, "e": p - 1, "precision": precision, "eisenstein_mid": mid, "mu": [1]}


def grid_fields() -> list[LocalField]:
    """The default verification grid."""
    fields = [simple_field(p, e, f) for p, e, f in
              [(2, 1, 1), (2, 3, 1), (2, 5, 1), (3, 1, 1), (3, 2, 1), (3, 2, 2), (5, 4, 1)]]
    fields.append(simple_field(5, 4, 1, mu=2))
    return fields
