import json

import pytest

from tcss.errors import BadConstant, NonUnitLeading, NotEisenstein, PrecisionTooLow, SpecFormatError
from tcss.localfield import (
    compute_d,
    cyclotomic_spec,
    grid_fields,
    load_spec_file,
    parse_field,
    simple_field,
)


def _int_delta_E(p, coeffs):
    """Independent oracle for f = 1: (E(z^p) - E(z)^p)/p over the integers."""
    e = len(coeffs) - 1
    Ep = [1]
    for _ in range(p):
        nxt = [0] * (len(Ep) + e)
        for a, x in enumerate(Ep):
            for b, y in enumerate(coeffs):
                nxt[a + b] += x * y
        Ep = nxt
    Ephi = [0] * (p * e + 1)
    for i, c in enumerate(coeffs):
        Ephi[p * i] = c
    diff = [x - y for x, y in zip(Ephi, Ep)]
    assert all(x % p == 0 for x in diff)
    return [(x // p) % p for x in diff]


def test_parse_examples():
    F = parse_field({"p": 3, "f": 1, "e": 1, "mu": [1]})
    assert F.mu_bar == F.k.one()
    F = parse_field({"p": 3, "f": 1, "e": 2, "eisenstein_mid": [[0]], "mu": [1]})
    assert F.e == 2
    with pytest.raises(NotEisenstein):
        parse_field({"p": 3, "f": 1, "e": 2, "eisenstein_mid": [[1]], "mu": [1]})


def test_parse_errors():
    with pytest.raises(NonUnitLeading):
        parse_field({"p": 3, "f": 1, "e": 1, "mu": [3]})
    with pytest.raises(BadConstant):
        parse_field({"p": 3, "f": 1, "e": 1, "mu": [1], "c0": 6})
    with pytest.raises(PrecisionTooLow):
        parse_field({"p": 3, "f": 1, "e": 1, "mu": [1], "precision": 1})
    with pytest.raises(SpecFormatError):
        parse_field({"p": 3, "f": 1, "e": 2, "mu": [1], "eisenstein_mid": []})
    with pytest.raises(SpecFormatError):
        parse_field({"p": 3, "e": 1, "mu": [1]})
    with pytest.raises(SpecFormatError):
        parse_field({"p": 3, "f": 1, "e": 1, "mu": [1, 2]})


def test_d_values():
    for p in (2, 3, 5, 7):
        assert compute_d(simple_field(p)) == p - 1 or p == 2
    assert compute_d(simple_field(2)) == 1
    for p in (3, 5):
        assert compute_d(parse_field(cyclotomic_spec(p))) == 1
    assert [F.d for F in grid_fields()] == [1, 1, 1, 2, 1, 1, 1, 4]


def test_d_matches_definition_by_brute_force():
    from tcss.arith import fq_norm

    for F in grid_fields():
        p, e = F.p, F.e
        N = fq_norm(F.k, F.mu_bar)
        d = next(d for d in range(1, 100) if (e * d) % (p - 1) == 0 and N ** d == F.k.one())
        assert F.d == d


def test_delta_E_examples_and_oracle():
    F = simple_field(3)
    assert [int(c.c[0]) for c in F.deltaE_modp] == [1, 0, 0, 0]
    F = simple_field(2, e=2)
    assert F.deltaE_modp[0] == F.k.one()
    for p, e, mid in [(3, 2, [[0]]), (5, 4, [[0], [5], [0]]), (2, 3, [[2], [0]]), (3, 2, [[6]])]:
        F = simple_field(p, e, mid=mid)
        coeffs = [p] + [m[0] for m in mid] + [1]
        assert [int(c.c[0]) for c in F.deltaE_modp] == _int_delta_E(p, coeffs)


def test_delta_E_negative_lift():
    F = simple_field(3, 2, mid=[[-3]])
    assert [int(c.c[0]) for c in F.deltaE_modp] == _int_delta_E(3, [3, -3, 1])


def test_constant_term_of_delta_E_is_one():
    for F in grid_fields():
        assert F.deltaE_modp[0] == F.k.one()


def test_mutilde():
    assert simple_field(3).mutilde_bar == simple_field(3).k.from_int(2)
    assert simple_field(2).mutilde_bar == simple_field(2).k.one()
    F = simple_field(5, 4, mu=2)
    assert F.mutilde_bar == F.k.from_int(3)


def test_roundtrip_and_files(tmp_path):
    F = simple_field(3, 2, 2, mu=[1, 1])
    G = parse_field(F.to_spec())
    assert G.invariants() == F.invariants()
    path = tmp_path / "f.json"
    path.write_text(json.dumps(F.to_spec()))
    assert parse_field(load_spec_file(path)).invariants() == F.invariants()
    toml = tmp_path / "f.toml"
    toml.write_text("p = 2\nf = 1\ne = 3\neisenstein_mid = [[0], [2]]\nmu = [1]\n")
    assert parse_field(load_spec_file(toml)).e == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SpecFormatError):
        load_spec_file(bad)
