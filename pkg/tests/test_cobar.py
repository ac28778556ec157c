import numpy as np
import pytest
from hypothesis import given, strategies as st

from tcss.arith import vp
from tcss.cobar import (
    basis,
    closed_form_cycles_check,
    cobar_d,
    coproduct_of_t,
    gr_closed_form,
    gr_cobar_e2,
    gr_column0_basis,
    gr_column1_basis,
    gr_hopf,
    hh_bar_appendix,
    hopf_axioms_check,
    integral_ext,
    modp_differential_matrix,
    smith_valuations,
    thh_cobar_e2,
    thh_e2_closed_form,
    thh_hopf,
)
from tcss.errors import PrecisionTooLow
from tcss.localfield import grid_fields, simple_field


def _int_det(M):
    """Exact integer determinant by fraction-free elimination."""
    A = [list(map(int, r)) for r in M]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if A[i][k]), None)
            if sw is None:
                return 0
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1]


def _norm_valuation(p, coeffs, n):
    """v_p of the norm of n*E'(z) in Z[z]/(E) for monic E with integer coefficients."""
    e = len(coeffs) - 1
    dE = [n * i * c for i, c in enumerate(coeffs)][1:]
    cols = []
    for a in range(e):
        poly = [0] * a + dE
        # reduce modulo the monic E from the top
        for d in range(len(poly) - 1, e - 1, -1):
            c = poly[d]
            if c:
                for i in range(e + 1):
                    poly[d - e + i] -= c * coeffs[i]
        cols.append((poly + [0] * e)[:e])
    return vp(_int_det(np.array(cols).T), p)


@pytest.mark.parametrize("F", grid_fields(), ids=lambda F: F.label())
def test_thh_closed_form_matches_brute_force(F):
    brute = thh_cobar_e2(F, 10)
    closed = thh_e2_closed_form(F, 10)
    for b, c in zip(brute, closed):
        assert b.dims[:2] == c.dims and b.dims[2] == 0
        assert b.d1d0_zero and b.d2d1_zero
    assert all(cyc and ind for _, cyc, ind in closed_form_cycles_check(F, 10))


def test_thh_closed_form_examples():
    rows = thh_e2_closed_form(simple_field(3, 2), 3)
    assert [r.dims for r in rows] == [(2, 0), (1, 1), (1, 1), (2, 2)]
    rows = thh_e2_closed_form(simple_field(3), 6)
    assert [r.dims for r in rows] == [(1, 0), (0, 0), (0, 0), (1, 1), (0, 0), (0, 0), (1, 1)]


def test_d_squared_zero_on_random_monomials():
    H = thh_hopf(simple_field(3, 2, mu=2))
    for deg in range(5):
        for mono in basis(H, 1, deg):
            acc = {}
            for m, c in cobar_d(H, mono).items():
                for m2, c2 in cobar_d(H, m).items():
                    acc[m2] = acc.get(m2, H.k.zero()) + c * c2
            assert not any(acc.values())


def test_coproduct():
    assert coproduct_of_t(2) == [(0, 2), (1, 1), (2, 0)]


@pytest.mark.parametrize("F", grid_fields()[:4], ids=lambda F: F.label())
def test_hopf_axioms(F):
    rep = hopf_axioms_check(thh_hopf(F), 6)
    assert rep.passed and rep.checked > 0


def test_hopf_axioms_gr():
    for p, e in [(3, 1), (3, 2), (2, 3)]:
        assert hopf_axioms_check(gr_hopf(p, e), 6).passed


@pytest.mark.parametrize("p,e", [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3)])
def test_gr_page_matches_closed_form(p, e):
    page = gr_cobar_e2(6, e, p)
    assert page.matches


def test_gr_closed_form_examples():
    assert gr_closed_form(3, 1, 3) == (1, 1, 0)
    assert gr_closed_form(3, 1, 4) == (0, 0, 0)
    assert gr_closed_form(3, 2, 1) == (1, 0, 0)
    assert gr_closed_form(3, 2, 2) == (1, 1, 0)
    assert gr_column0_basis(3, 1, 7) == ["z^0", "z^3", "z^6"]
    assert gr_column1_basis(3, 1, 7) == ["r_3", "r_6"]
    assert len(gr_column1_basis(2, 3, 2)) == 4


def test_integral_ext_examples():
    (g,) = integral_ext(simple_field(3, 2), [3], precision=8)
    assert g.invariant_factors == (9, 3)
    from tcss.localfield import cyclotomic_spec, parse_field

    (g,) = integral_ext(parse_field(cyclotomic_spec(5)), [5], precision=8)
    assert g.invariant_factors == (25, 25, 25, 5)


@pytest.mark.parametrize("p,e,mid", [(3, 2, [[0]]), (2, 3, [[2], [0]]), (5, 2, [[5]]), (3, 3, [[3], [-3]]),
                                     (2, 2, [[2]])])
def test_integral_ext_order_matches_norm(p, e, mid):
    F = simple_field(p, e, mid=mid)
    coeffs = [p] + [m[0] for m in mid] + [1]
    for g in integral_ext(F, range(1, 13), precision=10):
        assert vp(g.order, p) == _norm_valuation(p, coeffs, g.n)


@pytest.mark.parametrize("F", grid_fields()[:5], ids=lambda F: F.label())
def test_integral_ext_reduces_to_modp(F):
    for g in integral_ext(F, range(1, 10), precision=16):
        M = modp_differential_matrix(F, g.n)
        # number of nontrivial invariant factors = dim of the mod p kernel
        rank_p = _rank_mod_p(M, F.p)
        assert len(g.invariant_factors) == F.e * F.f - rank_p


def _rank_mod_p(M, p):
    A = [[int(x) % p for x in row] for row in M]
    rank, cols = 0, len(A[0]) if A else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(A)) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [x * inv % p for x in A[rank]]
        for r in range(len(A)):
            if r != rank and A[r][c]:
                A[r] = [(x - A[r][c] * y) % p for x, y in zip(A[r], A[rank])]
        rank += 1
    return rank


def test_integral_ext_validation():
    with pytest.raises(ValueError):
        integral_ext(simple_field(3), [0])
    with pytest.raises(PrecisionTooLow):
        integral_ext(simple_field(3), [27], precision=2)


@given(st.lists(st.lists(st.integers(-50, 50), min_size=3, max_size=3), min_size=3, max_size=3))
def test_smith_valuations_against_determinant(rows):
    M = np.array(rows, dtype=object)
    det = _int_det(M)
    if det == 0 or vp(det, 3) >= 6:
        return
    vals = smith_valuations(M, 3, 8)
    assert sum(vals) == vp(det, 3)
    assert len([v for v in vals if v > 0]) == 3 - _rank_mod_p(M, 3)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("e", [1, 2, 3])
def test_hh_appendix(p, e):
    tab = hh_bar_appendix(p, 1, e, 4)
    assert len(tab.kdims) == 9
    for t in range(9):
        assert tab.a_rank(t) == (1 if t % 2 == 0 else 0)
    assert tab.kdims[0] == e
