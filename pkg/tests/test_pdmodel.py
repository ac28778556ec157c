import pytest
from fractions import Fraction
from hypothesis import given, strategies as st

from tcss.errors import NotDivisible, PrecisionTooLow, WcapTooSmall
from tcss.localfield import simple_field
from tcss.pdmodel import (
    INF,
    PDContext,
    make_context,
    pd_delta,
    pd_div_p,
    pd_div_s,
    pd_f_seq,
    pd_frobenius,
    pd_mul,
    pd_pow,
    pd_refined_val,
    verify_section3,
)


def _random_element(ctx, data, weight):
    x = ctx.zero()
    for a in range(ctx.e):
        for i in range(weight + 1):
            for j in range(weight + 1 - i):
                c = [data.draw(st.integers(0, ctx.P - 1)) for _ in range(ctx.f)]
                x = x + ctx.monomial(a, i, j, c)
    return x


def test_context_errors():
    F = simple_field(3)
    with pytest.raises(PrecisionTooLow):
        PDContext(F, 4, 1)
    with pytest.raises(WcapTooSmall):
        PDContext(F, 0, 4)


def test_divided_power_products():
    ctx = make_context(simple_field(3, 2), 1)
    assert pd_mul(ctx.gamma_s(1), ctx.gamma_s(1)).equals(ctx.gamma_s(2).scale(2))
    assert pd_mul(ctx.gamma_s(2), ctx.gamma_s(1)).equals(ctx.gamma_s(3).scale(3))
    assert pd_mul(ctx.gamma_E(2), ctx.gamma_E(3)).equals(ctx.gamma_E(5).scale(10))


def test_z0_squared_reduces_through_E():
    ctx = make_context(simple_field(3, 2), 1)  # E = z^2 + 3
    z0 = ctx.z0()
    assert pd_mul(z0, z0).equals(ctx.gamma_E(1) - ctx.scalar(3))


def test_z0_for_unramified_field():
    ctx = make_context(simple_field(3), 1)  # E = z + 3
    assert ctx.z0().equals(ctx.gamma_E(1) - ctx.scalar(3))


def test_frobenius_of_s_at_two():
    # phi(s) = z_0^2 - (z_0 - s)^2 = 2 z_0 s - 2 gamma_2(s)
    ctx = make_context(simple_field(2, 2), 1)
    s, z0 = ctx.s(), ctx.z0()
    assert pd_frobenius(s).equals(pd_mul(z0, s).scale(2) - ctx.gamma_s(2).scale(2))


def test_delta_of_z0_vanishes():
    for F in (simple_field(3, 2), simple_field(2, 3, mid=[[2], [0]]), simple_field(5)):
        ctx = make_context(F, 1)
        assert pd_delta(ctx.z0()).is_zero()


def test_div_p_and_div_s():
    ctx = make_context(simple_field(3, 2), 1)
    x = ctx.gamma_s(2).scale(3)
    assert pd_div_p(x).equals(ctx.gamma_s(2))
    with pytest.raises(NotDivisible):
        pd_div_p(ctx.s())
    y = pd_mul(ctx.z0(), ctx.s())
    assert pd_div_s(y).equals(ctx.z0())


def test_refined_valuation():
    ctx = make_context(simple_field(3, 2), 1)
    assert pd_refined_val(ctx.zero()) == INF
    assert pd_refined_val(ctx.z0()) == Fraction(1, 2)
    assert pd_refined_val(ctx.gamma_s(3).scale(3), mod_p=True) == INF


@pytest.mark.parametrize("p,e", [(3, 2), (2, 2), (2, 1), (5, 1)])
@given(data=st.data())
def test_frobenius_is_ring_hom_and_delta_product_rule(p, e, data):
    F = simple_field(p, e)
    ctx = make_context(F, 1)
    w = max(ctx.Wcap // p - 1, 0)
    x = _random_element(ctx, data, w)
    y = _random_element(ctx, data, w)
    assert pd_frobenius(pd_mul(x, y)).equals(pd_mul(pd_frobenius(x), pd_frobenius(y)))
    assert pd_frobenius(x + y).equals(pd_frobenius(x) + pd_frobenius(y))
    # delta(xy) = x^p delta(y) + y^p delta(x) + p delta(x) delta(y)
    dx, dy = pd_delta(x), pd_delta(y)
    lhs = pd_delta(pd_mul(x, y))
    rhs = (pd_mul(pd_pow(x, p), dy) + pd_mul(pd_pow(y, p), dx) + pd_mul(dx, dy).scale(p))
    assert lhs.equals(rhs.with_prec(lhs.prec))


def test_f_sequence_shape():
    F = simple_field(3, 2)
    seq = pd_f_seq(F, 1)
    assert len(seq.f) == 2
    assert pd_refined_val(seq.f[0]) == 1
    assert pd_refined_val(seq.f[1]) == 3


@pytest.mark.parametrize("p,e,kmax", [(3, 2, 2), (5, 2, 1), (2, 5, 2)])
def test_verify_section3_passes(p, e, kmax):
    rep = verify_section3(simple_field(p, e), kmax)
    assert rep.passed, [c for c in rep.checks if not c.passed]
    js = rep.to_json()
    assert js["pass"] and js["kmax"] == kmax


def test_sign_audit_detects_opposite_signs():
    rep = verify_section3(simple_field(3, 2), 1)
    informative = [c for c in rep.sign_audit if c.name in ("xi0", "h-leading")]
    assert len(informative) == 2 and not any(c.passed for c in informative)
    # the frobenius-f0 comparison is vacuous mod p, so it cannot distinguish signs
    assert all(c.passed for c in rep.sign_audit if c.name == "frobenius-f0")


def test_not_applicable_entries():
    rep = verify_section3(simple_field(3), 1)
    assert rep.passed
    assert any(s.startswith("h-leading") for s in rep.skipped)
    assert any(s.startswith("frobenius-iterate-odd") for s in rep.skipped)
    rep = verify_section3(simple_field(2, 5), 1)
    labels = {c.name for c in rep.checks}
    assert "frobenius-iterate-even" in labels and "h-leading" in labels
