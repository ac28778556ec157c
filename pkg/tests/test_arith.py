import itertools

import pytest
from hypothesis import given, strategies as st

from tcss.arith import (
    fq_frobenius,
    fq_norm,
    h90_solve,
    hensel_frobenius_root,
    is_irreducible,
    is_prime,
    make_field,
    make_witt,
    p_power_over_factorial,
    vp,
    witt_frobenius,
)
from tcss.errors import NonPrime, ReducibleModulus, ZeroCoefficient

SMALL_FIELDS = [(p, f) for p in (2, 3, 5, 7) for f in (1, 2, 3, 4) if p ** f <= 81]


def _roots(m, p):
    return [a for a in range(p) if sum(c * a ** i for i, c in enumerate(m)) % p == 0]


def test_is_prime_against_trial_division():
    for n in range(200):
        assert is_prime(n) == (n > 1 and all(n % d for d in range(2, n)))


def test_vp():
    assert vp(48, 2) == 4
    assert vp(7, 3) == 0
    with pytest.raises(ValueError):
        vp(0, 3)


def test_irreducibility_matches_root_test_in_degree_two_and_three():
    for p in (2, 3, 5):
        for f in (2, 3):
            for low in itertools.product(range(p), repeat=f):
                m = list(low) + [1]
                assert is_irreducible(m, p) == (not _roots(m, p))


def test_make_field_defaults():
    assert make_field(2, 1).modulus == (0, 1)
    assert make_field(3, 2).modulus == (1, 0, 1)
    assert make_field(3, 2, [1, 0, 1]).modulus == (1, 0, 1)


def test_make_field_errors():
    with pytest.raises(NonPrime):
        make_field(4, 1)
    with pytest.raises(ReducibleModulus):
        make_field(3, 2, [2, 0, 1])  # x^2 - 1
    with pytest.raises(ReducibleModulus):
        make_field(3, 2, [1, 1])


@pytest.mark.parametrize("p,f", SMALL_FIELDS)
def test_field_axioms_exhaustive(p, f):
    k = make_field(p, f)
    els = list(k.elements())
    assert len(els) == p ** f
    for a in els:
        if a:
            assert a * a.inverse() == k.one()
        assert a + (-a) == k.zero()
    # multiplicative group is cyclic of order q - 1: some element has full order
    q = p ** f
    assert any(all(a ** ((q - 1) // r) != k.one() for r in range(2, q) if (q - 1) % r == 0 and is_prime(r))
               for a in els if a)


@pytest.mark.parametrize("p,f", SMALL_FIELDS)
def test_frobenius_and_norm_exhaustive(p, f):
    k = make_field(p, f)
    for a in k.elements():
        b = a
        for _ in range(f):
            b = fq_frobenius(k, b)
        assert b == a
        n = fq_norm(k, a)
        assert not any(n.c[1:])
        # norm is the product of the Galois conjugates, equal to a^((q-1)/(p-1))
        assert n == a ** ((p ** f - 1) // (p - 1))


def test_frobenius_and_norm_examples():
    k = make_field(3, 2, [1, 0, 1])
    x = k.gen()
    assert fq_frobenius(k, x) == -x
    assert fq_norm(k, x) == k.one()
    assert fq_norm(k, k.zero()) == k.zero()
    F5 = make_field(5, 1)
    assert fq_frobenius(F5, F5.from_int(3)) == F5.from_int(3)


@pytest.mark.parametrize("p,f", SMALL_FIELDS)
def test_h90_law_exhaustive(p, f):
    """b*phi - id is bijective iff N(b) != 1; otherwise kernel and cokernel are F_p."""
    k = make_field(p, f)
    zero = k.zero()
    for b in k.elements():
        if not b:
            continue
        res = h90_solve(k, b, zero)
        # brute-force kernel on all elements
        kernel = [x for x in k.elements() if b * fq_frobenius(k, x) - x == zero]
        assert len(kernel) == p ** res.kernel_dim
        if fq_norm(k, b) != k.one():
            assert res.unique and res.kernel_dim == 0 and res.coker_dim == 0
        else:
            assert res.kernel_dim == 1 and res.coker_dim == 1
        image = {b * fq_frobenius(k, x) - x for x in k.elements()}
        assert len(image) == p ** (f - res.coker_dim)


def test_h90_examples():
    F2 = make_field(2, 1)
    r = h90_solve(F2, F2.one(), F2.one())
    assert not r.solvable and r.kernel_dim == 1
    k = make_field(3, 2)
    r = h90_solve(k, k.one(), k.zero())
    assert r.kernel_dim == 1 and all(not any(v.c[1:]) for v in r.kernel)
    with pytest.raises(ZeroCoefficient):
        h90_solve(k, k.zero(), k.one())


@given(st.sampled_from([(3, 2), (2, 3), (5, 2)]), st.data())
def test_h90_solution_solves(pf, data):
    p, f = pf
    k = make_field(p, f)
    b = k.from_index(data.draw(st.integers(1, p ** f - 1)))
    c = k.from_index(data.draw(st.integers(0, p ** f - 1)))
    r = h90_solve(k, b, c)
    if r.solvable:
        assert b * fq_frobenius(k, r.solution) - r.solution == c


def test_hensel_root():
    k = make_field(3, 2, [1, 0, 1])
    W = make_witt(k, 2)
    r = W.frobenius_root
    # r is a root of x^2 + 1 over Z/9 and reduces to x^3 = -x mod 3
    assert W.t_add(W.t_mul(r, r), W.t_one) == W.t_zero
    assert tuple(x % 3 for x in r) == (0, 2)
    assert hensel_frobenius_root(make_field(5, 1), 3) == (0,)


@pytest.mark.parametrize("p,f,N", [(2, 2, 5), (3, 2, 4), (2, 3, 3), (5, 2, 3)])
def test_witt_frobenius_lifts_frobenius(p, f, N):
    k = make_field(p, f)
    W = make_witt(k, N)
    for b in k.basis():
        a = W.elem(list(b.c))
        assert witt_frobenius(W, a).reduce() == fq_frobenius(k, b)
    # phi is a ring endomorphism of order f
    for c in itertools.islice(itertools.product(range(p ** N), repeat=f), 0, 400, 7):
        a = W.elem(list(c))
        x = a
        for _ in range(f):
            x = witt_frobenius(W, x)
        assert x.c == a.c


def test_witt_frobenius_fixes_prime_ring():
    W = make_witt(make_field(3, 1), 4)
    for n in range(81):
        assert witt_frobenius(W, W.from_int(n)).c == W.from_int(n).c


@given(st.integers(0, 3 ** 4 - 1), st.integers(0, 3 ** 4 - 1), st.integers(0, 80), st.integers(0, 80))
def test_witt_ring_ops(a0, a1, b0, b1):
    W = make_witt(make_field(3, 2), 4)
    a, b = W.elem([a0, a1]), W.elem([b0, b1])
    assert (a * b).c == (b * a).c
    assert ((a + b) * a).c == (a * a + b * a).c
    assert witt_frobenius(W, a * b).c == (witt_frobenius(W, a) * witt_frobenius(W, b)).c
    if a.is_unit():
        assert (a * a.inverse()).c == W.from_int(1).c


def test_p_power_over_factorial():
    from fractions import Fraction
    from math import factorial

    for p in (2, 3, 5):
        for i in range(1, 30):
            v, u = p_power_over_factorial(i, p)
            assert Fraction(p ** i, factorial(i)) == Fraction(p ** v, u)
            assert u % p and v >= 0
