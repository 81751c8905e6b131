"""Witt vectors over F_p[T] through universal polynomials."""

import random

import pytest
from hypothesis import given, strategies as st

from logdrw import witt_poly as wp
from logdrw.witt_scalar import StructureError


def _var(i, nv):
    return wp.p_var(i, nv)


@pytest.mark.parametrize("p,N", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)])
def test_universal_polynomials_satisfy_ghost_identities(p, N):
    u = wp.build_universal(N, p)
    nv = 2 * N
    xs = [_var(i, nv) for i in range(N)]
    ys = [_var(N + i, nv) for i in range(N)]
    for i in range(N):
        gx, gy = wp.ghost_poly(xs, i, p, nv), wp.ghost_poly(ys, i, p, nv)
        assert wp.ghost_poly(list(u.sums), i, p, nv) == wp.p_add(gx, gy)
        assert wp.ghost_poly(list(u.products), i, p, nv) == wp.p_mul(gx, gy)


def test_first_universal_polynomials():
    u = wp.build_universal(1, 3)
    assert u.sums[0] == {(1, 0): 1, (0, 1): 1}
    assert u.products[0] == {(1, 1): 1}


def test_second_sum_polynomial_p2():
    # X0, X1, Y0, Y1
    s1 = wp.build_universal(2, 2).sums[1]
    assert s1 == {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1, (1, 0, 1, 0): -1}


@pytest.mark.parametrize("p", [2, 3, 5])
def test_second_product_polynomial(p):
    m1 = wp.build_universal(2, p).products[1]
    assert m1 == {(p, 0, 0, 1): 1, (0, 1, p, 0): 1, (0, 1, 0, 1): p}


def test_teichmuller_product():
    a = wp.teich(3, 2, 3, 1, (1, 0))
    b = wp.teich(3, 2, 3, 1, (0, 1))
    assert wp.w_mul(a, b) == wp.teich(3, 2, 3, 1, (1, 1))


def test_add_zero_and_doubling_in_char_two():
    a = wp.teich(2, 1, 2, 1, (1,))
    assert wp.w_add(a, wp.zero(2, 1, 2)) == a
    assert wp.w_add(a, a).polys() == [{}, {(2,): 1}]


def test_frobenius_and_verschiebung():
    t = wp.teich(3, 1, 3, 1, (1,))
    assert wp.w_frobenius(t) == wp.teich(3, 1, 2, 1, (3,))
    assert wp.w_verschiebung(wp.zero(3, 1, 2)).is_zero()
    a = wp.w_add(t, wp.w_verschiebung(wp.teich(3, 1, 2, 2, (2,))))
    fv = wp.w_frobenius(wp.w_verschiebung(a))
    assert fv == wp.w_mul(wp.constant(3, 1, 3, 3), a)
    with pytest.raises(StructureError):
        wp.w_frobenius(wp.teich(3, 1, 1, 1, (1,)))


def test_negation_and_shape_checks():
    a = wp.teich(2, 1, 3, 1, (2,))
    assert wp.w_add(a, wp.w_neg(a)).is_zero()
    with pytest.raises(StructureError):
        wp.w_add(a, wp.teich(2, 1, 2, 1, (2,)))


def test_expansion_examples():
    assert wp.coords_to_expansion(wp.teich(2, 1, 2, 1, (1,))) == [((1,), 0, 1)]
    vt = wp.w_verschiebung(wp.teich(2, 1, 1, 1, (1,)))
    assert wp.coords_to_expansion(vt) == [((1,), 1, 1)]
    a = wp.WittVectorPoly.from_polys(2, 1, [{(1,): 1}, {(1,): 1}])
    terms = wp.coords_to_expansion(a)
    assert ((1,), 0, 1) in terms
    assert wp.expansion_to_coords(terms, 2, 1, 2) == a


def _random_witt(rng, p, n, N):
    polys = []
    for _ in range(N):
        poly = {}
        for _ in range(rng.randint(0, 2)):
            poly[tuple(rng.randint(0, 3) for _ in range(n))] = rng.randrange(1, p)
        polys.append(poly)
    return wp.WittVectorPoly.from_polys(p, n, polys)


def test_expansion_round_trip_500():
    rng = random.Random(7)
    for _ in range(500):
        p = rng.choice([2, 3])
        n, N = rng.randint(1, 2), rng.randint(1, 3)
        a = _random_witt(rng, p, n, N)
        assert wp.expansion_to_coords(wp.coords_to_expansion(a), p, n, N) == a


@given(st.integers(0, 2**32), st.sampled_from([2, 3]), st.integers(1, 3))
def test_ring_axioms(seed, p, N):
    rng = random.Random(seed)
    a, b, c = (_random_witt(rng, p, 1, N) for _ in range(3))
    assert wp.w_add(a, b) == wp.w_add(b, a)
    assert wp.w_mul(a, b) == wp.w_mul(b, a)
    assert wp.w_mul(a, wp.w_add(b, c)) == wp.w_add(wp.w_mul(a, b), wp.w_mul(a, c))
    assert wp.w_add(wp.w_add(a, b), c) == wp.w_add(a, wp.w_add(b, c))
    assert wp.w_restrict(wp.w_mul(a, b), 1) == wp.w_mul(wp.w_restrict(a, 1), wp.w_restrict(b, 1))


def test_teich_digits_expand_integers():
    for p, length in [(2, 4), (3, 3), (5, 2)]:
        for eta in range(p**length):
            digits = wp._teich_digits(eta, p, length)
            total = sum(p**t * pow(c, p ** (length - 1), p**length) for t, c in enumerate(digits))
            assert total % p**length == eta
