"""W_m(F_p) as Z/p^m: spot values and exhaustive small-level laws."""

import itertools

import pytest
from hypothesis import given, strategies as st

from logdrw.witt_poly import _teich_digits
from logdrw.witt_scalar import (
    INF,
    LevelError,
    StructureError,
    WittScalar,
    frobenius,
    ord_p,
    restrict,
    teichmuller,
    verschiebung,
)


def W(v, m, p):
    return WittScalar(v, m, p)


def test_addition_wraps():
    assert (W(4, 2, 3) + W(5, 2, 3)).value == 0
    assert (W(7, 3, 2) + W(1, 3, 2)).value == 0
    assert W(0, 2, 3) + W(7, 2, 3) == W(7, 2, 3)


def test_multiplication():
    assert (W(3, 2, 3) * W(3, 2, 3)).value == 0
    assert (W(3, 3, 2) * W(5, 3, 2)).value == 7
    assert W(1, 2, 3) * W(5, 2, 3) == W(5, 2, 3)


def _frobenius_by_digits(x, m, p):
    # Teichmueller digits a_i of x; F raises each to the p-th power (the identity
    # on F_p) and the top digit falls off.
    digits = _teich_digits(x, p, m)
    total = 0
    for i, a in enumerate(digits[: m - 1]):
        total += p**i * pow(pow(a, p, p), p ** (m - 2), p ** (m - 1))
    return total % p ** (m - 1)


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("m", [2, 3])
def test_frobenius_matches_digit_oracle(p, m):
    for x in range(p**m):
        assert frobenius(W(x, m, p)).value == _frobenius_by_digits(x, m, p)


def test_frobenius_examples():
    f = frobenius(W(10, 3, 3))
    assert (f.value, f.level) == (1, 2)
    assert frobenius(W(1, 2, 3)).value == 1


def test_verschiebung_examples():
    v = verschiebung(W(2, 1, 3))
    assert (v.value, v.level) == (6, 2)
    assert not verschiebung(W(0, 2, 3))


def test_teichmuller_values():
    assert teichmuller(2, 2, 3).value == 8
    assert teichmuller(0, 3, 3).value == 0
    assert teichmuller(1, 3, 3).value == 1


def test_ord():
    assert ord_p(W(6, 2, 3)) == 1
    assert ord_p(W(0, 2, 3)) == INF
    assert ord_p(W(1, 2, 3)) == 0


def test_level_errors():
    with pytest.raises(LevelError):
        frobenius(W(1, 1, 2))
    with pytest.raises(LevelError):
        restrict(W(1, 1, 2))
    with pytest.raises(LevelError):
        W(0, 0, 2)
    with pytest.raises(StructureError):
        W(1, 2, 3) + W(1, 3, 3)


@pytest.mark.parametrize("p,m", [(p, m) for p in (2, 3) for m in (1, 2, 3)])
def test_ring_axioms_exhaustive(p, m):
    elts = [W(v, m, p) for v in range(p**m)]
    zero, one = W(0, m, p), W(1, m, p)
    for a, b in itertools.product(elts, repeat=2):
        assert a + b == b + a and a * b == b * a
        assert a + zero == a and a * one == a
        assert a + (-a) == zero
    for a, b, c in itertools.product(elts[:8], repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


@pytest.mark.parametrize("p,m", [(p, m) for p in (2, 3) for m in (1, 2, 3)])
def test_fv_is_p(p, m):
    for v in range(p**m):
        a = W(v, m, p)
        assert frobenius(verschiebung(a)) == W(p * v, m, p)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_teichmuller_multiplicative(p):
    for a, b in itertools.product(range(p), repeat=2):
        assert teichmuller(a, 3, p) * teichmuller(b, 3, p) == teichmuller(a * b, 3, p)


@given(st.sampled_from([2, 3, 5]), st.integers(1, 4), st.integers(0, 10**6), st.integers(0, 10**6))
def test_ord_additive_below_level(p, m, x, y):
    a, b = W(x, m, p), W(y, m, p)
    s = ord_p(a) + ord_p(b)
    if s < m:
        assert ord_p(a * b) == s
