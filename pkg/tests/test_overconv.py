"""Gauss norms on normal forms and on Witt coordinates."""

from fractions import Fraction as Fr
import random

import pytest
from hypothesis import given, strategies as st

from logdrw import drw
from logdrw import filtration_ss as fs
from logdrw import overconv as oc
from logdrw import witt_poly as wp
from logdrw.overconv import ExtendedValue as EV
from logdrw.weights import LocalModel

EPS = [Fr(1, 2), Fr(1, 3), Fr(2)]
P3 = LocalModel(3, 1, 0)


def test_extended_values():
    assert EV.inf() > EV.of(10**9) > EV.of(-5) > EV.neg_inf()
    assert EV.of(Fr(1, 2)) + 1 == EV.of(Fr(3, 2))
    assert EV.inf() + 3 == EV.inf()
    assert -EV.inf() == EV.neg_inf()
    with pytest.raises(oc.GaussError):
        EV.inf() + EV.neg_inf()
    assert str(EV.inf()) == "+inf" and str(EV.of(Fr(2, 3))) == "2/3"


@pytest.mark.parametrize("eps", EPS)
def test_pseudovaluation_examples(eps):
    assert oc.pseudoval({(1,): 1}, eps, 3) == -eps
    assert oc.pseudoval({(0,): 1}, eps, 3) == 0
    assert oc.pseudoval({(1,): 1, (2,): 1}, eps, 3) == -2 * eps
    assert oc.pseudoval({}, eps, 3) == EV.inf()


@pytest.mark.parametrize("eps", EPS)
def test_coordinate_norm_examples(eps):
    t = wp.teich(3, 1, 3, 1, (1,))
    v1 = wp.w_verschiebung(wp.constant(3, 1, 2, 1))
    assert oc.gauss_from_coords(t, eps) == -eps
    assert v1.polys() == [{}, {(0,): 1}, {}]
    assert oc.gauss_from_coords(v1, eps) == 1
    s = wp.w_add(t, v1)
    assert oc.gauss_from_coords(s, eps) == -eps
    assert oc.gauss_norm(wp.to_drw(s, P3), eps) == -eps


@pytest.mark.parametrize("eps", EPS)
@pytest.mark.parametrize("shift,exp", [(0, 1), (1, 2), (2, 5), (1, 0)])
def test_norm_of_shifted_teichmuller(eps, shift, exp):
    x = drw.teich_monomial(P3, 4 - shift, 2, (exp,))
    for _ in range(shift):
        x = drw.verschiebung(x)
    assert oc.gauss_norm(x, eps) == shift - eps * Fr(exp, 3**shift)


def test_zero_and_bad_epsilon():
    assert oc.gauss_norm(drw.zero(P3, 2), Fr(1, 2)) == EV.inf()
    with pytest.raises(oc.GaussError):
        oc.gauss_norm(drw.one(P3, 2), 0)


def test_poles_carry_no_weight():
    model = LocalModel(2, 2, 1)
    x = drw.multiply(drw.dlog_x(model, 1, 2), drw.teich_monomial(model, 2, 1, (0, 3)))
    assert oc.gauss_norm(x, Fr(1, 2)) == Fr(-3, 2)


def test_witness_and_gr_characterization():
    model = LocalModel(2, 2, 1)
    x = drw.random_element(model, 2, random.Random(4), degree=1)
    assert oc.is_overconvergent_sample(x, Fr(1, 2), oc.gauss_norm(x, Fr(1, 2)))
    one_pole = drw.multiply(drw.dlog_x(model, 1, 2), drw.teich_monomial(model, 2, 1, (0, 1)))
    assert oc.overconv_gr_characterization(one_pole, 1)
    assert not oc.overconv_gr_characterization(one_pole + drw.one(model, 2), 1)


def _random_witt(rng, p, n, N):
    polys = [{tuple(rng.randint(0, 4) for _ in range(n)): rng.randrange(1, p)
              for _ in range(rng.randint(0, 2))} for _ in range(N)]
    return wp.WittVectorPoly.from_polys(p, n, polys)


@given(st.integers(0, 2**31))
def test_norm_identity_from_coordinates(seed):
    rng = random.Random(seed)
    p, n, N = rng.choice([2, 3]), rng.randint(1, 2), rng.randint(1, 4)
    a = _random_witt(rng, p, n, N)
    x = wp.to_drw(a, LocalModel(p, n, 0))
    for eps in EPS:
        assert oc.gauss_norm(x, eps) == oc.gauss_from_coords(a, eps)


@pytest.mark.parametrize("model", [LocalModel(2, 2, 1, 1, 0), LocalModel(3, 2, 2, 0, 2)],
                         ids=lambda m: m.describe())
def test_subadditive_and_d_witness(model, rng):
    for _ in range(150):
        x = drw.random_element(model, 3, rng)
        y = drw.random_element(model, 3, rng)
        for eps in EPS:
            gx, gy = oc.gauss_norm(x, eps), oc.gauss_norm(y, eps)
            assert oc.gauss_norm(x + y, eps) >= min(gx, gy)
            assert oc.gauss_norm(drw.differential(x), eps) >= gx


def test_product_bound_holds_on_functions(rng):
    for model in (LocalModel(2, 2, 0), LocalModel(3, 1, 0), LocalModel(2, 2, 1, 0, 0)):
        for _ in range(150):
            x = drw.random_element(model, 3, rng, degree=0)
            y = drw.random_element(model, 3, rng, degree=0)
            for eps in EPS:
                lhs = oc.gauss_norm(drw.multiply(x, y), eps)
                assert lhs >= oc.gauss_norm(x, eps) + oc.gauss_norm(y, eps)


def test_product_bound_fails_on_forms():
    # dV[T] * V[T^2] = V(F dV[T] * [T^2]) = V([T^2] d[T]) = 3 d[T]
    eps = Fr(1, 2)
    x = drw.differential(drw.verschiebung(drw.teich_monomial(P3, 2, 1, (1,))))
    y = drw.verschiebung(drw.teich_monomial(P3, 2, 1, (2,)))
    prod = drw.multiply(x, y)
    assert prod == drw.differential(drw.teich_monomial(P3, 3, 1, (1,))).scale(3)
    assert oc.gauss_norm(x, eps) == Fr(5, 6)
    assert oc.gauss_norm(y, eps) == Fr(2, 3)
    assert oc.gauss_norm(prod, eps) == Fr(1, 2)
    assert not oc.is_overconvergent_sample(prod, eps, Fr(5, 6) + Fr(2, 3))


def test_residue_preserves_norms(rng):
    model = fs.check_model(LocalModel(3, 3, 3, 0, 3))
    for _ in range(200):
        j = rng.randint(1, 3)
        x = fs.project_gr(drw.random_element(model, 2, rng, max_terms=4), j)
        if not x:
            continue
        for eps in EPS:
            family = fs.residue(x, j)
            assert min(oc.gauss_norm(f, eps) for f in family.values()) == oc.gauss_norm(x, eps)
