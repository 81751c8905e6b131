"""The lifted log de Rham complex over Z/p^m and its comparison map."""

from fractions import Fraction as Fr
import random

import pytest

from conftest import AXIOM_MODELS
from logdrw import drw, lift_dr
from logdrw.homology import homology
from logdrw.lift_dr import LiftForm
from logdrw.weights import POLE, LocalModel, Partition, WeightError

LOG = LocalModel(3, 2, 1, 1, 0)


def test_differential_on_generators():
    t1 = LiftForm.t(LOG, 2, 1)
    assert lift_dr.d_lift(t1) == t1 * LiftForm.dlog_t(LOG, 2, 1)
    t2 = LiftForm.t(LOG, 2, 2)
    assert lift_dr.d_lift(t2) == LiftForm.dt(LOG, 2, 2)
    assert not lift_dr.d_lift(LiftForm.dlog_t(LOG, 2, 1))
    assert not lift_dr.d_lift(LiftForm.dlog_c(LOG, 2, 1))
    dl = LiftForm.dlog_t(LOG, 2, 1)
    assert not dl * dl


def test_leibniz_and_square_zero(rng):
    for model in AXIOM_MODELS:
        for _ in range(100):
            x = lift_dr.random_lift_form(model, 2, rng)
            y = lift_dr.random_lift_form(model, 2, rng)
            assert not lift_dr.d_lift(lift_dr.d_lift(x))
            for deg in x.degree_set():
                xh = LiftForm(model, 2, {k: c for k, c in x.terms.items() if len(k[1]) == deg})
                lhs = lift_dr.d_lift(xh * y)
                rhs = lift_dr.d_lift(xh) * y + (xh * lift_dr.d_lift(y)).scale((-1) ** deg)
                assert lhs == rhs


def test_p_basic_unit():
    k = (Fr(0), Fr(0))
    assert lift_dr.make_p_basic(k, Partition((), ((),)), (), 2, LOG) == LiftForm.one(LOG, 2)


@pytest.mark.parametrize("p", [2, 3])
def test_p_basic_divided_differential(p):
    model = LocalModel(p, 1, 0)
    got = lift_dr.make_p_basic((Fr(p),), Partition((), ((), (1,))), (), 3, model)
    want = LiftForm.monomial(model, 3, 1, (p - 1,), ()) * LiftForm.dt(model, 3, 1)
    assert got == want


def test_p_basic_rejects_fractional_weight():
    with pytest.raises(WeightError):
        lift_dr.make_p_basic((Fr(1, 3), Fr(0)), Partition((), ((1,),)), (), 2, LOG)


@pytest.mark.parametrize("model", AXIOM_MODELS, ids=lambda m: m.describe())
def test_p_basic_elements_are_a_basis(model):
    m = 2
    for kappa in [(Fr(0),) * model.n, (Fr(1),) + (Fr(0),) * (model.n - 1),
                  (Fr(0),) * (model.n - 1) + (Fr(model.p),)]:
        for key in drw.basis_keys(model, kappa, m + 10):
            form = lift_dr.make_p_basic(key[0], key[1], key[2], m, model)
            assert lift_dr.pbasic_coords(form) == {key: 1}


def test_compare_examples():
    assert lift_dr.compare(LiftForm.dlog_t(LOG, 2, 1)) == drw.dlog_x(LOG, 1, 2)
    assert lift_dr.compare(LiftForm.one(LOG, 2)) == drw.one(LOG, 2)


@pytest.mark.parametrize("model", AXIOM_MODELS, ids=lambda m: m.describe())
def test_compare_agrees_with_chart_map(model):
    rng = random.Random(11)
    for _ in range(125):
        m = rng.randint(1, 3)
        phi = lift_dr.random_lift_form(model, m, rng)
        assert lift_dr.compare(phi) == lift_dr.compare_generic(phi)


@pytest.mark.parametrize("model", AXIOM_MODELS, ids=lambda m: m.describe())
def test_compare_is_a_chain_map(model):
    rng = random.Random(12)
    for _ in range(60):
        phi = lift_dr.random_lift_form(model, 2, rng)
        assert lift_dr.compare(lift_dr.d_lift(phi)) == drw.differential(lift_dr.compare(phi))


def test_weight_zero_piece_has_zero_differential():
    c = lift_dr.weight_subcomplex_lift(LOG, 2, (0, 0))
    assert all(not any(any(r) for r in mat) for mat in c.maps.values())
    # exterior algebra on dlog T1, dlog c1
    assert [c.rank(d) for d in c.degrees()] == [1, 2, 1]


def test_weight_one_on_a_plain_variable():
    model = LocalModel(3, 1, 0)
    c = lift_dr.weight_subcomplex_lift(model, 2, (1,))
    assert c.maps == {0: [[1]]}
    assert homology(c).is_zero()


@pytest.mark.parametrize("p", [2, 3])
def test_weight_p_on_a_plain_variable(p):
    model = LocalModel(p, 1, 0)
    c = lift_dr.weight_subcomplex_lift(model, 2, (p,))
    assert c.maps == {0: [[p]]}
    h = homology(c)
    assert h.divisors == {0: [1], 1: [1]}
