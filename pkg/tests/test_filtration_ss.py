"""Weight filtration, residues and the Steenbrink double complex."""

from fractions import Fraction as Fr
import random

import pytest

from logdrw import drw
from logdrw import filtration_ss as fs
from logdrw.homology import homology, weight_subcomplex
from logdrw.suites import weight_grid
from logdrw.weights import LocalModel

D2 = fs.check_model(LocalModel(2, 2, 2, 0, 2))
D3 = fs.check_model(LocalModel(2, 3, 3, 0, 3))
D2P3 = fs.check_model(LocalModel(3, 2, 2, 0, 2))


def test_check_model_scope():
    for bad in (LocalModel(2, 2, 1, 0, 0), LocalModel(2, 3, 3, 0, 2), LocalModel(2, 2, 2, 1, 2)):
        with pytest.raises(fs.SteenbrinkError):
            fs.check_model(bad)
    assert D2.base == "log-point"


def test_levels():
    form = drw.teich_monomial(D3, 2, 1, (0, 0, 1))
    two = drw.multiply(drw.multiply(drw.dlog_x(D3, 1, 2), drw.dlog_x(D3, 2, 2)), form)
    assert fs.element_level(two) == 2
    assert fs.element_level(form) == 0
    assert fs.element_level(drw.zero(D3, 2)) == -1


def test_filtration_exhausts_and_starts_at_zero(rng):
    for _ in range(50):
        x = drw.random_element(D3, 2, rng)
        assert fs.project_p(x, D3.d) == x
        assert fs.project_p(x, -1).is_zero()
        assert sum((fs.project_gr(x, j) for j in range(D3.d + 1)), drw.zero(D3, 2)) == x


def test_filtration_is_multiplicative_and_stable_under_d(rng):
    for _ in range(300):
        x = drw.random_element(D3, 2, rng)
        y = drw.random_element(D3, 2, rng)
        xy = drw.multiply(x, y)
        assert fs.element_level(xy) <= fs.element_level(x) + fs.element_level(y)
        assert fs.element_level(drw.differential(x)) <= fs.element_level(x)


def test_residue_example():
    x = drw.multiply(drw.dlog_x(D2, 1, 2), drw.teich_monomial(D2, 2, 1, (0, 1)))
    res = fs.residue(x, 1)
    st = fs.stratum(D2, (1,))
    assert list(res) == [(1,)]
    assert res[(1,)] == drw.teich_monomial(st.model, 2, 1, (1,))


def test_residue_inverts_wedge(rng):
    count = 0
    for j in (1, 2, 3):
        for st in fs.strata(D3, j):
            for _ in range(100):
                m = rng.randint(1, 2)
                form = drw.random_element(st.model, m, rng)
                if not form:
                    continue
                x = fs.wedge_from_stratum(st, form)
                assert fs.element_level(x) == j
                assert fs.residue(x, j) == {st.J: form}
                count += 1
    assert count >= 500


def test_rho_signs_by_hand():
    m = 1
    ones = {J: drw.one(fs.stratum(D3, J).model, m) for J in [(1,), (2,)]}
    out = fs.rho(ones, D3, 1, m)
    one = lambda J: drw.one(fs.stratum(D3, J).model, m)  # noqa: E731
    assert (1, 2) not in out
    assert out[(1, 3)] == -one((1, 3))
    assert out[(2, 3)] == -one((2, 3))


def test_rho_kills_forms_vanishing_on_deeper_strata():
    st = fs.stratum(D3, (1,))
    form = drw.teich_monomial(st.model, 2, 1, (1, 1))
    assert fs.rho({(1,): form}, D3, 1, 2) == {}


def test_gysin_vanishes_per_weight(rng):
    for j in (1, 2):
        for _ in range(40):
            forms = {st.J: drw.random_element(st.model, 2, rng) for st in fs.strata(D3, j + 1)}
            assert fs.gysin(forms, D3, j + 1, 2) == {}


@pytest.mark.parametrize("model", [D2, D2P3], ids=lambda m: m.describe())
def test_filtration_definitions_agree(model):
    for kappa in weight_grid(model, 2, 2, 1):
        for deg in range(model.n + 1):
            for j in range(model.d + 1):
                cmp = fs.filtration_comparison(model, 2, kappa, j, deg)
                assert cmp["equal"], (kappa, deg, j, cmp)


def test_gys1_fails_if_rho_sign_flipped(monkeypatch):
    # p = 3 so that a sign flip is visible
    model = fs.check_model(LocalModel(3, 3, 3, 0, 3))
    kappa = (Fr(0), Fr(0), Fr(1))
    assert all(fs.gys1_holds(model, 1, kappa, j, deg) for j in range(3) for deg in range(4))
    orig = fs.rho
    monkeypatch.setattr(fs, "rho", lambda *a: {J: -f for J, f in orig(*a).items()})
    assert not all(fs.gys1_holds(model, 1, kappa, j, deg) for j in range(3) for deg in range(4))


@pytest.mark.parametrize("model,m", [(D2, 2), (D3, 1)], ids=["d2", "d3"])
def test_double_complex_structure(model, m):
    for kappa in weight_grid(model, m, 2, 1):
        assert fs.anticommutes(model, m, kappa)
        for i in range(model.n + 1):
            assert homology(fs.resolution_row(model, m, kappa, i)).is_zero()
        assert homology(fs.augmentation_cone(model, m, kappa)).is_zero()
        tot = homology(fs.total_complex(model, m, kappa)).divisors
        rel = homology(weight_subcomplex(model, m, kappa, "relative")).divisors
        assert {h: v for h, v in tot.items() if v} == {h: v for h, v in rel.items() if v}


@pytest.mark.parametrize("model,m", [(D2, 2), (D3, 1)], ids=["d2", "d3"])
def test_residues_and_d1(model, m):
    for kappa in weight_grid(model, m, 2, 1):
        for k in range(-model.d, model.d + 1):
            assert fs.residue_matrix_is_signed_permutation(model, m, kappa, k)
            assert fs.residue_commutes_with_differential(model, m, kappa, k)
            assert fs.d1_identification_holds(model, m, kappa, k)


def test_e1_weight_zero_counts_components():
    page = fs.e1_page(D2, 1, [(0, 0)])
    assert page.d1_squares_zero
    # independent count: H^0 of each component line at weight zero
    expected = []
    for st in fs.strata(D2, 1):
        expected += homology(weight_subcomplex(st.model, 1, (0,) * st.model.n)).divisors.get(0, [])
    assert page.entries[(0, 0)] == sorted(expected) == [1, 1]


def test_e1_squares_zero_on_grid():
    page = fs.e1_page(D2P3, 2, weight_grid(D2P3, 2, 3, 1))
    assert page.d1_squares_zero and page.entries


@pytest.mark.parametrize("model,m", [(D2, 1), (D2, 2), (D2P3, 2)], ids=["p2m1", "p2m2", "p3m2"])
def test_frobenius_diagrams(model, m):
    for kappa in weight_grid(model, m, 2, 1):
        assert fs.frobenius_diagrams(model, m, kappa) == {
            "factoring": True, "row0": True, "theta": True, "gr": True}


def test_frobenius_diagram_detects_wrong_row0(monkeypatch):
    # identity instead of [T] -> [T^p]
    monkeypatch.setattr(fs, "witt_frobenius", lambda s: s)
    kappa = (Fr(1), Fr(0))
    assert not fs.frobenius_diagrams(D2, 2, kappa)["row0"]
