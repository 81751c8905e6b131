"""Verification suites shared by the command line driver and the test suite.

Each suite returns a list of :class:`CheckResult`; a failing check keeps the
serialized inputs that broke it so a report is enough to reproduce the case.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional

from . import drw, lift_dr
from . import filtration_ss as fs
from . import overconv as oc
from . import witt_poly as wp
from .drw import DrwElement
from .homology import homology, mv_sequence, submodule_log_size, theta_sequence, weight_subcomplex
from .weights import LocalModel, covers_relation, enumerate_kappas, is_integral, u_of
from .witt_scalar import LevelError

MAX_FAILURES = 5


@dataclass
class CheckResult:
    name: str
    count: int = 0
    failures: List[dict] = field(default_factory=list)
    failed: int = 0

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def record(self, ok: bool, **inputs) -> None:
        self.count += 1
        if not ok:
            self.failed += 1
            if len(self.failures) < MAX_FAILURES:
                self.failures.append({k: _text(v) for k, v in inputs.items()})

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "details": {"count": self.count, "failed": self.failed, "failures": self.failures},
        }


def _text(v) -> str:
    from .cli import serialize

    if isinstance(v, DrwElement):
        return serialize(v)
    if isinstance(v, tuple):
        return "(" + ", ".join(_text(x) for x in v) + ")"
    return str(v)


def weight_grid(model: LocalModel, m: int, max_num: int, max_den: int) -> List[tuple]:
    """Pole-free weights on the grid that survive at level m."""
    return [k for k in enumerate_kappas(model, max_num, max_den)
            if not covers_relation(model, k) and u_of(k, model.p) < m]


def _homogeneous(model: LocalModel, m: int, rng: random.Random) -> DrwElement:
    deg = rng.randint(0, model.n + model.f)
    for _ in range(20):
        try:
            return drw.random_element(model, m, rng, degree=deg)
        except drw.DrwError:
            deg = rng.randint(0, deg)
    return drw.random_element(model, m, rng, degree=0)


def _random_teich(model: LocalModel, m: int, rng: random.Random) -> tuple:
    a = rng.randrange(1, model.p)
    exps = [rng.randint(0, 3) for _ in range(model.n)]
    return a, exps


# --- algebra identities ---------------------------------------------------------------------


def identities(model: LocalModel, m: int, trials: int, rng: random.Random) -> List[CheckResult]:
    p = model.p
    names = ["d^2=0", "Leibniz", "graded-commutativity", "FV=p", "FdV=d",
             "V(x.Fy)=Vx.y", "Fd[x]=[x^(p-1)]d[x]", "restrict-compatibility"]
    res = {n: CheckResult(n) for n in names}
    for _ in range(trials):
        x = _homogeneous(model, m, rng)
        y = _homogeneous(model, m, rng)
        dx = drw.differential(x)
        res["d^2=0"].record(drw.differential(dx).is_zero(), x=x)
        sign = (-1) ** x.degree()
        lhs = drw.differential(drw.multiply(x, y))
        rhs = drw.multiply(dx, y) + drw.multiply(x, drw.differential(y)).scale(sign)
        res["Leibniz"].record(lhs == rhs, x=x, y=y)
        gc = drw.multiply(y, x).scale((-1) ** (x.degree() * y.degree()))
        res["graded-commutativity"].record(drw.multiply(x, y) == gc, x=x, y=y)
        res["FV=p"].record(drw.frobenius(drw.verschiebung(x)) == x.scale(p), x=x)
        res["FdV=d"].record(drw.frobenius(drw.differential(drw.verschiebung(x))) == dx, x=x)
        y_up = _homogeneous(model, m + 1, rng)
        lhs = drw.verschiebung(drw.multiply(x, drw.frobenius(y_up)))
        rhs = drw.multiply(drw.verschiebung(x), y_up)
        res["V(x.Fy)=Vx.y"].record(lhs == rhs, x=x, y=y_up)
        a, exps = _random_teich(model, m, rng)
        t = drw.teich_monomial(model, m + 1, a, exps)
        lhs = drw.frobenius(drw.differential(t))
        tp = drw.teich_monomial(model, m, pow(a, p - 1, p), [e * (p - 1) for e in exps])
        rhs = drw.multiply(tp, drw.differential(drw.teich_monomial(model, m, a, exps)))
        res["Fd[x]=[x^(p-1)]d[x]"].record(lhs == rhs, a=a, exps=tuple(exps))
        if m >= 2:
            ok = drw.restrict(dx) == drw.differential(drw.restrict(x))
            ok = ok and drw.restrict(drw.frobenius(y_up)) == drw.frobenius(drw.restrict(y_up))
            ok = ok and drw.restrict(drw.verschiebung(x)) == drw.verschiebung(drw.restrict(x))
            res["restrict-compatibility"].record(ok, x=x, y=y_up)
    return list(res.values())


# --- normal forms -----------------------------------------------------------------------------


def words(model: LocalModel, m: int, trials: int, rng: random.Random) -> List[CheckResult]:
    rt = CheckResult("expand-normalize-roundtrip")
    idem = CheckResult("normalize-idempotent")
    for _ in range(trials):
        key = drw.random_key(model, m, rng)
        xi = drw.random_xi(model, m, key[0], rng)
        elt = DrwElement(model, m, {key: xi})
        w = drw.expand_to_word(model, m, key, xi)
        nf = drw.normalize_word(w)
        rt.record(nf == elt, element=elt, word=str(w))
        again = drw.zero(model, m)
        for k2, xi2 in nf.terms.items():
            again = again + drw.normalize_word(drw.expand_to_word(model, m, k2, xi2))
        idem.record(again == nf, element=elt)
    return [rt, idem]


def roundtrip(model: LocalModel, m: int, trials: int, rng: random.Random) -> List[CheckResult]:
    from .cli import parse_element, serialize

    res = CheckResult("serialize-parse-roundtrip")
    for _ in range(trials):
        x = drw.random_element(model, m, rng)
        res.record(parse_element(serialize(x), model, m) == x, element=x)
    return [res]


# --- ghost components -------------------------------------------------------------------------


def ghost_grid(model: LocalModel, m: int, max_num: int, max_den: int) -> CheckResult:
    """Ghost formula against F^i followed by restriction to level one, every basic term."""
    from .weights import enumerate_weights

    res = CheckResult("ghost-formula")
    for k in enumerate_weights(model, max_num, max_den):
        kap = tuple(Fraction(0) if x is drw.POLE else x for x in k)
        if u_of(kap, model.p) >= m:
            continue
        for key in drw.basis_keys(model, kap, m):
            if key[0] != k:
                continue
            elt = DrwElement(model, m, {key: model.p ** u_of(k, model.p)})
            for i in range(m):
                img = elt
                for _ in range(i):
                    img = drw.frobenius(img)
                want = drw.restrict_to(img, 1)
                got = lift_dr.compare(drw.ghost(elt, i))
                res.record(got == want, element=elt, index=i)
    return res


def ghost_laws(model: LocalModel, m: int, trials: int, rng: random.Random) -> List[CheckResult]:
    mult = CheckResult("ghost-multiplicative")
    feq = CheckResult("ghost-F-equivariant")
    veq = CheckResult("ghost-V-equivariant")
    for _ in range(trials):
        x = drw.random_element(model, m, rng)
        y = drw.random_element(model, m, rng)
        i = rng.randrange(m)
        lhs = drw.ghost(drw.multiply(x, y), i)
        rhs = lift_dr.mul_lift(drw.ghost(x, i), drw.ghost(y, i))
        mult.record(lift_dr.compare(lhs) == lift_dr.compare(rhs), x=x, y=y, index=i)
        if m >= 2:
            j = rng.randrange(m - 1)
            lhs = drw.ghost(drw.frobenius(x), j)
            rhs = drw.ghost(x, j + 1)
            feq.record(lift_dr.compare(lhs) == lift_dr.compare(rhs), x=x, index=j)
        # ghost_i(V x) = p ghost_(i-1)(x), which vanishes over F_p; ghost_0(V x) = 0
        j = rng.randrange(m + 1)
        veq.record(not drw.ghost(drw.verschiebung(x), j).terms, x=x, index=j)
    return [mult, feq, veq]


# --- degree-0 oracle and Gauss norms ----------------------------------------------------------


def witt_oracle(model: LocalModel, m: int, trials: int, rng: random.Random) -> List[CheckResult]:
    mul = CheckResult("w_mul-oracle")
    add = CheckResult("w_add-oracle")
    for _ in range(trials):
        x = drw.random_element(model, m, rng, degree=0)
        y = drw.random_element(model, m, rng, degree=0)
        a, b = wp.from_drw(x), wp.from_drw(y)
        mul.record(wp.to_drw(wp.w_mul(a, b), model) == drw.multiply(x, y), x=x, y=y)
        add.record(wp.to_drw(wp.w_add(a, b), model) == x + y, x=x, y=y)
    return [mul, add]


def gauss(model: LocalModel, m: int, trials: int, rng: random.Random,
          eps_values: Iterable[Fraction]) -> List[CheckResult]:
    ident = CheckResult("gauss-coordinate-identity")
    sub = CheckResult("gauss-subadditive")
    prod = CheckResult("gauss-product-bound")
    dw = CheckResult("gauss-d-witness")
    eps_values = [Fraction(e) for e in eps_values]
    for _ in range(trials):
        x = drw.random_element(model, m, rng, degree=0)
        y = drw.random_element(model, m, rng)
        z = drw.random_element(model, m, rng)
        for eps in eps_values:
            ident.record(oc.gauss_norm(x, eps) == oc.gauss_from_coords(wp.from_drw(x), eps), x=x, eps=eps)
            gy, gz = oc.gauss_norm(y, eps), oc.gauss_norm(z, eps)
            sub.record(oc.gauss_norm(y + z, eps) >= min(gy, gz), x=y, y=z, eps=eps)
            prod.record(oc.is_overconvergent_sample(drw.multiply(y, z), eps, gy + gz), x=y, y=z, eps=eps)
            dw.record(oc.gauss_norm(drw.differential(y), eps) >= gy, x=y, eps=eps)
    return [ident, sub, prod, dw]


# --- per-weight cohomology ---------------------------------------------------------------------


def compare_lift(model: LocalModel, m: int, max_num: int, max_den: int,
                 method: str = "local") -> tuple:
    """Fractional weights acyclic; integral weights: lift and de Rham-Witt divisors agree."""
    frac = CheckResult("fractional-weights-acyclic")
    integ = CheckResult("integral-weights-lift-equals-drw")
    table = {}
    for kappa in weight_grid(model, m, max_num, max_den):
        rep = homology(weight_subcomplex(model, m, kappa, "absolute"), method)
        label = _kappa_label(kappa, model.p)
        table[label] = rep.table()
        if not is_integral(kappa):
            frac.record(rep.is_zero(), weight=label)
        else:
            lift = homology(weight_subcomplex(model, m, kappa, "lift"), method)
            integ.record(_nonzero(lift.table()) == _nonzero(rep.table()), weight=label)
    return [frac, integ], table


def _nonzero(t: Dict[str, List[str]]) -> Dict[str, List[str]]:
    return {k: v for k, v in t.items() if v}


def _kappa_label(kappa, p: int) -> str:
    from .weights import format_entry

    return "(" + ", ".join(format_entry(Fraction(x), p) for x in kappa) + ")"


def cohomology_tables(model: LocalModel, m: int, max_num: int, max_den: int,
                      variant: str, method: str = "local") -> Dict[str, Dict[str, List[str]]]:
    out = {}
    for kappa in weight_grid(model, m, max_num, max_den):
        if variant == "lift" and not is_integral(kappa):
            continue
        out[_kappa_label(kappa, model.p)] = homology(weight_subcomplex(model, m, kappa, variant), method).table()
    return out


def theta_checks(model: LocalModel, m: int, trials: int, rng: random.Random,
                 max_num: int, max_den: int) -> List[CheckResult]:
    model = model.over_log_point()
    hom = CheckResult("theta-homotopy-identity")
    seq = CheckResult("theta-sequence-exact")
    quot = CheckResult("relative-quotient-size")
    for _ in range(trials):
        x = drw.random_element(model, m, rng)
        lhs = drw.contraction(drw.wedge_theta(x)) + drw.wedge_theta(drw.contraction(x))
        hom.record(lhs == x, x=x)
    for kappa in weight_grid(model, m, max_num, max_den):
        label = _kappa_label(kappa, model.p)
        seq.record(homology(theta_sequence(model, m, kappa)).is_zero(), weight=label)
        keys = drw.basis_keys(model, kappa, m)
        index = {k: i for i, k in enumerate(keys)}
        orders = [m - u_of(kappa, model.p)] * len(keys)
        for deg in range(model.n + model.f + 1):
            cols = []
            for key in keys:
                if drw.key_degree(key) == deg - 1:
                    img = drw.wedge_theta(fs._gen(model, m, key))
                    cols.append({index[k2]: c for k2, c in drw.coords_of(img).items()})
            whole = sum(o for k, o in zip(keys, orders) if drw.key_degree(k) == deg)
            image = submodule_log_size(model.p, orders, cols)
            wc = len(fs.relative_keys(model, m, kappa, degree=deg)) * (m - u_of(kappa, model.p))
            quot.record(whole - image == wc, weight=label, degree=deg)
    return [hom, seq, quot]


def mv_checks(model: LocalModel, m: int, max_num: int, max_den: int) -> List[CheckResult]:
    rel = CheckResult("mayer-vietoris-relative")
    absolute = CheckResult("mayer-vietoris-absolute")
    for kappa in weight_grid(model, m, max_num, max_den):
        label = _kappa_label(kappa, model.p)
        for deg in range(model.n + model.f + 1):
            rel.record(homology(mv_sequence(model, m, kappa, deg, True)).is_zero(), weight=label, degree=deg)
            absolute.record(homology(mv_sequence(model, m, kappa, deg, False)).is_zero(), weight=label, degree=deg)
    return [rel, absolute]


# --- Steenbrink complex, residues, spectral sequence --------------------------------------------


def steenbrink_checks(model: LocalModel, m: int, max_num: int, max_den: int,
                      method: str = "local") -> List[CheckResult]:
    model = fs.check_model(model)
    names = ["squares-anticommute", "resolution-exact", "augmentation-quasi-isomorphism",
             "total-matches-relative", "residue-signed-permutation", "residue-chain-map",
             "filtration-image-equals-pole-count", "gys1", "d1-identification",
             "frobenius-factoring", "frobenius-row0", "frobenius-theta", "frobenius-gr"]
    res = {n: CheckResult(n) for n in names}
    n = model.n
    for kappa in weight_grid(model, m, max_num, max_den):
        label = _kappa_label(kappa, model.p)
        res["squares-anticommute"].record(fs.anticommutes(model, m, kappa), weight=label)
        for i in range(n + 1):
            row = fs.resolution_row(model, m, kappa, i)
            res["resolution-exact"].record(homology(row, method).is_zero(), weight=label, row=i)
        res["augmentation-quasi-isomorphism"].record(
            homology(fs.augmentation_cone(model, m, kappa), method).is_zero(), weight=label)
        tot = homology(fs.total_complex(model, m, kappa), method).table()
        relc = homology(weight_subcomplex(model, m, kappa, "relative"), method).table()
        res["total-matches-relative"].record(_nonzero(tot) == _nonzero(relc), weight=label)
        for k in range(-model.d, model.d + 1):
            res["residue-signed-permutation"].record(
                fs.residue_matrix_is_signed_permutation(model, m, kappa, k), weight=label, k=k)
            res["residue-chain-map"].record(
                fs.residue_commutes_with_differential(model, m, kappa, k), weight=label, k=k)
            res["d1-identification"].record(fs.d1_identification_holds(model, m, kappa, k), weight=label, k=k)
        for deg in range(n + 1):
            for j in range(model.d + 1):
                cmp = fs.filtration_comparison(model, m, kappa, j, deg)
                res["filtration-image-equals-pole-count"].record(cmp["equal"], weight=label, j=j, degree=deg)
                if j < model.d:
                    res["gys1"].record(fs.gys1_holds(model, m, kappa, j, deg), weight=label, j=j, degree=deg)
        fr = fs.frobenius_diagrams(model, m, kappa)
        res["frobenius-factoring"].record(fr["factoring"], weight=label)
        res["frobenius-row0"].record(fr["row0"], weight=label)
        res["frobenius-theta"].record(fr["theta"], weight=label)
        res["frobenius-gr"].record(fr["gr"], weight=label)
    return list(res.values())


def e1_checks(model: LocalModel, m: int, max_num: int, max_den: int, method: str = "local"):
    model = fs.check_model(model)
    kappas = weight_grid(model, m, max_num, max_den)
    page = fs.e1_page(model, m, kappas, method)
    sq = CheckResult("d1-squares-to-zero")
    sq.record(page.d1_squares_zero)
    abut = CheckResult("e1-bounds-abutment")
    for kappa in kappas:
        tot = homology(fs.total_complex(model, m, kappa), method)
        for h, divs in tot.divisors.items():
            e1 = 0
            for k in range(-model.d, model.d + 1):
                gr = homology(fs.gr_total_complex(model, m, kappa, k), method)
                e1 += sum(gr.divisors.get(h, []))
            abut.record(e1 >= sum(divs), weight=_kappa_label(kappa, model.p), degree=h)
    return [sq, abut], page
