"""Log de Rham complex of the canonical lift A_m = (Z/p^m)[T] / (T_1 ... T_d).

Forms are sparse sums  c * T^a * w  where ``w`` is a sorted wedge word in
the generators dlog c_j, dlog T_i (i <= e) and dT_i (i > e).  Generator ids
follow :mod:`logdrw.exterior`: dlog c_j -> j - 1, position i -> f + i - 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

from . import drw
from . import exterior as ex
from .weights import (
    POLE,
    LocalModel,
    Partition,
    WeightError,
    is_integral,
    k_plus,
    ord_entry,
    validate_partition,
    validate_weight,
)
from .witt_scalar import StructureError

TermKey = Tuple[Tuple[int, ...], Tuple[int, ...]]


class LiftForm:
    """Element of the log de Rham complex of A_m over Z/p^m."""

    __slots__ = ("model", "level", "terms")

    def __init__(self, model: LocalModel, level: int, terms: Dict[TermKey, int] | None = None):
        self.model = model
        self.level = level
        mod = model.p**level
        self.terms = {}
        for key, c in (terms or {}).items():
            c %= mod
            if c and not _killed(model, key[0]):
                self.terms[key] = c

    # constructors

    @classmethod
    def zero(cls, model: LocalModel, m: int) -> "LiftForm":
        return cls(model, m)

    @classmethod
    def monomial(cls, model: LocalModel, m: int, c: int, exps: Sequence[int], gens: Iterable[int]) -> "LiftForm":
        s, word = ex.sort_sign(gens)
        if not s:
            return cls(model, m)
        return cls(model, m, {(tuple(exps), word): s * c})

    @classmethod
    def one(cls, model: LocalModel, m: int) -> "LiftForm":
        return cls.monomial(model, m, 1, [0] * model.n, ())

    @classmethod
    def t(cls, model: LocalModel, m: int, i: int) -> "LiftForm":
        exps = [0] * model.n
        exps[i - 1] = 1
        return cls.monomial(model, m, 1, exps, ())

    @classmethod
    def dlog_t(cls, model: LocalModel, m: int, i: int) -> "LiftForm":
        if not 1 <= i <= model.e:
            raise StructureError(f"dlog T_{i} needs i <= e")
        return cls.monomial(model, m, 1, [0] * model.n, (ex.g_id(model, i),))

    @classmethod
    def dt(cls, model: LocalModel, m: int, i: int) -> "LiftForm":
        return d_lift(cls.t(model, m, i))

    @classmethod
    def dlog_c(cls, model: LocalModel, m: int, j: int) -> "LiftForm":
        if not 1 <= j <= model.f:
            raise StructureError(f"dlog c_{j} needs j <= f")
        return cls.monomial(model, m, 1, [0] * model.n, (ex.c_id(model, j),))

    # protocol

    def _check(self, other: "LiftForm") -> None:
        if not isinstance(other, LiftForm) or other.model != self.model or other.level != self.level:
            raise StructureError("LiftForm model or level mismatch")

    def __eq__(self, other) -> bool:
        if not isinstance(other, LiftForm):
            return NotImplemented
        return self.model == other.model and self.level == other.level and self.terms == other.terms

    def __hash__(self):
        return hash((self.model, self.level, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "LiftForm") -> "LiftForm":
        self._check(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return LiftForm(self.model, self.level, t)

    def __neg__(self) -> "LiftForm":
        return LiftForm(self.model, self.level, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "LiftForm") -> "LiftForm":
        return self + (-other)

    def scale(self, c: int) -> "LiftForm":
        return LiftForm(self.model, self.level, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return mul_lift(self, other)

    __rmul__ = scale

    def degree_set(self) -> set:
        return {len(w) for (_, w) in self.terms}

    def weight_of(self, key: TermKey) -> tuple:
        return term_weight(self.model, key)

    def reduce(self, m: int) -> "LiftForm":
        return LiftForm(self.model, m, dict(self.terms))

    def __repr__(self) -> str:
        if not self.terms:
            return "LiftForm(0)"
        bits = []
        for (a, w), c in sorted(self.terms.items()):
            bits.append(f"{c}*T^{list(a)}*{_word_str(self.model, w)}")
        return "LiftForm(" + " + ".join(bits) + ")"


def _word_str(model: LocalModel, w: Tuple[int, ...]) -> str:
    out = []
    for x in w:
        if x < model.f:
            out.append(f"dlog c{x + 1}")
        else:
            i = x - model.f + 1
            out.append(f"dlog T{i}" if i <= model.e else f"dT{i}")
    return "^".join(out) if out else "1"


def _killed(model: LocalModel, exps: Sequence[int]) -> bool:
    return bool(model.d) and all(exps[i] >= 1 for i in range(model.d))


def term_weight(model: LocalModel, key: TermKey) -> tuple:
    a, w = key
    k = list(a)
    for x in w:
        if x >= model.f:
            i = x - model.f + 1
            if i > model.e:
                k[i - 1] += 1
    return tuple(k)


def mul_lift(x: LiftForm, y: LiftForm) -> LiftForm:
    x._check(y)
    out: Dict[TermKey, int] = {}
    for (a1, w1), c1 in x.terms.items():
        for (a2, w2), c2 in y.terms.items():
            s, w = ex.wedge_mono(w1, w2)
            if not s:
                continue
            a = tuple(i + j for i, j in zip(a1, a2))
            out[(a, w)] = out.get((a, w), 0) + s * c1 * c2
    return LiftForm(x.model, x.level, out)


def d_lift(x: LiftForm) -> LiftForm:
    """Exterior derivative, a left derivation with d(dlog T_i) = d(dT_i) = 0."""
    model = x.model
    out: Dict[TermKey, int] = {}
    for (a, w), c in x.terms.items():
        for i in range(1, model.n + 1):
            ai = a[i - 1]
            if not ai:
                continue
            gid = ex.g_id(model, i)
            s, w2 = ex.wedge_mono((gid,), w)
            if not s:
                continue
            if i <= model.e:
                a2 = a
            else:
                a2 = a[: i - 1] + (ai - 1,) + a[i:]
            out[(a2, w2)] = out.get((a2, w2), 0) + s * ai * c
    return LiftForm(model, x.level, out)


def scaled_dmonomial(model: LocalModel, m: int, b: Sequence[int]) -> LiftForm:
    """p^(-ord_p b) d(T^b), with the division done on integers before reduction."""
    p = model.p
    supp = [i for i in range(len(b)) if b[i]]
    if not supp:
        return LiftForm.zero(model, m)
    o = min(int(ord_entry(Fraction(b[i]), p)) for i in supp)
    out: Dict[TermKey, int] = {}
    for i in supp:
        coeff = b[i] // p**o
        gid = ex.g_id(model, i + 1)
        if i + 1 <= model.e:
            a = tuple(b)
        else:
            a = tuple(b[j] - (1 if j == i else 0) for j in range(len(b)))
        out[(a, (gid,))] = out.get((a, (gid,)), 0) + coeff
    return LiftForm(model, m, out)


def make_p_basic(k, part: Partition, J: Iterable[int], m: int, model: LocalModel) -> LiftForm:
    """The log p-basic element eps(k, P, J) of the lifted complex."""
    k = tuple(k)
    validate_weight(model, k)
    if not is_integral(k):
        raise WeightError("p-basic elements need an integral weight")
    if not validate_partition(k, part, model.p):
        raise WeightError(f"{part} is not a partition of Supp {k}")
    J = tuple(sorted(J))
    form = LiftForm.one(model, m)
    for j in J:
        form = form * LiftForm.dlog_c(model, m, j)
    for i in part.poles:
        form = form * LiftForm.dlog_t(model, m, i)
    a0 = [0] * model.n
    for i in part.I0:
        a0[i - 1] = int(k[i - 1])
    form = form * LiftForm.monomial(model, m, 1, a0, ())
    for block in part.blocks[1:]:
        b = [0] * model.n
        for i in block:
            b[i - 1] = int(k[i - 1])
        form = form * scaled_dmonomial(model, m, b)
    return form


# -- p-basic coordinates ---------------------------------------------------------


def raw_keys(model: LocalModel, kappa: tuple) -> List[TermKey]:
    """Raw basis monomials T^a w of weight kappa."""
    n, e, f = model.n, model.e, model.f
    kap = [int(x) for x in kappa]
    out = []
    nonlog = [i for i in range(e + 1, n + 1) if kap[i - 1] > 0]
    logs = list(range(1, e + 1))
    for r1 in range(len(nonlog) + 1):
        for dts in itertools.combinations(nonlog, r1):
            a = list(kap)
            for i in dts:
                a[i - 1] -= 1
            if _killed(model, a):
                continue
            for r2 in range(len(logs) + 1):
                for dl in itertools.combinations(logs, r2):
                    for r3 in range(f + 1):
                        for cs in itertools.combinations(range(1, f + 1), r3):
                            gens = [ex.c_id(model, j) for j in cs]
                            gens += [ex.g_id(model, i) for i in dl]
                            gens += [ex.g_id(model, i) for i in dts]
                            out.append((tuple(a), tuple(sorted(gens))))
    return sorted(out)


@lru_cache(maxsize=None)
def _pbasic_system(model: LocalModel, kappa: tuple, m: int):
    keys = drw.basis_keys(model, kappa, m + 10)  # integral kappa: every key survives
    raws = raw_keys(model, kappa)
    index = {r: i for i, r in enumerate(raws)}
    if len(raws) != len(keys):
        raise ArithmeticError(f"p-basic count {len(keys)} != raw count {len(raws)} at {kappa}")
    mod = model.p**m
    cols = []
    for key in keys:
        form = make_p_basic(key[0], key[1], key[2], m, model)
        col = [0] * len(raws)
        for rk, c in form.terms.items():
            col[index[rk]] = c
        cols.append(col)
    matrix = [[cols[j][i] for j in range(len(keys))] for i in range(len(raws))]
    inv = _inverse_mod(matrix, model.p, m)
    return keys, index, inv


def _inverse_mod(a: List[List[int]], p: int, m: int) -> List[List[int]]:
    """Inverse of a square matrix over Z/p^m (must be invertible mod p)."""
    n = len(a)
    mod = p**m
    aug = [[x % mod for x in row] + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] % p), None)
        if piv is None:
            raise ArithmeticError("matrix is not invertible over Z/p^m")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, mod)
        aug[col] = [(x * inv) % mod for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                fct = aug[r][col]
                aug[r] = [(x - fct * y) % mod for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def pbasic_coords(phi: LiftForm) -> Dict[tuple, int]:
    """Coordinates of phi in the p-basic basis, keyed like drw basic terms."""
    model, m = phi.model, phi.level
    mod = model.p**m
    by_weight: Dict[tuple, Dict[TermKey, int]] = {}
    for key, c in phi.terms.items():
        by_weight.setdefault(term_weight(model, key), {})[key] = c
    out: Dict[tuple, int] = {}
    for kappa, terms in by_weight.items():
        kap = tuple(Fraction(x) for x in kappa)
        keys, index, inv = _pbasic_system(model, kap, m)
        vec = [0] * len(index)
        for rk, c in terms.items():
            vec[index[rk]] = c
        for j, key in enumerate(keys):
            v = sum(inv[j][i] * vec[i] for i in range(len(vec))) % mod
            if v:
                out[key] = v
    return out


def compare(phi: LiftForm, m: int | None = None) -> "drw.DrwElement":
    """Comparison map via the dictionary eps(k, P, J) -> eps(1, k, P, J)."""
    if m is not None and m != phi.level:
        raise StructureError("compare keeps the level of the form")
    return drw.DrwElement(phi.model, phi.level, pbasic_coords(phi))


def compare_generic(phi: LiftForm) -> "drw.DrwElement":
    """Chart map T_i -> [T_i], dT_i -> d[T_i], dlog -> dlog, extended multiplicatively."""
    model, m = phi.model, phi.level
    total = drw.zero(model, m)
    for (a, w), c in phi.terms.items():
        elt = drw.teich_monomial(model, m, 1, a).scale(c)
        for x in w:
            if x < model.f:
                fac = drw.dlog_c(model, x + 1, m)
            else:
                i = x - model.f + 1
                if i <= model.e:
                    fac = drw.dlog_x(model, i, m)
                else:
                    exps = [0] * model.n
                    exps[i - 1] = 1
                    fac = drw.differential(drw.teich_monomial(model, m, 1, exps))
            elt = drw.multiply(elt, fac)
        total = total + elt
    return total


def weight_subcomplex_lift(model: LocalModel, m: int, kappa):
    """Weight-kappa piece of the lifted complex in the p-basic basis."""
    from .homology import ComplexPresentation

    kappa = tuple(Fraction(x) for x in kappa)
    if any(x.denominator != 1 for x in kappa):
        raise WeightError("the lifted complex only has integral weights")
    keys = drw.basis_keys(model, kappa, m + 10)
    by_deg: Dict[int, list] = {}
    for key in keys:
        by_deg.setdefault(drw.key_degree(key), []).append(key)
    orders = {deg: [m] * len(ks) for deg, ks in by_deg.items()}
    maps = {}
    for deg, ks in by_deg.items():
        tgt = by_deg.get(deg + 1, [])
        if not tgt:
            continue
        index = {k: i for i, k in enumerate(tgt)}
        mat = [[0] * len(ks) for _ in tgt]
        for j, key in enumerate(ks):
            img = pbasic_coords(d_lift(make_p_basic(key[0], key[1], key[2], m, model)))
            for k2, c in img.items():
                mat[index[k2]][j] = c
        maps[deg] = mat
    return ComplexPresentation(model.p, orders, maps, {d: list(v) for d, v in by_deg.items()})


def random_lift_form(model: LocalModel, m: int, rng, max_terms: int = 3, max_exp: int = 4) -> LiftForm:
    n, e, f = model.n, model.e, model.f
    terms: Dict[TermKey, int] = {}
    gens_all = list(range(f + n))
    for _ in range(rng.randint(1, max_terms)):
        a = [rng.choice([0, 0, 1, 2, rng.randint(0, max_exp)]) for _ in range(n)]
        if _killed(model, a):
            a[rng.randrange(model.d)] = 0
        gens = tuple(sorted(g for g in gens_all if rng.random() < 0.3))
        terms[(tuple(a), gens)] = rng.randrange(1, model.p**m)
    return LiftForm(model, m, terms)
