"""Exterior-algebra realisation of the weight pieces of W Lambda.

An element of weight kappa (pole-free part of k) is stored as an exterior
vector over Q in the generators

    dlog c_1, ..., dlog c_f, g_1, ..., g_n        (g_i = dlog T_i)

with the convention that the vector stands for ``T^kappa * vector``.  In this
picture

* d is left multiplication by theta_kappa = sum_i kappa_i g_i,
* F sends kappa to p*kappa and keeps the vector,
* V sends kappa to kappa/p and multiplies the vector by p,
* products add weights and wedge the vectors.

The basic element G(k, P, J) of order p^(m-u) is

    coef * dlog c_J ^ g_{poles} ^ prod_j p^(-ord k_{I_j}) theta_{I_j},

with coef = p^u when I_0 is nonempty and 1 otherwise, so that the basic Witt
differential with coefficient xi equals (xi / p^u) * G.  Writing h_s for the
tail sums of kappa_i g_i along the canonical order, prod_j theta_{I_j} is the
wedge of the h's at the block starts, which makes the change of basis a
triangular substitution.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Tuple

from .weights import (
    POLE,
    LocalModel,
    Partition,
    covers_relation,
    ord_entry,
    partition_from_starts,
    starts_of,
    u_of,
)

Mono = Tuple[int, ...]
Evec = Dict[Mono, Fraction]
Key = tuple  # (k, Partition, J)


class IntegralityError(ArithmeticError):
    """A coefficient that should be p-integral is not; signals an engine bug."""


def c_id(model: LocalModel, j: int) -> int:
    return j - 1


def g_id(model: LocalModel, i: int) -> int:
    return model.f + i - 1


def sort_sign(seq: Iterable[int]) -> Tuple[int, Mono]:
    """Sort a wedge word; returns (sign, sorted) or (0, ()) on a repeat."""
    a = list(seq)
    sign = 1
    for i in range(1, len(a)):
        x = a[i]
        j = i - 1
        while j >= 0 and a[j] > x:
            a[j + 1] = a[j]
            j -= 1
            sign = -sign
        if j >= 0 and a[j] == x:
            return 0, ()
        a[j + 1] = x
    return sign, tuple(a)


def wedge_mono(a: Mono, b: Mono) -> Tuple[int, Mono]:
    if not a:
        return 1, b
    if not b:
        return 1, a
    return sort_sign(a + b)


def wedge(x: Evec, y: Evec) -> Evec:
    out: Evec = {}
    for ma, ca in x.items():
        for mb, cb in y.items():
            s, mono = wedge_mono(ma, mb)
            if s:
                v = out.get(mono, 0) + s * ca * cb
                if v:
                    out[mono] = v
                else:
                    out.pop(mono, None)
    return out


def add_into(acc: Evec, x: Evec, c=1) -> None:
    for mono, v in x.items():
        w = acc.get(mono, 0) + c * v
        if w:
            acc[mono] = w
        else:
            acc.pop(mono, None)


# --- per-weight data ---------------------------------------------------------


class WeightData:
    """Canonical order and p-adic data of a pole-free weight."""

    __slots__ = ("kappa", "order", "slot", "vals", "ords", "u", "integral")

    def __init__(self, kappa: tuple, p: int):
        self.kappa = kappa
        supp = [i for i in range(1, len(kappa) + 1) if kappa[i - 1] != 0]
        self.order = tuple(sorted(supp, key=lambda i: (ord_entry(kappa[i - 1], p), i)))
        self.slot = {i: s for s, i in enumerate(self.order)}
        self.vals = tuple(kappa[i - 1] for i in self.order)
        self.ords = tuple(int(ord_entry(v, p)) for v in self.vals)
        self.u = u_of(kappa, p)
        self.integral = self.u == 0


@lru_cache(maxsize=None)
def weight_data(kappa: tuple, p: int) -> WeightData:
    return WeightData(kappa, p)


def basis_scale(wd: WeightData, starts: tuple, p: int) -> Fraction:
    """coef * prod_b p^(-ord_b) for the block starts b."""
    scale = Fraction(1)
    if not starts or starts[0] > 0:
        scale *= p**wd.u
    for b in starts:
        o = wd.ords[b]
        scale *= Fraction(1, p**o) if o >= 0 else p ** (-o)
    return scale


@lru_cache(maxsize=None)
def _h_product(kappa: tuple, p: int, starts: tuple) -> Tuple[Tuple[Mono, Fraction], ...]:
    """h_{b_1} ^ ... ^ h_{b_l} expanded in g's, as (sorted positions, coef)."""
    wd = weight_data(kappa, p)
    terms: Dict[Mono, Fraction] = {(): Fraction(1)}
    for b in starts:
        new: Dict[Mono, Fraction] = {}
        for mono, c in terms.items():
            for t in range(b, len(wd.order)):
                i = wd.order[t]
                s, m2 = sort_sign(mono + (i,))
                if s:
                    new[m2] = new.get(m2, 0) + s * c * wd.vals[t]
        terms = {m: c for m, c in new.items() if c}
    return tuple(sorted(terms.items()))


@lru_cache(maxsize=None)
def _g_to_h(kappa: tuple, p: int, slots: tuple) -> Tuple[Tuple[tuple, Fraction], ...]:
    """Expand g_{i_s1} ^ ... ^ g_{i_sq} (slots ascending) in the h-basis.

    Uses g_{i_s} = (h_s - h_{s+1}) / kappa_{i_s} with h_r = 0.
    """
    wd = weight_data(kappa, p)
    r = len(wd.order)
    terms: Dict[tuple, Fraction] = {(): Fraction(1)}
    for s in slots:
        inv = 1 / wd.vals[s]
        new: Dict[tuple, Fraction] = {}
        for word, c in terms.items():
            for t, sg in ((s, 1), (s + 1, -1)):
                if t >= r:
                    continue
                sgn, w2 = sort_sign(word + (t,))
                if sgn:
                    new[w2] = new.get(w2, 0) + sgn * sg * c * inv
        terms = {w: c for w, c in new.items() if c}
    return tuple(sorted(terms.items()))


def make_key(model: LocalModel, kappa: tuple, poles: tuple, starts: tuple, J: tuple) -> Key:
    k = tuple(POLE if (i + 1) in poles else kappa[i] for i in range(model.n))
    return (k, partition_from_starts(k, list(starts), model.p), J)


@lru_cache(maxsize=None)
def decompose_mono(model: LocalModel, kappa: tuple, mono: Mono) -> Tuple[Tuple[Key, Fraction], ...]:
    """Coordinates of T^kappa * mono in the basis G(k, P, J)."""
    if covers_relation(model, kappa):
        return ()
    f = model.f
    wd = weight_data(kappa, model.p)
    J = tuple(x + 1 for x in mono if x < f)
    poles = []
    inner = []
    for x in mono:
        if x < f:
            continue
        i = x - f + 1
        if kappa[i - 1] == 0:
            if i > model.e:
                raise IntegralityError(f"dlog T_{i} with i > e at weight 0 in position {i}")
            poles.append(i)
        else:
            inner.append(i)
    inner.sort(key=lambda i: wd.slot[i])
    target = [x for x in mono if x < f] + [g_id(model, i) for i in poles] + [
        g_id(model, i) for i in inner
    ]
    sign, _ = sort_sign(target)
    slots = tuple(wd.slot[i] for i in inner)
    out = []
    for starts, c in _g_to_h(kappa, model.p, slots):
        key = make_key(model, kappa, tuple(poles), starts, J)
        out.append((key, sign * c / basis_scale(wd, starts, model.p)))
    return tuple(out)


@lru_cache(maxsize=None)
def basis_evec(model: LocalModel, key: Key) -> Tuple[tuple, Tuple[Tuple[Mono, Fraction], ...]]:
    """(kappa, vector) of the basic element G(key)."""
    k, part, J = key
    kappa = tuple(Fraction(0) if x is POLE else x for x in k)
    wd = weight_data(kappa, model.p)
    starts = starts_of(part)
    outer = tuple(c_id(model, j) for j in J) + tuple(g_id(model, i) for i in part.poles)
    scale = basis_scale(wd, starts, model.p)
    vec: Evec = {}
    for inner, c in _h_product(kappa, model.p, starts):
        s, mono = sort_sign(outer + tuple(g_id(model, i) for i in inner))
        if s:
            vec[mono] = vec.get(mono, 0) + s * c * scale
    return kappa, tuple(sorted((m, c) for m, c in vec.items() if c))


def decompose(model: LocalModel, kappa: tuple, vec: Evec) -> Dict[Key, Fraction]:
    out: Dict[Key, Fraction] = {}
    for mono, c in vec.items():
        for key, a in decompose_mono(model, kappa, mono):
            v = out.get(key, 0) + c * a
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def theta_vec(kappa: tuple, model: LocalModel) -> Evec:
    return {(g_id(model, i),): Fraction(x) for i, x in enumerate(kappa, start=1) if x != 0}


# --- cached operations on single basic elements --------------------------------
# Results are coordinates in the G-basis; they do not depend on the level.


@lru_cache(maxsize=None)
def d_basis(model: LocalModel, key: Key) -> Tuple[Tuple[Key, Fraction], ...]:
    kappa, vec = basis_evec(model, key)
    out = decompose(model, kappa, wedge(theta_vec(kappa, model), dict(vec)))
    return tuple(out.items())


@lru_cache(maxsize=None)
def frob_basis(model: LocalModel, key: Key) -> Tuple[Tuple[Key, Fraction], ...]:
    kappa, vec = basis_evec(model, key)
    k2 = tuple(x * model.p for x in kappa)
    return tuple(decompose(model, k2, dict(vec)).items())


@lru_cache(maxsize=None)
def ver_basis(model: LocalModel, key: Key) -> Tuple[Tuple[Key, Fraction], ...]:
    kappa, vec = basis_evec(model, key)
    k2 = tuple(x / model.p for x in kappa)
    return tuple(decompose(model, k2, {m: c * model.p for m, c in vec}).items())


@lru_cache(maxsize=None)
def mul_basis(model: LocalModel, a: Key, b: Key) -> Tuple[Tuple[Key, Fraction], ...]:
    ka, va = basis_evec(model, a)
    kb, vb = basis_evec(model, b)
    kappa = tuple(x + y for x, y in zip(ka, kb))
    if covers_relation(model, kappa):
        return ()
    return tuple(decompose(model, kappa, wedge(dict(va), dict(vb))).items())


def contract_vec(vec: Evec, gid: int) -> Evec:
    """Interior product with respect to one generator (odd derivation, from the left)."""
    out: Evec = {}
    for mono, c in vec.items():
        if gid in mono:
            j = mono.index(gid)
            m2 = mono[:j] + mono[j + 1 :]
            out[m2] = out.get(m2, 0) + (-c if j % 2 else c)
    return {m: c for m, c in out.items() if c}
