"""Normal forms in W_m Lambda of a local model.

Elements are finite sums of log basic Witt differentials eps(xi, k, P, J),
stored as a sparse map (k, P, J) -> xi with xi an integer modulo p^m that is
divisible by p^u(k+).  All structure maps are computed through the exterior
realisation in :mod:`logdrw.exterior` and converted back to normal form.

Sign convention: d is a left derivation,
d(a b) = (da) b + (-1)^{|a|} a (db), and dlog generators anticommute.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Optional, Tuple

from . import exterior as ex
from .exterior import Evec, Key
from .weights import (
    POLE,
    LocalModel,
    Partition,
    WeightError,
    covers_relation,
    entry_values,
    enumerate_partitions,
    is_integral,
    k_plus,
    ord_entry,
    pole_set,
    starts_of,
    u_of,
    validate_partition,
    validate_weight,
)
from .witt_scalar import LevelError, StructureError, WittScalar, p_valuation


class DrwError(ValueError):
    pass


def key_degree(key: Key) -> int:
    k, part, J = key
    return len(J) + len(part.poles) + part.length


def key_kappa(key: Key) -> tuple:
    return k_plus(key[0])


def _entry_sort(x) -> tuple:
    return (-1, 0) if x is POLE else (0, x)


def key_sort(key: Key) -> tuple:
    k, part, J = key
    return (
        key_degree(key),
        tuple(_entry_sort(x) for x in k),
        part.blocks,
        J,
    )


class DrwElement:
    """Finite sum of log basic Witt differentials at a fixed level."""

    __slots__ = ("model", "level", "terms")

    def __init__(self, model: LocalModel, level: int, terms: Optional[Dict[Key, int]] = None):
        if level < 1:
            raise LevelError("level must be >= 1")
        self.model = model
        self.level = level
        mod = model.p**level
        clean = {}
        for key, xi in (terms or {}).items():
            xi %= mod
            if xi:
                clean[key] = xi
        self.terms = clean

    # -- basic protocol --------------------------------------------------

    @property
    def p(self) -> int:
        return self.model.p

    def _check(self, other: "DrwElement") -> None:
        if not isinstance(other, DrwElement):
            raise StructureError(f"expected DrwElement, got {type(other).__name__}")
        if other.model != self.model or other.level != self.level:
            raise StructureError("model or level mismatch")

    def __eq__(self, other) -> bool:
        if not isinstance(other, DrwElement):
            return NotImplemented
        return self.model == other.model and self.level == other.level and self.terms == other.terms

    def __hash__(self):
        return hash((self.model, self.level, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "DrwElement") -> "DrwElement":
        self._check(other)
        t = dict(self.terms)
        for key, xi in other.terms.items():
            t[key] = t.get(key, 0) + xi
        return DrwElement(self.model, self.level, t)

    def __neg__(self) -> "DrwElement":
        return DrwElement(self.model, self.level, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "DrwElement") -> "DrwElement":
        return self + (-other)

    def scale(self, c: int) -> "DrwElement":
        return DrwElement(self.model, self.level, {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c: int) -> "DrwElement":
        if isinstance(c, int):
            return self.scale(c)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return multiply(self, other)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: key_sort(kv[0]))

    def degrees(self) -> set:
        return {key_degree(k) for k in self.terms}

    def degree(self) -> int:
        degs = self.degrees()
        if len(degs) > 1:
            raise DrwError("element is not homogeneous")
        return degs.pop() if degs else 0

    def homogeneous(self, deg: int) -> "DrwElement":
        return DrwElement(
            self.model, self.level, {k: v for k, v in self.terms.items() if key_degree(k) == deg}
        )

    def by_kappa(self) -> Dict[tuple, "DrwElement"]:
        out: Dict[tuple, Dict[Key, int]] = {}
        for key, xi in self.terms.items():
            out.setdefault(key_kappa(key), {})[key] = xi
        return {kap: DrwElement(self.model, self.level, t) for kap, t in out.items()}

    def __repr__(self) -> str:
        if not self.terms:
            return f"DrwElement(0, m={self.level})"
        parts = [f"{xi}*eps({list(k)}, {part}, J={list(J)})" for (k, part, J), xi in self.sorted_terms()]
        return f"DrwElement(m={self.level}: " + " + ".join(parts) + ")"


def zero(model: LocalModel, m: int) -> DrwElement:
    return DrwElement(model, m)


def one(model: LocalModel, m: int) -> DrwElement:
    k = tuple(Fraction(0) for _ in range(model.n))
    return DrwElement(model, m, {(k, Partition((), ((),)), ()): 1})


# -- conversions -------------------------------------------------------------


def _xi_from_coeff(c: Fraction, u: int, p: int, m: int) -> int:
    num, den = c.numerator, c.denominator
    if den % p == 0:
        raise ex.IntegralityError(f"coefficient {c} is not p-integral")
    mod = p**m
    return (num * p**u * pow(den, -1, mod)) % mod


def from_coords(model: LocalModel, m: int, coords: Dict[Key, Fraction]) -> DrwElement:
    """Element sum c_key * G(key), keeping only what survives at level m."""
    p = model.p
    terms: Dict[Key, int] = {}
    for key, c in coords.items():
        if not c:
            continue
        u = u_of(key[0], p)
        if u >= m:
            continue
        xi = _xi_from_coeff(c, u, p, m)
        if xi:
            terms[key] = (terms.get(key, 0) + xi) % p**m
    return DrwElement(model, m, terms)


def coords_of(omega: DrwElement) -> Dict[Key, Fraction]:
    p = omega.p
    return {key: Fraction(xi, p ** u_of(key[0], p)) for key, xi in omega.terms.items()}


def to_evecs(omega: DrwElement) -> Dict[tuple, Evec]:
    """Exterior realisation: weight kappa -> vector (exact rationals)."""
    out: Dict[tuple, Evec] = {}
    for key, c in coords_of(omega).items():
        kappa, vec = ex.basis_evec(omega.model, key)
        ex.add_into(out.setdefault(kappa, {}), dict(vec), c)
    return {k: v for k, v in out.items() if v}


def from_evecs(model: LocalModel, m: int, evecs: Dict[tuple, Evec]) -> DrwElement:
    coords: Dict[Key, Fraction] = {}
    p = model.p
    for kappa, vec in evecs.items():
        if u_of(kappa, p) >= m or covers_relation(model, kappa):
            continue
        for key, c in ex.decompose(model, kappa, vec).items():
            coords[key] = coords.get(key, 0) + c
    return from_coords(model, m, coords)


def _apply_linear(omega: DrwElement, table, m_out: int) -> DrwElement:
    coords: Dict[Key, Fraction] = {}
    for key, c in coords_of(omega).items():
        for k2, a in table(omega.model, key):
            coords[k2] = coords.get(k2, 0) + c * a
    return from_coords(omega.model, m_out, coords)


# -- construction --------------------------------------------------------------


def make_basic(xi, k, part: Partition, J: Iterable[int], m: int, model: LocalModel) -> DrwElement:
    """The log basic Witt differential eps_m(xi, k, P, J)."""
    k = tuple(k)
    validate_weight(model, k)
    if not validate_partition(k, part, model.p):
        raise WeightError(f"{part} is not a partition of Supp {k}")
    J = tuple(sorted(J))
    if len(set(J)) != len(J) or any(not 1 <= j <= model.f for j in J):
        raise WeightError(f"bad phantom index set {J}")
    if isinstance(xi, WittScalar):
        if xi.prime != model.p:
            raise StructureError("prime mismatch")
        xi = xi.value
    u = u_of(k, model.p)
    if xi % model.p**m and p_valuation(xi % model.p**m, model.p) < u:
        raise DrwError(f"ord_p(xi) must be >= u(k+) = {u}")
    if u >= m:
        return zero(model, m)
    return DrwElement(model, m, {(k, part, J): xi})


def dlog_x(model: LocalModel, i: int, m: int) -> DrwElement:
    if not 1 <= i <= model.e:
        raise DrwError(f"dlog X_{i} needs 1 <= i <= e")
    k = tuple(POLE if j == i else Fraction(0) for j in range(1, model.n + 1))
    return DrwElement(model, m, {(k, Partition((i,), ((),)), ()): 1})


def dlog_c(model: LocalModel, j: int, m: int) -> DrwElement:
    if not 1 <= j <= model.f:
        raise DrwError(f"dlog c_{j} needs 1 <= j <= f")
    k = tuple(Fraction(0) for _ in range(model.n))
    return DrwElement(model, m, {(k, Partition((), ((),)), (j,)): 1})


def teich_monomial(model: LocalModel, m: int, a: int, exps) -> DrwElement:
    """[a T^exps] for a in F_p and an integral exponent vector."""
    from .witt_scalar import teich_int

    k = tuple(Fraction(x) for x in exps)
    if covers_relation(model, k):
        return zero(model, m)
    supp = tuple(sorted((i for i in range(1, model.n + 1) if k[i - 1] != 0),
                        key=lambda i: (ord_entry(k[i - 1], model.p), i)))
    return DrwElement(model, m, {(k, Partition((), (supp,)), ()): teich_int(a, m, model.p)})


def scalar(model: LocalModel, m: int, c: int) -> DrwElement:
    return one(model, m).scale(c)


# -- structure maps ---------------------------------------------------------------


def frobenius(omega: DrwElement) -> DrwElement:
    if omega.level < 2:
        raise LevelError("F: W_1 -> W_0 is not defined")
    return _apply_linear(omega, ex.frob_basis, omega.level - 1)


def verschiebung(omega: DrwElement) -> DrwElement:
    return _apply_linear(omega, ex.ver_basis, omega.level + 1)


def differential(omega: DrwElement) -> DrwElement:
    return _apply_linear(omega, ex.d_basis, omega.level)


def restrict(omega: DrwElement) -> DrwElement:
    """The projection W_m -> W_{m-1}."""
    if omega.level < 2:
        raise LevelError("cannot restrict below level 1")
    m = omega.level - 1
    p = omega.p
    terms = {key: xi for key, xi in omega.terms.items() if u_of(key[0], p) < m}
    return DrwElement(omega.model, m, terms)


def restrict_to(omega: DrwElement, m: int) -> DrwElement:
    while omega.level > m:
        omega = restrict(omega)
    return omega


def lift_level(omega: DrwElement, m: int) -> DrwElement:
    """Some preimage under restriction (coefficients kept as integers)."""
    return DrwElement(omega.model, m, dict(omega.terms))


def multiply(a: DrwElement, b: DrwElement) -> DrwElement:
    a._check(b)
    coords: Dict[Key, Fraction] = {}
    cb = coords_of(b)
    for ka, ca in coords_of(a).items():
        for kb, cbv in cb.items():
            for k2, c in ex.mul_basis(a.model, ka, kb):
                coords[k2] = coords.get(k2, 0) + ca * cbv * c
    return from_coords(a.model, a.level, coords)


def in_standard_filtration(omega: DrwElement, s: int) -> bool:
    """True iff omega lies in Fil^s = ker(W_m -> W_s)."""
    m = omega.level
    if not 0 <= s <= m:
        raise LevelError("need 0 <= s <= m")
    if s == 0:
        return True
    return restrict_to(omega, s).is_zero()


# -- ghost components ---------------------------------------------------------------


def ghost(omega: DrwElement, i: int):
    """i-th ghost component as a log de Rham form over F_p.

    Implements the explicit formula: zero unless p^i k+ is integral, otherwise
    w_i(xi) dlog c_J dlog T_{I_-inf} T^{p^i k_{I_0}} prod_j p^(-ord) d T^{p^i k_{I_j}},
    with w_{i-u}(eta) in place of w_i(xi) when I_0 is empty.  Over F_p the
    ghost polynomial w_i reduces to the 0-th coordinate.
    """
    from . import lift_dr

    if not 0 <= i < omega.level:
        raise LevelError(f"ghost index {i} out of range for level {omega.level}")
    model, p = omega.model, omega.p
    total = lift_dr.LiftForm.zero(model, 1)
    for (k, part, J), xi in omega.terms.items():
        kap = k_plus(k)
        scaled = tuple(x * p**i for x in kap)
        if any(x.denominator != 1 for x in scaled):
            continue
        u = u_of(k, p)
        if part.I0 or is_integral(k):
            w = xi % p
        else:
            w = (xi // p**u) % p
        if not w:
            continue
        a = tuple(int(x) for x in scaled)
        form = lift_dr.LiftForm.monomial(model, 1, w, [0] * model.n, ())
        for j in J:
            form = form * lift_dr.LiftForm.dlog_c(model, 1, j)
        for t in part.poles:
            form = form * lift_dr.LiftForm.dlog_t(model, 1, t)
        exps0 = [0] * model.n
        for t in part.I0:
            exps0[t - 1] = a[t - 1]
        form = form * lift_dr.LiftForm.monomial(model, 1, 1, exps0, ())
        for block in part.blocks[1:]:
            b = [0] * model.n
            for t in block:
                b[t - 1] = a[t - 1]
            form = form * lift_dr.scaled_dmonomial(model, 1, b)
        total = total + form
    return total


# -- theta calculus (semistable over the log point) -----------------------------------


def theta(model: LocalModel, m: int) -> DrwElement:
    if model.base != "log-point":
        raise DrwError("theta needs a semistable model over the log point")
    t = zero(model, m)
    for i in range(1, model.e + 1):
        t = t + dlog_x(model, i, m)
    for j in range(1, model.f + 1):
        t = t + dlog_c(model, j, m)
    return t


def wedge_theta(omega: DrwElement) -> DrwElement:
    return multiply(theta(omega.model, omega.level), omega)


def pivot(model: LocalModel, kappa: tuple) -> int:
    """Log variable used to split off theta at this weight.

    Position e when kappa_e = 0, otherwise the first i <= d with kappa_i = 0
    (which exists because [1, d] is never inside Supp kappa).
    """
    if kappa[model.e - 1] == 0:
        return model.e
    for i in range(1, model.d + 1):
        if kappa[i - 1] == 0:
            return i
    raise DrwError(f"no pivot at weight {kappa}")


def contraction(omega: DrwElement) -> DrwElement:
    """Homotopy c with c(theta ^ x) + theta ^ c(x) = x."""
    model = omega.model
    if not model.semistable:
        raise DrwError("contraction needs a semistable model")
    out = {}
    for kappa, vec in to_evecs(omega).items():
        q = pivot(model, kappa)
        out[kappa] = ex.contract_vec(vec, ex.g_id(model, q))
    return from_evecs(model, omega.level, out)


def eps_prime_decompose(omega: DrwElement) -> Tuple[DrwElement, DrwElement]:
    """Split omega = wc + wc' with wc free of the pivot pole and wc' in theta ^ WC."""
    wc_prime = wedge_theta(contraction(omega))
    return omega - wc_prime, wc_prime


def to_relative(omega: DrwElement) -> DrwElement:
    """Image in the quotient by theta ^, represented by its WC component."""
    return contraction(wedge_theta(omega))


def relative_differential(omega: DrwElement) -> DrwElement:
    return to_relative(differential(omega))


def in_wc(omega: DrwElement) -> bool:
    model = omega.model
    for key in omega.terms:
        q = pivot(model, key_kappa(key))
        if q in key[1].poles:
            return False
    return True


# -- Mayer-Vietoris restrictions ---------------------------------------------------


def mv_target_model(model: LocalModel, target: str) -> LocalModel:
    p, n, e, f, d = model.p, model.n, model.e, model.f, model.d
    if target == "Z1":
        if d < 2:
            raise DrwError("Z1 needs d >= 2")
        return LocalModel(p, n, e, f, d - 1, model.base)
    if target == "Z2":
        if d < 1:
            raise DrwError("Z2 needs d >= 1")
        return LocalModel(p, n, e, f, 1, model.base)
    if target == "Z":
        if d < 2:
            raise DrwError("Z needs d >= 2")
        return LocalModel(p, n - 1, e - 1, f + 1, d - 1, model.base)
    raise DrwError(f"unknown target {target!r}")


def _position_map(model: LocalModel, target: str) -> Dict[int, tuple]:
    """Source position -> ('g', new position) or ('c', new phantom index)."""
    n, d, f = model.n, model.d, model.f
    if target == "Z1":
        return {i: ("g", i) for i in range(1, n + 1)}
    if target == "Z2":
        order = [d] + [i for i in range(1, n + 1) if i != d]
        return {i: ("g", new) for new, i in enumerate(order, start=1)}
    out = {d: ("c", f + 1)}
    for i in range(1, n + 1):
        if i != d:
            out[i] = ("g", i if i < d else i - 1)
    return out


def relabel(omega: DrwElement, target_model: LocalModel, pos_map: Dict[int, tuple],
            c_map: Optional[Dict[int, int]] = None) -> DrwElement:
    """Transport along a coordinate map given on positions and phantom indices."""
    src = omega.model
    c_map = c_map or {j: j for j in range(1, src.f + 1)}
    gen = {}
    for j, j2 in c_map.items():
        gen[ex.c_id(src, j)] = ex.c_id(target_model, j2)
    for i, (kind, new) in pos_map.items():
        gen[ex.g_id(src, i)] = ex.c_id(target_model, new) if kind == "c" else ex.g_id(target_model, new)
    out: Dict[tuple, Evec] = {}
    for kappa, vec in to_evecs(omega).items():
        new_k = [Fraction(0)] * target_model.n
        ok = True
        for i, (kind, new) in pos_map.items():
            if kind == "c":
                if kappa[i - 1] != 0:
                    ok = False
            else:
                new_k[new - 1] = kappa[i - 1]
        if not ok:
            continue
        new_k = tuple(new_k)
        acc = out.setdefault(new_k, {})
        for mono, c in vec.items():
            s, m2 = ex.sort_sign(gen[x] for x in mono)
            if s:
                acc[m2] = acc.get(m2, 0) + s * c
    out = {k: {m: c for m, c in v.items() if c} for k, v in out.items()}
    return from_evecs(target_model, omega.level, out)


def mv_restrict(omega: DrwElement, target: str, source: str = "X") -> DrwElement:
    """Restriction to Z1 = V(T_1..T_{d-1}), Z2 = V(T_d) or Z = Z1 n Z2.

    ``source`` may be "X" (the model of omega), or "Z1"/"Z2" when omega already
    lives on a component and the target is "Z".
    """
    model = omega.model
    if source == "X":
        tm = mv_target_model(model, target)
        return relabel(omega, tm, _position_map(model, target))
    if target != "Z":
        raise DrwError("components only restrict to Z")
    if source == "Z1":
        # model is X_{d-1,e,n,f}; drop the last relation variable d' = d-1+1
        dd = model.d + 1
        pos = {dd: ("c", model.f + 1)}
        for i in range(1, model.n + 1):
            if i != dd:
                pos[i] = ("g", i if i < dd else i - 1)
        tm = LocalModel(model.p, model.n - 1, model.e - 1, model.f + 1, model.d, model.base)
        return relabel(omega, tm, pos)
    if source == "Z2":
        raise DrwError("use mv_restrict_z2_to_z with the original relation length")
    raise DrwError(f"unknown source {source!r}")


def mv_restrict_z2_to_z(omega: DrwElement, d: int) -> DrwElement:
    """Z2 = X_{1,e,n,f} (old T_d in position 1) -> Z = X_{d-1,e-1,n-1,f+1}."""
    model = omega.model
    pos = {1: ("c", model.f + 1)}
    for i in range(2, model.n + 1):
        pos[i] = ("g", i - 1)
    tm = LocalModel(model.p, model.n - 1, model.e - 1, model.f + 1, d - 1, model.base)
    return relabel(omega, tm, pos)


# -- words ---------------------------------------------------------------------


@dataclass(frozen=True)
class Word:
    """Product xi * f_1 * ... * f_r of elementary factors.

    Factor kinds: ("dlogX", i), ("dlogc", j), ("V", u, eta, exps),
    ("dV", u, eta, exps), ("FdX", s, exps); ``exps`` are integral exponent
    tuples, V^u(eta X^exps) has weight exps / p^u and F^s d X^exps has weight
    p^s exps.
    """

    model: LocalModel
    level: int
    xi: int
    factors: tuple

    def __str__(self) -> str:
        bits = [str(self.xi)]
        for f in self.factors:
            kind = f[0]
            if kind == "dlogX":
                bits.append(f"dlog X{f[1]}")
            elif kind == "dlogc":
                bits.append(f"dlog c{f[1]}")
            elif kind == "V":
                bits.append(f"V^{f[1]}({f[2]} X^{list(f[3])})")
            elif kind == "dV":
                bits.append(f"dV^{f[1]}({f[2]} X^{list(f[3])})")
            else:
                bits.append(f"F^{f[1]} d X^{list(f[2])}")
        return " * ".join(bits)


def _factor_evec(model: LocalModel, fac: tuple) -> Tuple[tuple, Evec]:
    p, n = model.p, model.n
    zero_k = tuple(Fraction(0) for _ in range(n))
    kind = fac[0]
    if kind == "dlogX":
        return zero_k, {(ex.g_id(model, fac[1]),): Fraction(1)}
    if kind == "dlogc":
        return zero_k, {(ex.c_id(model, fac[1]),): Fraction(1)}
    if kind == "V":
        _, u, eta, exps = fac
        kap = tuple(Fraction(x, p**u) for x in exps)
        return kap, {(): Fraction(eta * p**u)}
    if kind == "dV":
        _, u, eta, exps = fac
        kap = tuple(Fraction(x, p**u) for x in exps)
        return kap, {(ex.g_id(model, i),): Fraction(eta * x) for i, x in enumerate(exps, 1) if x}
    if kind == "FdX":
        _, s, exps = fac
        kap = tuple(Fraction(x * p**s) for x in exps)
        return kap, {(ex.g_id(model, i),): Fraction(x) for i, x in enumerate(exps, 1) if x}
    raise DrwError(f"unknown factor {fac!r}")


def word_evec(w: Word) -> Tuple[tuple, Evec]:
    kappa = tuple(Fraction(0) for _ in range(w.model.n))
    vec: Evec = {(): Fraction(w.xi)}
    for fac in w.factors:
        k2, v2 = _factor_evec(w.model, fac)
        kappa = tuple(a + b for a, b in zip(kappa, k2))
        vec = ex.wedge(vec, v2)
    return kappa, vec


def normalize_word(w: Word) -> DrwElement:
    """Normal form of a word (semistable weights covering [1, d] vanish)."""
    for fac in w.factors:
        if fac[0] in ("V", "dV", "FdX"):
            exps = fac[3] if fac[0] != "FdX" else fac[2]
            if len(exps) != w.model.n or any(int(x) != x or x < 0 for x in exps):
                raise DrwError(f"malformed factor {fac!r}")
        elif fac[0] == "dlogX" and not 1 <= fac[1] <= w.model.e:
            raise DrwError(f"malformed factor {fac!r}")
        elif fac[0] == "dlogc" and not 1 <= fac[1] <= w.model.f:
            raise DrwError(f"malformed factor {fac!r}")
    kappa, vec = word_evec(w)
    return from_evecs(w.model, w.level, {kappa: vec})


def expand_to_word(model: LocalModel, m: int, key: Key, xi: int) -> Word:
    """Word form of eps_m(xi, k, P, J) built from V, d, F and dlog factors."""
    k, part, J = key
    p = model.p
    n = model.n
    u = u_of(k, p)
    factors = [("dlogc", j) for j in J] + [("dlogX", i) for i in part.poles]

    def exps_of(block, mult):
        out = [0] * n
        for i in block:
            out[i - 1] = int(k[i - 1] * mult)
        return tuple(out)

    def ordb(block):
        return min(int(ord_entry(k[i - 1], p)) for i in block)

    def d_factor(block, eta):
        o = ordb(block)
        if o < 0:
            return ("dV", -o, eta, exps_of(block, p ** (-o)))
        if eta != 1:
            raise DrwError("coefficient cannot ride an F d X factor")
        return ("FdX", o, exps_of(block, Fraction(1, p**o)))

    blocks = part.blocks
    if u == 0:
        lead = xi
        if blocks[0]:
            factors.append(("V", 0, 1, exps_of(blocks[0], 1)))
        factors += [d_factor(b, 1) for b in blocks[1:]]
        return Word(model, m, lead, tuple(factors))
    eta = xi // p**u
    if blocks[0]:
        factors.append(("V", u, eta, exps_of(blocks[0], p**u)))
        factors += [d_factor(b, 1) for b in blocks[1:]]
    else:
        factors.append(d_factor(blocks[1], eta))
        factors += [d_factor(b, 1) for b in blocks[2:]]
    return Word(model, m, 1, tuple(factors))


# -- sampling -------------------------------------------------------------------


def random_key(model: LocalModel, m: int, rng: random.Random, max_num: int = 4,
               max_den: int = 1, degree: Optional[int] = None, tries: int = 200) -> Key:
    """A random admissible (k, P, J) that survives at level m."""
    p = model.p
    vals = [v for v in entry_values(p, max_num, max_den) if u_of((v,), p) < m]
    for _ in range(tries):
        k = []
        for i in range(1, model.n + 1):
            r = rng.random()
            if r < 0.35:
                k.append(Fraction(0))
            elif r < 0.5 and i <= model.e:
                k.append(POLE)
            else:
                k.append(rng.choice(vals))
        k = tuple(k)
        if covers_relation(model, k):
            continue
        parts = enumerate_partitions(k, p)
        J = tuple(j for j in range(1, model.f + 1) if rng.random() < 0.4)
        if degree is not None:
            parts = [P for P in parts if len(J) + len(P.poles) + P.length == degree]
            if not parts:
                continue
        return (k, rng.choice(parts), J)
    raise DrwError("could not sample a key with the requested degree")


def random_xi(model: LocalModel, m: int, k, rng: random.Random) -> int:
    p = model.p
    u = u_of(k, p)
    while True:
        eta = rng.randrange(1, p ** (m - u))
        xi = (eta * p**u) % p**m
        if xi:
            return xi


def random_element(model: LocalModel, m: int, rng: random.Random, max_terms: int = 3,
                   max_num: int = 4, max_den: int = 1, degree: Optional[int] = None) -> DrwElement:
    terms: Dict[Key, int] = {}
    for _ in range(rng.randint(1, max_terms)):
        key = random_key(model, m, rng, max_num, max_den, degree)
        terms[key] = (terms.get(key, 0) + random_xi(model, m, key[0], rng)) % model.p**m
    return DrwElement(model, m, terms)


def basis_keys(model: LocalModel, kappa: tuple, m: int, degree: Optional[int] = None) -> list:
    """All keys (k, P, J) with k+ = kappa, deterministic order."""
    from .weights import enumerate_weights
    import itertools

    if covers_relation(model, kappa) or u_of(kappa, model.p) >= m:
        return []
    keys = []
    Js = [tuple(c) for s in range(model.f + 1) for c in itertools.combinations(range(1, model.f + 1), s)]
    for k in enumerate_weights(model, 0, 0, kappa=kappa):
        for part in enumerate_partitions(k, model.p):
            for J in Js:
                key = (k, part, J)
                if degree is None or key_degree(key) == degree:
                    keys.append(key)
    keys.sort(key=key_sort)
    return keys


def generator_order_exp(model: LocalModel, key: Key, m: int) -> int:
    """log_p of the additive order of eps_m(p^u, key): m - u(k+)."""
    return m - u_of(key[0], model.p)
