"""p-typical Witt vectors over F_p[T_1..T_n] through universal polynomials.

This is a deliberately naive, independent implementation used as an oracle:
sums and products are computed coordinate by coordinate from the integer
polynomials s_i, m_i solving the ghost equations, then reduced mod p.
Polynomials are sparse maps from exponent tuples to coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

from .witt_scalar import StructureError, teich_int

Poly = Dict[Tuple[int, ...], int]


# --- sparse polynomial arithmetic -------------------------------------------------


def p_add(a: Poly, b: Poly, mod: int | None = None) -> Poly:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + c
        if mod:
            v %= mod
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def p_scale(a: Poly, c: int, mod: int | None = None) -> Poly:
    out = {}
    for e, x in a.items():
        v = x * c
        if mod:
            v %= mod
        if v:
            out[e] = v
    return out


def p_mul(a: Poly, b: Poly, mod: int | None = None) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    if mod:
        return {e: c % mod for e, c in out.items() if c % mod}
    return {e: c for e, c in out.items() if c}


def p_pow(a: Poly, k: int, nvars: int, mod: int | None = None) -> Poly:
    result: Poly = {(0,) * nvars: 1}
    base = a
    while k:
        if k & 1:
            result = p_mul(result, base, mod)
        k >>= 1
        if k:
            base = p_mul(base, base, mod)
    return result


def p_const(c: int, nvars: int) -> Poly:
    return {(0,) * nvars: c} if c else {}


def p_var(i: int, nvars: int) -> Poly:
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): 1}


def grlex(e: Tuple[int, ...]) -> tuple:
    return (sum(e), e)


# --- universal polynomials ----------------------------------------------------------


@dataclass(frozen=True)
class UniversalWittPolynomials:
    """s_i and m_i over Z in the variables X_0..X_{N-1}, Y_0..Y_{N-1}."""

    N: int
    p: int
    sums: Tuple[Poly, ...]
    products: Tuple[Poly, ...]

    def ghost(self, coords: Sequence[Poly], i: int) -> Poly:
        return ghost_poly(coords, i, self.p, 2 * self.N)


def ghost_poly(coords: Sequence[Poly], i: int, p: int, nvars: int) -> Poly:
    """w_i = sum_j p^j x_j^(p^(i-j)) over Z."""
    out: Poly = {}
    for j in range(i + 1):
        out = p_add(out, p_scale(p_pow(coords[j], p ** (i - j), nvars), p**j))
    return out


def _solve(target_ghosts: List[Poly], p: int, nvars: int) -> List[Poly]:
    sol: List[Poly] = []
    for i, g in enumerate(target_ghosts):
        rest = g
        for j in range(i):
            rest = p_add(rest, p_scale(p_pow(sol[j], p ** (i - j), nvars), -(p**j)))
        q = p**i
        if any(c % q for c in rest.values()):
            raise ArithmeticError("ghost equation not integral")
        sol.append({e: c // q for e, c in rest.items()})
    return sol


@lru_cache(maxsize=None)
def build_universal(N: int, p: int) -> UniversalWittPolynomials:
    if N < 1:
        raise ValueError("N must be >= 1")
    nv = 2 * N
    xs = [p_var(i, nv) for i in range(N)]
    ys = [p_var(N + i, nv) for i in range(N)]
    gx = [ghost_poly(xs, i, p, nv) for i in range(N)]
    gy = [ghost_poly(ys, i, p, nv) for i in range(N)]
    sums = _solve([p_add(a, b) for a, b in zip(gx, gy)], p, nv)
    prods = _solve([p_mul(a, b) for a, b in zip(gx, gy)], p, nv)
    return UniversalWittPolynomials(N, p, tuple(sums), tuple(prods))


# --- Witt vectors ----------------------------------------------------------------------


@dataclass(frozen=True)
class WittVectorPoly:
    """(a_0, ..., a_{N-1}) with a_i in F_p[T_1..T_n], stored as sorted term tuples."""

    p: int
    n: int
    coords: Tuple[Tuple[Tuple[Tuple[int, ...], int], ...], ...]

    @staticmethod
    def from_polys(p: int, n: int, polys: Iterable[Poly]) -> "WittVectorPoly":
        cs = []
        for poly in polys:
            terms = {}
            for e, c in poly.items():
                if len(e) != n:
                    raise StructureError(f"exponent {e} has wrong length for n={n}")
                if c % p:
                    terms[tuple(e)] = c % p
            cs.append(tuple(sorted(terms.items(), key=lambda t: grlex(t[0]))))
        if not cs:
            raise StructureError("length must be >= 1")
        return WittVectorPoly(p, n, tuple(cs))

    @property
    def length(self) -> int:
        return len(self.coords)

    def poly(self, i: int) -> Poly:
        return dict(self.coords[i])

    def polys(self) -> List[Poly]:
        return [dict(c) for c in self.coords]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def _check(self, other: "WittVectorPoly") -> None:
        if (self.p, self.n, self.length) != (other.p, other.n, other.length):
            raise StructureError("shape mismatch")

    def __add__(self, other):
        return w_add(self, other)

    def __mul__(self, other):
        return w_mul(self, other)

    def __neg__(self):
        return w_neg(self)

    def __sub__(self, other):
        return w_add(self, w_neg(other))

    def __repr__(self) -> str:
        return f"WittVectorPoly(p={self.p}, {[self.poly(i) for i in range(self.length)]})"


def zero(p: int, n: int, N: int) -> WittVectorPoly:
    return WittVectorPoly.from_polys(p, n, [{}] * N)


def constant(p: int, n: int, N: int, c: int) -> WittVectorPoly:
    """Image of the integer c in W_N(F_p)."""
    out = zero(p, n, N)
    one = teich(p, n, N, 1, (0,) * n)
    acc = out
    for _ in range(abs(c)):
        acc = w_add(acc, one)
    return w_neg(acc) if c < 0 else acc


def teich(p: int, n: int, N: int, a: int, exps: Sequence[int]) -> WittVectorPoly:
    """[a T^exps]."""
    polys = [{tuple(exps): a % p}] + [{}] * (N - 1)
    return WittVectorPoly.from_polys(p, n, polys)


def _evaluate(table: Tuple[Poly, ...], a: WittVectorPoly, b: WittVectorPoly) -> WittVectorPoly:
    p, n, N = a.p, a.n, a.length
    args = a.polys() + b.polys()
    cache: Dict[Tuple[int, int], Poly] = {}

    def power(j: int, k: int) -> Poly:
        key = (j, k)
        if key not in cache:
            cache[key] = p_pow(args[j], k, n, p)
        return cache[key]

    out = []
    for i in range(N):
        acc: Poly = {}
        for e, c in table[i].items():
            if c % p == 0:
                continue
            term: Poly = {(0,) * n: c % p}
            for j, k in enumerate(e):
                if k:
                    term = p_mul(term, power(j, k), p)
                    if not term:
                        break
            if term:
                acc = p_add(acc, term, p)
        out.append(acc)
    return WittVectorPoly.from_polys(p, n, out)


def w_add(a: WittVectorPoly, b: WittVectorPoly) -> WittVectorPoly:
    a._check(b)
    return _evaluate(build_universal(a.length, a.p).sums, a, b)


def w_mul(a: WittVectorPoly, b: WittVectorPoly) -> WittVectorPoly:
    a._check(b)
    return _evaluate(build_universal(a.length, a.p).products, a, b)


def minus_one(p: int, n: int, N: int) -> WittVectorPoly:
    if p == 2:
        return WittVectorPoly.from_polys(p, n, [p_const(1, n)] * N)
    return teich(p, n, N, p - 1, (0,) * n)


def w_neg(a: WittVectorPoly) -> WittVectorPoly:
    return w_mul(minus_one(a.p, a.n, a.length), a)


def w_frobenius(a: WittVectorPoly) -> WittVectorPoly:
    """Coordinatewise p-th power, dropping the last coordinate."""
    if a.length < 2:
        raise StructureError("F needs length >= 2")
    p = a.p
    polys = [{tuple(p * x for x in e): c for e, c in a.poly(i).items()} for i in range(a.length - 1)]
    return WittVectorPoly.from_polys(p, a.n, polys)


def w_verschiebung(a: WittVectorPoly) -> WittVectorPoly:
    return WittVectorPoly.from_polys(a.p, a.n, [{}] + a.polys())


def w_restrict(a: WittVectorPoly, N: int) -> WittVectorPoly:
    return WittVectorPoly.from_polys(a.p, a.n, a.polys()[:N])


# --- Teichmuller expansions ---------------------------------------------------------


Term = Tuple[Tuple[int, ...], int, int]  # (exponents, shift, coefficient)


def expansion_to_coords(terms: Iterable[Term], p: int, n: int, N: int) -> WittVectorPoly:
    """sum of V^shift([c] T^exps) at length N."""
    acc = zero(p, n, N)
    for exps, shift, c in terms:
        if shift >= N or c % p == 0:
            continue
        x = teich(p, n, N - shift, c, exps)
        for _ in range(shift):
            x = w_verschiebung(x)
        acc = w_add(acc, x)
    return acc


def coords_to_expansion(a: WittVectorPoly) -> List[Term]:
    """Unique expansion into V^s([c] T^e) terms by peeling off the 0-th coordinate."""
    p, n = a.p, a.n
    out: List[Term] = []
    shift = 0
    cur = a
    while True:
        head = cur.coords[0]
        for e, c in head:
            out.append((e, shift, c))
        if cur.length == 1:
            break
        if head:
            lead = expansion_to_coords([(e, 0, c) for e, c in head], p, n, cur.length)
            cur = w_add(cur, w_neg(lead))
        if cur.coords[0]:
            raise ArithmeticError("peeling failed to clear the head coordinate")
        cur = WittVectorPoly.from_polys(p, n, cur.polys()[1:])
        shift += 1
    return sorted(out, key=lambda t: (t[1], grlex(t[0])))


# --- conversion with degree-0 normal forms ---------------------------------------------


def _teich_digits(eta: int, p: int, length: int) -> List[int]:
    """Digits c_t with eta = sum p^t [c_t] in Z/p^length."""
    digits = []
    mod = p**length
    eta %= mod
    for t in range(length):
        c = eta % p
        digits.append(c)
        eta = (eta - teich_int(c, length, p)) % mod
        if eta % p:
            raise ArithmeticError("Teichmuller digit extraction failed")
        eta //= p
    return digits


def from_drw(omega) -> WittVectorPoly:
    """Degree-0 DrwElement -> Witt vector of length equal to its level."""
    from .weights import k_plus, u_of

    model, m, p = omega.model, omega.level, omega.p
    terms: List[Term] = []
    for key, xi in omega.terms.items():
        k, part, J = key
        if J or part.poles or part.length:
            raise StructureError("only degree-0 elements convert to Witt vectors")
        u = u_of(k, p)
        eta = (xi % p**m) // p**u
        for t, c in enumerate(_teich_digits(eta, p, m - u)):
            if c:
                s = u + t
                exps = tuple(int(x * p**s) for x in k_plus(k))
                terms.append((exps, s, c))
    return expansion_to_coords(terms, p, model.n, m)


def to_drw(a: WittVectorPoly, model):
    """Witt vector over F_p[T] -> degree-0 DrwElement on a model with the same n."""
    from . import drw

    if model.n != a.n or model.p != a.p:
        raise StructureError("model does not match the Witt vector")
    m, p = a.length, a.p
    evecs: Dict[tuple, dict] = {}
    for exps, s, c in coords_to_expansion(a):
        kappa = tuple(Fraction(x, p**s) for x in exps)
        vec = evecs.setdefault(kappa, {})
        vec[()] = vec.get((), 0) + p**s * teich_int(c, m, p)
    return drw.from_evecs(model, m, {k: {(): Fraction(v[()])} for k, v in evecs.items()})
