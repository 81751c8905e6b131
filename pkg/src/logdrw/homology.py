"""Homology of bounded complexes of finite abelian p-groups.

A complex is presented by cyclic generators of orders p^s in each degree and
integer matrices for the differentials (rows index the target generators).
Two routes are provided: ``homology_of`` lifts to free Z-modules, adjoins the
order relations and runs an integer Smith normal form; ``homology_local``
works over the chain ring Z/p^M and reads the invariants off the sizes of
the submodules p^j ker + im.  They are independent and checked against each
other in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

Matrix = List[List[int]]


@dataclass
class ComplexPresentation:
    p: int
    orders: Dict[int, List[int]]
    maps: Dict[int, Matrix]
    labels: Dict[int, list] = field(default_factory=dict)

    def degrees(self) -> List[int]:
        return sorted(self.orders)

    def rank(self, deg: int) -> int:
        return len(self.orders.get(deg, []))

    def matrix(self, deg: int) -> Matrix:
        """Differential out of ``deg``; zero matrix if absent."""
        if deg in self.maps:
            return self.maps[deg]
        return [[0] * self.rank(deg) for _ in range(self.rank(deg + 1))]

    def validate(self) -> None:
        p = self.p
        for deg, mat in self.maps.items():
            src = self.orders.get(deg, [])
            tgt = self.orders.get(deg + 1, [])
            if len(mat) != len(tgt) or any(len(r) != len(src) for r in mat):
                raise ValueError(f"shape mismatch at degree {deg}")
            for i, row in enumerate(mat):
                for j, a in enumerate(row):
                    # generator of order p^s must land in elements killed by p^s
                    if src[j] < tgt[i] and (a * p ** src[j]) % p ** tgt[i]:
                        raise ValueError(f"entry ({i},{j}) at degree {deg} is not well defined")
        for deg in self.maps:
            if deg + 1 in self.maps:
                prod = matmul(self.maps[deg + 1], self.maps[deg])
                tgt = self.orders.get(deg + 2, [])
                for i, row in enumerate(prod):
                    if any(x % p ** tgt[i] for x in row):
                        raise ValueError(f"d^2 != 0 at degree {deg}")


@dataclass
class HomologyReport:
    p: int
    divisors: Dict[int, List[int]]  # degree -> sorted exponents s (summands Z/p^s)
    free_rank: Dict[int, int]

    def is_zero(self) -> bool:
        return all(not v for v in self.divisors.values()) and not any(self.free_rank.values())

    def table(self) -> Dict[str, List[str]]:
        return {str(d): [f"p^{s}" for s in v] for d, v in sorted(self.divisors.items())}


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b:
        cols = len(b[0]) if b else 0
        return [[0] * cols for _ in a]
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


# --- integer Smith normal form --------------------------------------------------


def snf(m: Sequence[Sequence[int]]) -> Tuple[List[int], Matrix, Matrix]:
    """Smith normal form over Z.

    Returns (invariants, U, V) with U*M*V diagonal, the diagonal being the
    nonzero invariants d_1 | d_2 | ... followed by zeros, and U, V unimodular.
    """
    a = [list(map(int, row)) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, a[i][t] // a[t][t])
                    if a[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, a[t][j] // a[t][t])
                    if a[t][j]:
                        done = False
            if done:
                bad = next(
                    ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % a[t][t]),
                    None,
                )
                if bad is None:
                    break
                add_row(t, bad[0], -1)
                continue
            # move the smallest remaining entry of row/column t to the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, rows) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, cols) if a[t][j]]
            _, i, j = min(cand)
            swap_rows(t, i)
            swap_cols(t, j)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    inv = [a[i][i] for i in range(min(rows, cols)) if a[i][i]]
    return inv, u, v


def snf_diagonal(m: Sequence[Sequence[int]]) -> List[int]:
    return snf(m)[0]


def _det(m: Matrix) -> int:
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            if a[r][c]:
                q = a[r][c] / a[c][c]
                a[r] = [x - q * y for x, y in zip(a[r], a[c])]
    return int(det)


def verify_snf(m: Sequence[Sequence[int]], inv: List[int], u: Matrix, v: Matrix) -> bool:
    """Check the certificate U*M*V = D with |det U| = |det V| = 1."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    d = matmul(matmul(u, [list(r) for r in m]), v) if rows and cols else []
    for i in range(rows):
        for j in range(cols):
            want = inv[i] if i == j and i < len(inv) else 0
            if d[i][j] != want:
                return False
    if any(inv[i + 1] % inv[i] for i in range(len(inv) - 1)):
        return False
    return abs(_det(u)) == 1 and abs(_det(v)) == 1 if rows and cols else True


# --- free-cover homology -------------------------------------------------------------


def _exponent(x: int, p: int) -> int:
    s = 0
    while x % p == 0:
        x //= p
        s += 1
    if x != 1:
        raise ArithmeticError(f"invariant {x} is not a power of {p}")
    return s


def homology_of(c: ComplexPresentation) -> HomologyReport:
    """Homology via a free Z-presentation and integer Smith normal forms."""
    p = c.p
    divs: Dict[int, List[int]] = {}
    free: Dict[int, int] = {}
    for deg in c.degrees():
        n = c.rank(deg)
        if n == 0:
            divs[deg], free[deg] = [], 0
            continue
        ords = [p**s for s in c.orders[deg]]
        # kernel lattice of Z^n -> C^{deg+1}
        tgt = [p**s for s in c.orders.get(deg + 1, [])]
        if tgt:
            d = c.matrix(deg)
            aug = [list(d[i]) + [tgt[i] if j == i else 0 for j in range(len(tgt))] for i in range(len(tgt))]
            inv, _, v = snf(aug)
            r = len(inv)
            kern = [[v[row][col] for col in range(r, n + len(tgt))] for row in range(n)]
        else:
            kern = identity(n)
        # image lattice: previous differential plus order relations
        prev = c.matrix(deg - 1) if c.rank(deg - 1) else [[] for _ in range(n)]
        img = [list(prev[i]) + [ords[i] if j == i else 0 for j in range(n)] for i in range(n)]
        # express image generators in the kernel basis: Y = K^{-1} * img
        inv_k, uk, vk = snf(kern)
        if len(inv_k) != n:
            raise ArithmeticError("kernel lattice is not of full rank")
        t = matmul(uk, img)
        t = [[Fraction(x, inv_k[i]) for x in row] for i, row in enumerate(t)]
        y = [[sum(vk[i][k] * t[k][j] for k in range(n)) for j in range(len(img[0]))] for i in range(n)]
        if any(x.denominator != 1 for row in y for x in row):
            raise ArithmeticError("image is not contained in the kernel; d^2 != 0?")
        y = [[int(x) for x in row] for row in y]
        inv_y, _, _ = snf(y)
        divs[deg] = sorted(_exponent(x, p) for x in inv_y if x != 1)
        free[deg] = n - len(inv_y)
    return HomologyReport(p, divs, free)


# --- chain-ring route ---------------------------------------------------------------


def _val(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    s = 0
    while x % p == 0 and s < cap:
        x //= p
        s += 1
    return s


def local_snf(a: Matrix, p: int, cap: int, want_v: bool = False):
    """Smith form over Z/p^cap.  Returns (valuations, V or None)."""
    mod = p**cap
    a = [[x % mod for x in row] for row in a]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    v = identity(cols) if want_v else None
    vals = []
    t = 0
    while t < min(rows, cols):
        best = None
        bv = cap
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j]:
                    vv = _val(a[i][j], p, cap)
                    if vv < bv:
                        bv, best = vv, (i, j)
                        if vv == 0:
                            break
            if best is not None and bv == 0:
                break
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        if j != t:
            for row in a:
                row[t], row[j] = row[j], row[t]
            if v is not None:
                for row in v:
                    row[t], row[j] = row[j], row[t]
        piv = a[t][t]
        unit_inv = pow(piv // p**bv, -1, mod)
        for r in range(t + 1, rows):
            if a[r][t]:
                q = (a[r][t] // p**bv) * unit_inv % mod
                a[r] = [(x - q * y) % mod for x, y in zip(a[r], a[t])]
        for cidx in range(t + 1, cols):
            if a[t][cidx]:
                q = (a[t][cidx] // p**bv) * unit_inv % mod
                for row in a:
                    row[cidx] = (row[cidx] - q * row[t]) % mod
                if v is not None:
                    for row in v:
                        row[cidx] = (row[cidx] - q * row[t]) % mod
        vals.append(bv)
        t += 1
    return vals, v


def _log_size(gens: Matrix, p: int, cap: int) -> int:
    """log_p of the size of the submodule of (Z/p^cap)^n spanned by the columns."""
    if not gens or not gens[0]:
        return 0
    vals, _ = local_snf(gens, p, cap)
    return sum(cap - x for x in vals)


def homology_local(c: ComplexPresentation) -> HomologyReport:
    p = c.p
    cap = max([s for v in c.orders.values() for s in v] + [1])
    mod = p**cap
    divs: Dict[int, List[int]] = {}
    free: Dict[int, int] = {}
    for deg in c.degrees():
        n = c.rank(deg)
        free[deg] = 0
        if n == 0:
            divs[deg] = []
            continue
        tgt = c.orders.get(deg + 1, [])
        if tgt:
            d = c.matrix(deg)
            scaled = [[(x * p ** (cap - tgt[i])) % mod for x in row] for i, row in enumerate(d)]
            vals, v = local_snf(scaled, p, cap, want_v=True)
            kern_cols = []
            for t in range(n):
                vt = vals[t] if t < len(vals) else cap
                mult = p ** (cap - vt) if vt < cap else 1
                kern_cols.append([(v[r][t] * mult) % mod for r in range(n)])
            kern = [[kern_cols[j][i] for j in range(n)] for i in range(n)]
        else:
            kern = identity(n)
        prev = c.matrix(deg - 1) if c.rank(deg - 1) else [[] for _ in range(n)]
        img = [list(prev[i]) + [p ** c.orders[deg][i] if j == i else 0 for j in range(n)] for i in range(n)]
        base = _log_size(img, p, cap)
        sizes = []
        for j in range(cap + 1):
            gens = [[(x * p**j) % mod for x in kern[i]] + img[i] for i in range(n)]
            sizes.append(_log_size(gens, p, cap) - base)
        counts = [sizes[j] - sizes[j + 1] for j in range(cap)]  # summands of order >= p^(j+1)
        out = []
        for s in range(1, cap + 1):
            exact = counts[s - 1] - (counts[s] if s < cap else 0)
            out += [s] * exact
        divs[deg] = sorted(out)
    return HomologyReport(p, divs, free)


def homology(c: ComplexPresentation, method: str = "local") -> HomologyReport:
    if method == "local":
        return homology_local(c)
    if method == "integer":
        return homology_of(c)
    raise ValueError(f"unknown method {method!r}")


def brute_force_homology(c: ComplexPresentation) -> Dict[int, Tuple[int, ...]]:
    """Invariants by enumerating every element; only for tiny groups."""
    import itertools
    from collections import Counter

    p = c.p
    out = {}
    for deg in c.degrees():
        ords = c.orders[deg]
        elems = list(itertools.product(*[range(p**s) for s in ords]))
        tgt = c.orders.get(deg + 1, [])
        d = c.matrix(deg)

        def apply(mat, x, tords):
            return tuple(sum(mat[i][j] * x[j] for j in range(len(x))) % p ** tords[i] for i in range(len(tords)))

        kern = [x for x in elems if not any(apply(d, x, tgt))] if tgt else elems
        if c.rank(deg - 1):
            prev_ords = c.orders[deg - 1]
            dp = c.matrix(deg - 1)
            img = {apply(dp, y, ords) for y in itertools.product(*[range(p**s) for s in prev_ords])}
        else:
            img = {tuple(0 for _ in ords)}
        # H = kern / img; count elements of H killed by p^j
        img_set = img
        kern_set = set(kern)

        def cls(x):
            return min(tuple((a - b) % p**s for a, b, s in zip(x, y, ords)) for y in img_set)

        classes = {cls(x) for x in kern_set}
        killed = []
        for j in range(0, max(ords + [0]) + 2):
            cnt = sum(1 for x in classes if tuple((p**j * a) % p**s for a, s in zip(x, ords)) in img_set)
            killed.append(cnt)
        # killed[j] = |H[p^j]|; invariants from successive ratios
        inv = []
        import math

        logs = [round(math.log(k, p)) if k else 0 for k in killed]
        diffs = [logs[j + 1] - logs[j] for j in range(len(logs) - 1)]  # number of summands of order >= p^(j+1)
        for s in range(1, len(diffs) + 1):
            ge = diffs[s - 1]
            ge_next = diffs[s] if s < len(diffs) else 0
            inv += [s] * (ge - ge_next)
        out[deg] = tuple(sorted(inv))
    return out


# --- assembling per-weight complexes ---------------------------------------------------


def assemble(p: int, gens: Dict[int, list], orders: Dict[int, List[int]],
             apply: Callable[[int, object], Dict[object, Fraction]]) -> ComplexPresentation:
    """Matrix presentation of a differential given on generators.

    ``apply(deg, g)`` returns the image of generator g as rational coordinates
    in the generators of degree deg+1; each coordinate must be p-integral.
    """
    maps = {}
    for deg, src in gens.items():
        tgt = gens.get(deg + 1, [])
        if not tgt or not src:
            continue
        index = {g: i for i, g in enumerate(tgt)}
        mat = [[0] * len(src) for _ in tgt]
        for j, g in enumerate(src):
            for g2, c in apply(deg, g).items():
                i = index.get(g2)
                if i is None:
                    raise KeyError(f"image of {g} has a component outside the generator list: {g2}")
                c = Fraction(c)
                if c.denominator % p == 0:
                    raise ArithmeticError("non-integral matrix entry")
                mod = p ** orders[deg + 1][i]
                mat[i][j] = (c.numerator * pow(c.denominator, -1, mod)) % mod
        maps[deg] = mat
    return ComplexPresentation(p, {d: list(o) for d, o in orders.items()}, maps,
                               {d: list(g) for d, g in gens.items()})


def complex_from_operator(p: int, gens: Dict[int, list], orders: Dict[int, List[int]],
                          apply: Callable[[object], Dict[object, Fraction]]) -> ComplexPresentation:
    return assemble(p, gens, orders, lambda deg, g: apply(g))


def submodule_log_size(p: int, orders: List[int], columns: List[Dict[int, Fraction]]) -> int:
    """log_p |span of the given vectors| inside the sum of Z/p^orders[i]."""
    if not orders or not columns:
        return 0
    cap = max(orders)
    mod = p**cap
    mat = [[0] * len(columns) for _ in orders]
    for j, col in enumerate(columns):
        for i, c in col.items():
            c = Fraction(c)
            if c.denominator % p == 0:
                raise ArithmeticError("non-integral coordinate")
            v = c.numerator * pow(c.denominator, -1, mod) % mod
            mat[i][j] = (v * p ** (cap - orders[i])) % mod
    return _log_size(mat, p, cap)


def element_generators(model, m: int, keys: list) -> Dict[object, "object"]:
    """The generator eps_m(p^u, key) of order p^(m-u) for each key."""
    from .drw import DrwElement
    from .weights import u_of

    return {key: DrwElement(model, m, {key: model.p ** u_of(key[0], model.p)}) for key in keys}


def weight_subcomplex(model, m: int, kappa, variant: str = "absolute") -> ComplexPresentation:
    """Weight-kappa piece of W_m Lambda (absolute or relative) or of the lift."""
    from . import drw, lift_dr
    from . import exterior as ex
    from .weights import WeightError, covers_relation, u_of, validate_weight

    kappa = tuple(Fraction(x) for x in kappa)
    validate_weight(model, kappa)
    if variant == "lift":
        return lift_dr.weight_subcomplex_lift(model, m, kappa)
    if variant == "steenbrink-row":
        from .filtration_ss import steenbrink_total_complex

        return steenbrink_total_complex(model, m, kappa)
    if covers_relation(model, kappa):
        raise WeightError(f"weight {kappa} vanishes on this model")
    p = model.p
    keys = drw.basis_keys(model, kappa, m)
    if variant == "relative":
        if not model.semistable:
            raise WeightError("relative complex needs a semistable model")
        q = drw.pivot(model, kappa)
        keys = [k for k in keys if q not in k[1].poles]
    elif variant != "absolute":
        raise ValueError(f"unknown variant {variant!r}")
    u = u_of(kappa, p)
    gens: Dict[int, list] = {}
    for key in keys:
        gens.setdefault(drw.key_degree(key), []).append(key)
    orders = {deg: [m - u] * len(v) for deg, v in gens.items()}
    if variant == "absolute":
        def apply(key):
            return dict(ex.d_basis(model, key))
    else:
        rel_model = model.over_log_point()

        def apply(key):
            g = drw.DrwElement(rel_model, m, {key: p**u})
            img = drw.relative_differential(g)
            return drw.coords_of(img)
    return complex_from_operator(p, gens, orders, apply)


def _slot_keys(model, m: int, kappa, degree: int, relative: bool) -> list:
    from . import drw
    from .weights import covers_relation, u_of

    if kappa is None or covers_relation(model, kappa) or u_of(kappa, model.p) >= m:
        return []
    keys = drw.basis_keys(model, kappa, m, degree=degree)
    if relative:
        q = drw.pivot(model, kappa)
        keys = [k for k in keys if q not in k[1].poles]
    return keys


def mv_sequence(model, m: int, kappa, degree: int, relative: bool = True) -> ComplexPresentation:
    """0 -> X -> Z1 + Z2 -> Z -> 0 in one form degree at one weight of X.

    Positions 0, 1, 2 of the returned complex are X, Z1 (+) Z2 and Z; the
    second map is (a, b) -> a|Z - b|Z.  Exactness means zero homology.
    """
    from . import drw
    from .weights import u_of

    if model.d < 2:
        raise ValueError("Mayer-Vietoris needs d >= 2")
    if relative:
        model = model.over_log_point()
    kappa = tuple(Fraction(x) for x in kappa)
    d = model.d
    z1 = drw.mv_target_model(model, "Z1")
    z2 = drw.mv_target_model(model, "Z2")
    z = drw.mv_target_model(model, "Z")
    k_z2 = (kappa[d - 1],) + tuple(x for i, x in enumerate(kappa, start=1) if i != d)
    k_z = tuple(x for i, x in enumerate(kappa, start=1) if i != d) if kappa[d - 1] == 0 else None
    slots = {
        "X": (model, kappa),
        "Z1": (z1, kappa),
        "Z2": (z2, k_z2),
        "Z": (z, k_z),
    }
    keys = {name: _slot_keys(mod, m, k, degree, relative) for name, (mod, k) in slots.items()}
    gens = {0: [("X", k) for k in keys["X"]],
            1: [("Z1", k) for k in keys["Z1"]] + [("Z2", k) for k in keys["Z2"]],
            2: [("Z", k) for k in keys["Z"]]}
    gens = {t: v for t, v in gens.items() if v}
    p = model.p
    orders = {t: [m - u_of(g[1][0], p) for g in v] for t, v in gens.items()}

    def fix(y):
        return drw.to_relative(y) if relative else y

    def apply(t, g):
        name, key = g
        x = generator_element(slots[name][0], m, key)
        out = {}
        if name == "X":
            for tgt in ("Z1", "Z2"):
                for k2, c in drw.coords_of(fix(drw.mv_restrict(x, tgt))).items():
                    out[(tgt, k2)] = c
        elif name == "Z1":
            out = {("Z", k2): c for k2, c in drw.coords_of(fix(drw.mv_restrict(x, "Z", "Z1"))).items()}
        else:
            out = {("Z", k2): -c for k2, c in drw.coords_of(fix(drw.mv_restrict_z2_to_z(x, d))).items()}
        return out

    return assemble(p, gens, orders, apply)


def theta_sequence(model, m: int, kappa) -> ComplexPresentation:
    """0 -> W~Lambda^0 -> W~Lambda^1 -> ... with theta ^ as differential, one weight."""
    from . import drw
    from .weights import u_of

    model = model.over_log_point()
    kappa = tuple(Fraction(x) for x in kappa)
    gens: Dict[int, list] = {}
    for key in drw.basis_keys(model, kappa, m):
        gens.setdefault(drw.key_degree(key), []).append(key)
    p = model.p
    orders = {t: [m - u_of(k[0], p) for k in v] for t, v in gens.items()}

    def apply(t, key):
        return drw.coords_of(drw.wedge_theta(generator_element(model, m, key)))

    return assemble(p, gens, orders, apply)


def generator_element(model, m: int, key):
    """eps_m(p^u, key), the generator of order p^(m-u)."""
    from .drw import DrwElement
    from .weights import u_of

    return DrwElement(model, m, {key: model.p ** u_of(key[0], model.p)})
