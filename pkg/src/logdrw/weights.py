"""Weights, partitions of their supports, and local-model descriptors.

A weight assigns to each variable position either a non-negative rational
with p-power denominator or the pole marker ``POLE`` (written p^{-inf}).
Positions are 1-based throughout, matching the usual T_1, ..., T_n.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence, Union


class _Pole:
    __slots__ = ()

    def __repr__(self) -> str:
        return "POLE"

    def __reduce__(self):
        return "POLE"

    def __mul__(self, other):
        # p * p^{-inf} = p^{-inf} and p^{-1} * p^{-inf} = p^{-inf}
        return self

    __rmul__ = __mul__
    __truediv__ = __mul__


POLE = _Pole()

Entry = Union[Fraction, _Pole]
Weight = tuple  # tuple[Entry, ...]


class ModelError(ValueError):
    pass


class WeightError(ValueError):
    pass


@dataclass(frozen=True)
class LocalModel:
    """Chart of a log smooth scheme over F_p.

    ``d == 0`` is the polynomial ring F_p[T_1..T_n] with log structure
    N^e + N^f (the N^f part maps to 0); ``d >= 1`` is the quotient by
    T_1 ... T_d.  ``base`` records whether the semistable model is viewed
    over the trivial base or over the standard log point.
    """

    p: int
    n: int
    e: int
    f: int = 0
    d: int = 0
    base: str = "absolute"

    def __post_init__(self):
        if self.p < 2 or any(self.p % q == 0 for q in range(2, int(self.p**0.5) + 1)):
            raise ModelError(f"p={self.p} is not prime")
        if not 0 <= self.e <= self.n:
            raise ModelError("need 0 <= e <= n")
        if self.f < 0:
            raise ModelError("need f >= 0")
        if self.d and not 1 <= self.d <= self.e:
            raise ModelError("need 1 <= d <= e for a semistable model")
        if self.base not in ("absolute", "log-point"):
            raise ModelError(f"unknown base {self.base!r}")
        if self.base == "log-point" and self.d == 0:
            raise ModelError("the log-point base needs d >= 1")

    @property
    def semistable(self) -> bool:
        return self.d >= 1

    def over_log_point(self) -> "LocalModel":
        return LocalModel(self.p, self.n, self.e, self.f, self.d, "log-point")

    def absolute(self) -> "LocalModel":
        return LocalModel(self.p, self.n, self.e, self.f, self.d, "absolute")

    def describe(self) -> str:
        if self.d:
            s = f"semistable:p={self.p},n={self.n},e={self.e},f={self.f},d={self.d}"
            return s + (",base=log-point" if self.base == "log-point" else "")
        return f"poly:p={self.p},n={self.n},e={self.e},f={self.f}"

    @classmethod
    def parse(cls, text: str) -> "LocalModel":
        """Parse ``poly:p=3,n=2,e=1,f=0`` or ``semistable:p=3,n=2,e=2,f=0,d=2``."""
        m = re.fullmatch(r"\s*(poly|semistable)\s*:\s*(.*?)\s*", text)
        if not m:
            raise ModelError(f"bad model descriptor {text!r}")
        kind, body = m.groups()
        fields = {}
        for part in filter(None, (s.strip() for s in body.split(","))):
            key, sep, val = part.partition("=")
            if not sep:
                raise ModelError(f"bad field {part!r} in {text!r}")
            fields[key.strip()] = val.strip()
        base = fields.pop("base", "log-point" if kind == "semistable" else "absolute")
        try:
            ints = {k: int(v) for k, v in fields.items()}
        except ValueError as exc:
            raise ModelError(f"non-integer field in {text!r}") from exc
        unknown = set(ints) - {"p", "n", "e", "f", "d"}
        if unknown:
            raise ModelError(f"unknown fields {sorted(unknown)} in {text!r}")
        if "p" not in ints or "n" not in ints:
            raise ModelError("descriptor needs p and n")
        e = ints.get("e", 0)
        d = ints.get("d", 0)
        if kind == "poly" and d:
            raise ModelError("poly models have no relation; use semistable:")
        if kind == "semistable" and not d:
            raise ModelError("semistable models need d >= 1")
        return cls(ints["p"], ints["n"], e, ints.get("f", 0), d, base)


# --- entries ---------------------------------------------------------------


def is_pole(x) -> bool:
    return x is POLE


def ord_entry(x: Entry, p: int) -> float:
    """p-adic order of an entry; -inf for the pole marker, +inf for 0."""
    if x is POLE:
        return -math.inf
    if x == 0:
        return math.inf
    num, den = x.numerator, x.denominator
    t = 0
    while num % p == 0:
        num //= p
        t += 1
    while den % p == 0:
        den //= p
        t -= 1
    return t


def make_weight(entries: Sequence, p: int | None = None) -> Weight:
    """Normalise user input (ints, Fractions, strings, POLE) into a weight tuple."""
    out = []
    for x in entries:
        if x is POLE or (isinstance(x, str) and x.strip() in ("POLE", "p^-inf", "-inf")):
            out.append(POLE)
            continue
        q = Fraction(x)
        if q < 0:
            raise WeightError(f"negative weight entry {x}")
        if p is not None and q.denominator != 1:
            den = q.denominator
            while den % p == 0:
                den //= p
            if den != 1:
                raise WeightError(f"denominator of {q} is not a power of {p}")
        out.append(q)
    return tuple(out)


def validate_weight(model: LocalModel, k: Weight) -> None:
    if len(k) != model.n:
        raise WeightError(f"weight has {len(k)} entries, model has n={model.n}")
    for i, x in enumerate(k, start=1):
        if x is POLE:
            if i > model.e:
                raise WeightError(f"pole at position {i} > e={model.e}")
            continue
        if x < 0:
            raise WeightError("negative entry")
        den = x.denominator
        while den % model.p == 0:
            den //= model.p
        if den != 1:
            raise WeightError(f"entry {x} is not in Z[1/{model.p}]")
    if model.semistable and covers_relation(model, k):
        raise WeightError(f"[1,{model.d}] is contained in Supp k+")


def covers_relation(model: LocalModel, k: Weight) -> bool:
    """True iff [1, d] is inside Supp k+ (such weights vanish on the semistable model)."""
    if not model.d:
        return False
    return all(k[i] is not POLE and k[i] != 0 for i in range(model.d))


def k_plus(k: Weight) -> Weight:
    return tuple(Fraction(0) if x is POLE else x for x in k)


def pole_set(k: Weight) -> tuple:
    return tuple(i for i, x in enumerate(k, start=1) if x is POLE)


def support(k: Weight) -> tuple:
    return tuple(i for i, x in enumerate(k, start=1) if x is POLE or x != 0)


def support_plus(k: Weight) -> tuple:
    return tuple(i for i, x in enumerate(k, start=1) if x is not POLE and x != 0)


def is_integral(k: Weight) -> bool:
    return all(x is POLE or x.denominator == 1 for x in k)


def u_of(k: Weight, p: int) -> int:
    """Least s >= 0 with p^s k+ integral."""
    u = 0
    for x in k:
        if x is POLE:
            continue
        den = x.denominator
        s = 0
        while den > 1:
            den //= p
            s += 1
        u = max(u, s)
    return u


def scale(k: Weight, c: Fraction) -> Weight:
    """Multiply every entry by c, with the pole conventions p * POLE = POLE."""
    return tuple(POLE if x is POLE else x * c for x in k)


def canonical_order(k: Weight, p: int) -> tuple:
    """Supp k sorted by p-adic order ascending (poles first), ties by index."""
    return tuple(sorted(support(k), key=lambda i: (ord_entry(k[i - 1], p), i)))


def t_of(k: Weight, interval: Sequence[int], p: int) -> int:
    """Minus the p-adic order of the first element of a nonempty interval."""
    if not interval:
        raise WeightError("t(I) needs a nonempty interval")
    o = ord_entry(k[interval[0] - 1], p)
    if math.isinf(o):
        raise WeightError("t(I) is undefined on poles or zeros")
    return -int(o)


def u_interval(k: Weight, interval: Sequence[int], p: int) -> int:
    return max(0, t_of(k, interval, p))


def ord_interval(k: Weight, interval: Sequence[int], p: int) -> int:
    return min(int(ord_entry(k[i - 1], p)) for i in interval)


# --- partitions ------------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    """(I_{-inf}, I_0, I_1, ..., I_l); ``blocks[0]`` is I_0 and may be empty."""

    poles: tuple
    blocks: tuple

    @property
    def I0(self) -> tuple:
        return self.blocks[0]

    @property
    def length(self) -> int:
        """The number l of nonempty d-blocks."""
        return len(self.blocks) - 1

    def __repr__(self) -> str:
        inner = "; ".join(f"I{j}={list(b)}" for j, b in enumerate(self.blocks))
        return f"P(-inf:{list(self.poles)}; {inner})"


def partition_from_starts(k: Weight, starts: Sequence[int], p: int) -> Partition:
    """Partition whose d-blocks start at the given 0-based slots of the ordered Supp k+."""
    order = ordered_support_plus(k, p)
    cuts = sorted(starts)
    head = order[: cuts[0]] if cuts else order
    blocks = [tuple(head)]
    for a, b in zip(cuts, cuts[1:] + [len(order)]):
        blocks.append(tuple(order[a:b]))
    return Partition(pole_set(k), tuple(blocks))


def ordered_support_plus(k: Weight, p: int) -> tuple:
    return tuple(i for i in canonical_order(k, p) if k[i - 1] is not POLE)


def starts_of(part: Partition) -> tuple:
    """0-based slots where I_1, ..., I_l begin in the ordered Supp k+."""
    pos = len(part.blocks[0])
    out = []
    for b in part.blocks[1:]:
        out.append(pos)
        pos += len(b)
    return tuple(out)


def enumerate_partitions(k: Weight, p: int) -> list:
    """All partitions of Supp k, in a fixed deterministic order."""
    r = len(support_plus(k))
    out = []
    for size in range(r + 1):
        for starts in itertools.combinations(range(r), size):
            out.append(partition_from_starts(k, list(starts), p))
    return out


def validate_partition(k: Weight, part: Partition, p: int) -> bool:
    if tuple(sorted(part.poles)) != pole_set(k) or tuple(part.poles) != pole_set(k):
        return False
    if not part.blocks:
        return False
    if any(len(b) == 0 for b in part.blocks[1:]):
        return False
    flat = tuple(i for b in part.blocks for i in b)
    return flat == ordered_support_plus(k, p)


# --- grids -----------------------------------------------------------------


@lru_cache(maxsize=None)
def entry_values(p: int, max_num: int, max_den: int) -> tuple:
    """Distinct values a/p^t with 0 <= a <= max_num and 0 <= t <= max_den."""
    vals = {Fraction(a, p**t) for t in range(max_den + 1) for a in range(max_num + 1)}
    return tuple(sorted(vals))


def enumerate_weights(
    model: LocalModel,
    max_num: int,
    max_den: int,
    *,
    poles: bool = True,
    kappa: Weight | None = None,
) -> Iterator[Weight]:
    """Weights of the model on the grid, deterministic order.

    With ``kappa`` given, yields only the weights whose pole-free part is
    kappa (that is, all admissible pole sets on top of it).
    """
    if kappa is not None:
        zeros = [i for i in range(1, model.e + 1) if kappa[i - 1] == 0]
        sets = (
            itertools.chain.from_iterable(
                itertools.combinations(zeros, s) for s in range(len(zeros) + 1)
            )
            if poles
            else [()]
        )
        for ps in sets:
            k = tuple(POLE if i in ps else kappa[i - 1] for i in range(1, model.n + 1))
            if not covers_relation(model, k):
                yield k
        return
    vals = entry_values(model.p, max_num, max_den)
    per_pos = []
    for i in range(1, model.n + 1):
        opts = list(vals)
        if poles and i <= model.e:
            opts = [POLE] + opts
        per_pos.append(opts)
    for k in itertools.product(*per_pos):
        if not covers_relation(model, k):
            yield tuple(k)


def enumerate_kappas(model: LocalModel, max_num: int, max_den: int) -> Iterator[Weight]:
    """Pole-free weights on the grid that are admissible for the model."""
    yield from enumerate_weights(model, max_num, max_den, poles=False)


def format_entry(x: Entry, p: int) -> str:
    if x is POLE:
        return "p^-inf"
    if x.denominator == 1:
        return str(x.numerator)
    t = 0
    den = x.denominator
    while den > 1:
        den //= p
        t += 1
    return f"{x.numerator}/p^{t}"


def parse_entry(text: str, p: int) -> Entry:
    text = text.strip()
    if text in ("p^-inf", "POLE"):
        return POLE
    m = re.fullmatch(r"(\d+)(?:/p\^(\d+))?", text)
    if not m:
        raise WeightError(f"bad weight entry {text!r}")
    num = int(m.group(1))
    t = int(m.group(2) or 0)
    return Fraction(num, p**t)
