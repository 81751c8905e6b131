"""Truncated Witt vectors of the prime field, W_m(F_p) = Z/p^m.

Over F_p the Witt Frobenius is the identity of Z_p, so on a truncation it is
just reduction to the next lower level.  Verschiebung is multiplication by p
and raises the level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

INF = math.inf

Extended = Union[int, float]


class LevelError(ValueError):
    """Raised when an operation would leave the allowed range of levels."""


class StructureError(ValueError):
    """Raised when two operands live in different rings."""


def p_valuation(x: int, p: int) -> Extended:
    """Largest t with p^t | x; +inf for x == 0."""
    if x == 0:
        return INF
    t = 0
    while x % p == 0:
        x //= p
        t += 1
    return t


@dataclass(frozen=True, order=True)
class WittScalar:
    value: int
    level: int
    prime: int

    def __post_init__(self):
        if self.level < 1:
            raise LevelError(f"level must be positive, got {self.level}")
        object.__setattr__(self, "value", self.value % self.prime**self.level)

    @property
    def modulus(self) -> int:
        return self.prime**self.level

    def _check(self, other: "WittScalar") -> None:
        if not isinstance(other, WittScalar):
            raise StructureError(f"cannot combine WittScalar with {type(other).__name__}")
        if other.level != self.level or other.prime != self.prime:
            raise StructureError(
                f"W_{self.level}(F_{self.prime}) vs W_{other.level}(F_{other.prime})"
            )

    def __add__(self, other: "WittScalar") -> "WittScalar":
        return add(self, other)

    def __sub__(self, other: "WittScalar") -> "WittScalar":
        self._check(other)
        return WittScalar(self.value - other.value, self.level, self.prime)

    def __neg__(self) -> "WittScalar":
        return WittScalar(-self.value, self.level, self.prime)

    def __mul__(self, other: "WittScalar") -> "WittScalar":
        return mul(self, other)

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"WittScalar({self.value} mod {self.prime}^{self.level})"


def add(a: WittScalar, b: WittScalar) -> WittScalar:
    a._check(b)
    return WittScalar(a.value + b.value, a.level, a.prime)


def mul(a: WittScalar, b: WittScalar) -> WittScalar:
    a._check(b)
    return WittScalar(a.value * b.value, a.level, a.prime)


def frobenius(a: WittScalar) -> WittScalar:
    if a.level < 2:
        raise LevelError("Frobenius of a level-1 scalar would have level 0")
    return WittScalar(a.value, a.level - 1, a.prime)


def verschiebung(a: WittScalar) -> WittScalar:
    return WittScalar(a.prime * a.value, a.level + 1, a.prime)


def restrict(a: WittScalar) -> WittScalar:
    """The projection W_m -> W_{m-1}; coincides with F over F_p."""
    if a.level < 2:
        raise LevelError("cannot restrict below level 1")
    return WittScalar(a.value, a.level - 1, a.prime)


def teichmuller(a: int, m: int, p: int) -> WittScalar:
    """Teichmueller representative of a in F_p at level m."""
    a %= p
    return WittScalar(pow(a, p ** (m - 1), p**m), m, p)


def teich_int(a: int, m: int, p: int) -> int:
    """Integer in [0, p^m) representing the Teichmueller lift of a."""
    a %= p
    return pow(a, p ** (m - 1), p**m) if m > 0 else 0


def ord_p(a: WittScalar) -> Extended:
    return p_valuation(a.value, a.prime)
